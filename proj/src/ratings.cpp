#include "rankpref/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <tuple>
#include <string_view>

namespace rankpref {

DataError::DataError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

RatingScale::RatingScale(double lo, double hi) : min_rating(lo), max_rating(hi) {
    if (!(lo < hi)) throw std::invalid_argument("rating scale requires min_rating < max_rating");
}

Index IdMap::intern(const std::string& external) {
    auto [it, inserted] = index_.try_emplace(external, static_cast<Index>(ids_.size()));
    if (inserted) ids_.push_back(external);
    return it->second;
}

Index IdMap::at(const std::string& external) const {
    auto it = index_.find(external);
    if (it == index_.end()) throw DataError("unknown id '" + external + "'");
    return it->second;
}

namespace {

// Counting sort of entry offsets by `key`, then by `minor` inside each bucket.
template <class Key, class Minor>
void build_index(std::size_t n, const std::vector<Rating>& entries, Key key, Minor minor,
                 std::vector<std::uint32_t>& ptr, std::vector<std::uint32_t>& offsets) {
    ptr.assign(n + 1, 0);
    for (const auto& e : entries) ++ptr[key(e) + 1];
    std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
    offsets.resize(entries.size());
    std::vector<std::uint32_t> fill(ptr.begin(), ptr.end() - 1);
    for (std::uint32_t k = 0; k < entries.size(); ++k) offsets[fill[key(entries[k])]++] = k;
    for (std::size_t b = 0; b < n; ++b) {
        std::sort(offsets.begin() + ptr[b], offsets.begin() + ptr[b + 1],
                  [&](std::uint32_t a, std::uint32_t c) {
                      return minor(entries[a]) < minor(entries[c]);
                  });
    }
}

}  // namespace

SparseRatingMatrix::SparseRatingMatrix(std::size_t n_users, std::size_t n_items,
                                       std::vector<Rating> entries, RatingScale scale,
                                       IdMap user_ids, IdMap item_ids)
    : n_users_(n_users),
      n_items_(n_items),
      entries_(std::move(entries)),
      scale_(scale),
      user_ids_(std::move(user_ids)),
      item_ids_(std::move(item_ids)) {
    if (user_ids_.size() != 0 && user_ids_.size() != n_users_)
        throw DataError("user id map size does not match n_users");
    if (item_ids_.size() != 0 && item_ids_.size() != n_items_)
        throw DataError("item id map size does not match n_items");
    for (const auto& e : entries_) {
        if (e.user >= n_users_ || e.item >= n_items_) throw DataError("entry index out of bounds");
        if (!scale_.contains(e.value)) throw DataError("rating outside scale");
    }
    build_index(n_users_, entries_, [](const Rating& e) { return e.user; },
                [](const Rating& e) { return e.item; }, row_ptr_, row_entries_);
    build_index(n_items_, entries_, [](const Rating& e) { return e.item; },
                [](const Rating& e) { return e.user; }, col_ptr_, col_entries_);
    for (std::size_t u = 0; u < n_users_; ++u) {
        for (auto k = row_ptr_[u] + 1; k < row_ptr_[u + 1]; ++k) {
            if (entries_[row_entries_[k]].item == entries_[row_entries_[k - 1]].item)
                throw DataError("duplicate pair (user " + user_label(static_cast<Index>(u)) +
                                ", item " + item_label(entries_[row_entries_[k]].item) + ")");
        }
    }
}

double SparseRatingMatrix::sparsity() const noexcept {
    const double cells = static_cast<double>(n_users_) * static_cast<double>(n_items_);
    return cells > 0 ? 1.0 - static_cast<double>(entries_.size()) / cells : 1.0;
}

std::span<const std::uint32_t> SparseRatingMatrix::row(Index u) const {
    return std::span(row_entries_).subspan(row_ptr_.at(u), row_ptr_[u + 1] - row_ptr_[u]);
}

std::span<const std::uint32_t> SparseRatingMatrix::col(Index i) const {
    return std::span(col_entries_).subspan(col_ptr_.at(i), col_ptr_[i + 1] - col_ptr_[i]);
}

std::optional<std::size_t> SparseRatingMatrix::offset_of(Index u, Index i) const {
    auto r = row(u);
    auto it = std::lower_bound(r.begin(), r.end(), i,
                               [&](std::uint32_t k, Index item) { return entries_[k].item < item; });
    if (it == r.end() || entries_[*it].item != i) return std::nullopt;
    return *it;
}

const double* SparseRatingMatrix::find(Index u, Index i) const {
    auto k = offset_of(u, i);
    return k ? &entries_[*k].value : nullptr;
}

std::string SparseRatingMatrix::user_label(Index u) const {
    return user_ids_.size() ? user_ids_.external(u) : std::to_string(u);
}

std::string SparseRatingMatrix::item_label(Index i) const {
    return item_ids_.size() ? item_ids_.external(i) : std::to_string(i);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, std::string_view sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + sep.size();
    }
    return out;
}

bool is_integer(std::string_view s) {
    long long v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size();
}

double parse_real(std::string_view s, std::size_t line) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        throw DataError("malformed rating '" + std::string(s) + "'", line);
    return v;
}

// Accumulates rows from a text source, assigning dense ids on first sight.
class TripleBuilder {
public:
    explicit TripleBuilder(RatingScale scale) : scale_(scale) {}

    void add(std::string_view user, std::string_view item, double value, std::size_t line) {
        if (!scale_.contains(value)) throw DataError("rating outside scale", line);
        const Index u = users_.intern(std::string(user));
        const Index i = items_.intern(std::string(item));
        entries_.push_back({u, i, value});
        lines_.push_back(line);
    }

    SparseRatingMatrix build() {
        if (entries_.empty()) throw DataError("no entries");
        // Report duplicates with the line of the second occurrence.
        std::vector<std::size_t> order(entries_.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& x = entries_[a];
            const auto& y = entries_[b];
            return std::tie(x.user, x.item, a) < std::tie(y.user, y.item, b);
        });
        for (std::size_t k = 1; k < order.size(); ++k) {
            const auto& x = entries_[order[k - 1]];
            const auto& y = entries_[order[k]];
            if (x.user == y.user && x.item == y.item)
                throw DataError("duplicate pair (user " + users_.external(y.user) + ", item " +
                                    items_.external(y.item) + ")",
                                lines_[order[k]]);
        }
        const auto nu = users_.size();
        const auto ni = items_.size();
        return SparseRatingMatrix(nu, ni, std::move(entries_), scale_, std::move(users_),
                                  std::move(items_));
    }

private:
    RatingScale scale_;
    IdMap users_, items_;
    std::vector<Rating> entries_;
    std::vector<std::size_t> lines_;
};

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

}  // namespace

SparseRatingMatrix load_movielens(const std::filesystem::path& path, RatingScale scale) {
    auto in = open_input(path);
    TripleBuilder builder(scale);
    std::string buf;
    std::size_t line = 0;
    while (std::getline(in, buf)) {
        ++line;
        auto text = trim(buf);
        if (text.empty()) continue;
        auto f = split(text, "::");
        if (f.size() != 4 || !is_integer(f[0]) || !is_integer(f[1]) || !is_integer(f[2]) ||
            !is_integer(f[3]))
            throw DataError("malformed line, expected UserID::MovieID::Rating::Timestamp", line);
        builder.add(f[0], f[1], parse_real(f[2], line), line);
    }
    return builder.build();
}

SparseRatingMatrix load_csv(const std::filesystem::path& path, bool has_header, RatingScale scale) {
    auto in = open_input(path);
    TripleBuilder builder(scale);
    std::string buf;
    std::size_t line = 0;
    bool header_pending = has_header;
    while (std::getline(in, buf)) {
        ++line;
        std::string_view text = trim(buf);
        if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
        if (text.empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        auto f = split(text, ",");
        if (f.size() != 3 || f[0].empty() || f[1].empty())
            throw DataError("malformed line, expected user_id,item_id,rating", line);
        builder.add(f[0], f[1], parse_real(f[2], line), line);
    }
    return builder.build();
}

void write_csv(const SparseRatingMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "user_id,item_id,rating\n";
    char num[32];
    for (Index u = 0; u < matrix.n_users(); ++u) {
        const auto label = matrix.user_label(u);
        for (auto k : matrix.row(u)) {
            const auto& e = matrix.entry(k);
            std::snprintf(num, sizeof num, "%.17g", e.value);
            out << label << ',' << matrix.item_label(e.item) << ',' << num << '\n';
        }
    }
    if (!out) throw DataError("write failed for " + path.string());
}

SparseRatingMatrix remove_entries(const SparseRatingMatrix& matrix,
                                  std::span<const std::pair<Index, Index>> removals) {
    std::vector<char> drop(matrix.nnz(), 0);
    for (auto [u, i] : removals) {
        if (u >= matrix.n_users() || i >= matrix.n_items())
            throw DataError("removal index out of bounds");
        auto offset = matrix.offset_of(u, i);
        if (!offset) throw DataError("cannot remove absent entry (" + std::to_string(u) + ", " +
                                     std::to_string(i) + ")");
        if (drop[*offset]) throw DataError("entry listed twice for removal");
        drop[*offset] = 1;
    }
    std::vector<Rating> kept;
    kept.reserve(matrix.nnz() - removals.size());
    for (std::size_t k = 0; k < matrix.nnz(); ++k)
        if (!drop[k]) kept.push_back(matrix.entry(k));
    return SparseRatingMatrix(matrix.n_users(), matrix.n_items(), std::move(kept), matrix.scale(),
                              matrix.user_ids(), matrix.item_ids());
}

SparseRatingMatrix truncate(const SparseRatingMatrix& matrix, std::size_t max_users,
                            std::size_t max_items) {
    const auto nu = std::min(max_users, matrix.n_users());
    const auto ni = std::min(max_items, matrix.n_items());
    std::vector<Rating> kept;
    for (const auto& e : matrix.entries())
        if (e.user < nu && e.item < ni) kept.push_back(e);
    IdMap users, items;
    if (matrix.user_ids().size())
        for (Index u = 0; u < nu; ++u) users.intern(matrix.user_ids().external(u));
    if (matrix.item_ids().size())
        for (Index i = 0; i < ni; ++i) items.intern(matrix.item_ids().external(i));
    return SparseRatingMatrix(nu, ni, std::move(kept), matrix.scale(), std::move(users),
                              std::move(items));
}

}  // namespace rankpref
