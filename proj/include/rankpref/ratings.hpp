#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rankpref {

using Index = std::uint32_t;

/// Raised for malformed or inconsistent rating data. Carries the 1-based
/// source line when the problem came from a file.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct RatingScale {
    double min_rating = 1.0;
    double max_rating = 5.0;

    RatingScale() = default;
    RatingScale(double lo, double hi);

    bool contains(double r) const noexcept { return r >= min_rating && r <= max_rating; }
};

struct Rating {
    Index user;
    Index item;
    double value;

    friend bool operator==(const Rating&, const Rating&) = default;
};

/// Bidirectional map between external ids (as they appear in the source file)
/// and dense 0-based indices, assigned in order of first appearance.
class IdMap {
public:
    Index intern(const std::string& external);
    Index at(const std::string& external) const;
    bool contains(const std::string& external) const { return index_.contains(external); }
    const std::string& external(Index i) const { return ids_.at(i); }
    std::size_t size() const noexcept { return ids_.size(); }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, Index> index_;
};

struct MatrixStats {
    std::size_t n_users;
    std::size_t n_items;
    std::size_t nnz;
    double sparsity;
};

/// Immutable user x item rating matrix.
///
/// Entries are kept as a triple list; `row(u)` and `col(i)` return offsets
/// into that list sorted by item (resp. user), so both views enumerate the
/// same triple set. Edits produce a new matrix.
class SparseRatingMatrix {
public:
    SparseRatingMatrix() = default;

    /// Validates bounds, scale and uniqueness, then builds both indexes.
    /// Throws DataError on violation.
    SparseRatingMatrix(std::size_t n_users, std::size_t n_items, std::vector<Rating> entries,
                       RatingScale scale = {}, IdMap user_ids = {}, IdMap item_ids = {});

    std::size_t n_users() const noexcept { return n_users_; }
    std::size_t n_items() const noexcept { return n_items_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    double sparsity() const noexcept;
    MatrixStats stats() const noexcept { return {n_users_, n_items_, nnz(), sparsity()}; }
    const RatingScale& scale() const noexcept { return scale_; }

    std::span<const Rating> entries() const noexcept { return entries_; }
    const Rating& entry(std::size_t offset) const { return entries_[offset]; }

    /// Entry offsets of user u, ordered by item index.
    std::span<const std::uint32_t> row(Index u) const;
    /// Entry offsets of item i, ordered by user index.
    std::span<const std::uint32_t> col(Index i) const;

    /// Rating at (u, i), or nullptr if the cell is empty. O(log row length).
    const double* find(Index u, Index i) const;
    /// Entry offset of (u, i), or nullopt if the cell is empty.
    std::optional<std::size_t> offset_of(Index u, Index i) const;

    const IdMap& user_ids() const noexcept { return user_ids_; }
    const IdMap& item_ids() const noexcept { return item_ids_; }

    /// External id for display; falls back to the dense index when the
    /// matrix was built without id maps.
    std::string user_label(Index u) const;
    std::string item_label(Index i) const;

private:
    std::size_t n_users_ = 0;
    std::size_t n_items_ = 0;
    std::vector<Rating> entries_;
    RatingScale scale_;
    IdMap user_ids_;
    IdMap item_ids_;

    std::vector<std::uint32_t> row_ptr_, row_entries_;
    std::vector<std::uint32_t> col_ptr_, col_entries_;
};

/// `UserID::MovieID::Rating::Timestamp` lines. Timestamps are parsed and dropped.
SparseRatingMatrix load_movielens(const std::filesystem::path& path, RatingScale scale = {});

/// `user_id,item_id,rating` rows, optional single header row, LF or CRLF.
SparseRatingMatrix load_csv(const std::filesystem::path& path, bool has_header,
                            RatingScale scale = {});

/// Writes the matrix in the CSV layout accepted by load_csv (with header).
void write_csv(const SparseRatingMatrix& matrix, const std::filesystem::path& path);

/// Returns a copy without the listed cells. Throws DataError if a listed cell is empty
/// or listed twice.
SparseRatingMatrix remove_entries(const SparseRatingMatrix& matrix,
                                  std::span<const std::pair<Index, Index>> removals);

/// Keeps users with index < max_users and items with index < max_items.
/// Ids of the retained rows/columns are preserved.
SparseRatingMatrix truncate(const SparseRatingMatrix& matrix, std::size_t max_users,
                            std::size_t max_items);

}  // namespace rankpref
