#include "rankpref/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

namespace rankpref {

ConsistencyModel::ConsistencyModel(ConsistencyKind kind, std::vector<double> row_param,
                                   std::vector<double> col_param, ComponentLabeling components,
                                   std::vector<char> user_has_data, std::vector<char> item_has_data,
                                   FitStats stats)
    : kind_(kind),
      row_(std::move(row_param)),
      col_(std::move(col_param)),
      components_(std::move(components)),
      user_has_data_(std::move(user_has_data)),
      item_has_data_(std::move(item_has_data)),
      stats_(stats) {
    if (components_.component_of_user.size() != row_.size() ||
        components_.component_of_item.size() != col_.size() ||
        user_has_data_.size() != row_.size() || item_has_data_.size() != col_.size())
        throw std::invalid_argument("consistency model dimensions disagree");
}

Prediction ConsistencyModel::try_predict(Index u, Index i) const {
    if (!user_has_data_[u] || !item_has_data_[i]) return {0.0, PredictStatus::cold_start};
    if (!components_.connected(u, i)) return {0.0, PredictStatus::cross_component};
    const double s = row_[u] + col_[i];
    return {kind_ == ConsistencyKind::shift ? s : std::exp(s), PredictStatus::ok};
}

namespace {

ConsistencyModel fit_additive(const SparseRatingMatrix& matrix, std::span<const double> value,
                              ConsistencyKind kind, const BalanceOptions& opts) {
    if (matrix.nnz() == 0) throw DataError("no entries");
    if (!(opts.tol > 0)) throw std::invalid_argument("tolerance must be positive");

    const auto nu = matrix.n_users();
    const auto ni = matrix.n_items();
    std::vector<double> alpha(nu, 0.0), beta(ni, 0.0);
    std::vector<double> row_sum(nu), col_sum(ni);

    FitStats stats;
    stats.tolerance = opts.tol;
    while (stats.iterations < opts.max_iter) {
        for (Index u = 0; u < nu; ++u) {
            auto row = matrix.row(u);
            if (row.empty()) continue;
            double s = 0.0;
            for (auto k : row) s += value[k] - beta[matrix.entry(k).item];
            alpha[u] = s / static_cast<double>(row.size());
        }
        for (Index i = 0; i < ni; ++i) {
            auto col = matrix.col(i);
            if (col.empty()) continue;
            double s = 0.0;
            for (auto k : col) s += value[k] - alpha[matrix.entry(k).user];
            beta[i] = s / static_cast<double>(col.size());
        }
        ++stats.iterations;

        std::fill(row_sum.begin(), row_sum.end(), 0.0);
        std::fill(col_sum.begin(), col_sum.end(), 0.0);
        const auto entries = matrix.entries();
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const double e = value[k] - alpha[entries[k].user] - beta[entries[k].item];
            row_sum[entries[k].user] += e;
            col_sum[entries[k].item] += e;
        }
        double residual = 0.0;
        for (Index u = 0; u < nu; ++u)
            if (auto n = matrix.row(u).size())
                residual = std::max(residual, std::abs(row_sum[u]) / static_cast<double>(n));
        for (Index i = 0; i < ni; ++i)
            if (auto n = matrix.col(i).size())
                residual = std::max(residual, std::abs(col_sum[i]) / static_cast<double>(n));
        stats.final_residual = residual;
        if (residual <= opts.tol) {
            stats.converged = true;
            break;
        }
    }

    // Gauge: mean row parameter is zero within every component.
    auto components = connected_components(matrix);
    std::vector<double> shift(components.n_components, 0.0);
    std::vector<std::size_t> members(components.n_components, 0);
    for (Index u = 0; u < nu; ++u) {
        shift[components.component_of_user[u]] += alpha[u];
        ++members[components.component_of_user[u]];
    }
    for (std::size_t c = 0; c < shift.size(); ++c)
        if (members[c]) shift[c] /= static_cast<double>(members[c]);
    for (Index u = 0; u < nu; ++u) alpha[u] -= shift[components.component_of_user[u]];
    for (Index i = 0; i < ni; ++i)
        if (!matrix.col(i).empty()) beta[i] += shift[components.component_of_item[i]];

    std::vector<char> user_has(nu), item_has(ni);
    for (Index u = 0; u < nu; ++u) user_has[u] = !matrix.row(u).empty();
    for (Index i = 0; i < ni; ++i) item_has[i] = !matrix.col(i).empty();
    return ConsistencyModel(kind, std::move(alpha), std::move(beta), std::move(components),
                            std::move(user_has), std::move(item_has), stats);
}

}  // namespace

ConsistencyModel fit_sc(const SparseRatingMatrix& matrix, const BalanceOptions& opts) {
    std::vector<double> value;
    value.reserve(matrix.nnz());
    for (const auto& e : matrix.entries()) value.push_back(e.value);
    return fit_additive(matrix, value, ConsistencyKind::shift, opts);
}

ConsistencyModel fit_uc(const SparseRatingMatrix& matrix, const BalanceOptions& opts) {
    std::vector<double> value;
    value.reserve(matrix.nnz());
    for (const auto& e : matrix.entries()) {
        if (!(e.value > 0)) throw DataError("unit-consistent fit requires positive ratings");
        value.push_back(std::log(e.value));
    }
    return fit_additive(matrix, value, ConsistencyKind::unit, opts);
}

// Text format, one token pair or value per line:
//   rankpref-consistency 1
//   kind shift|unit
//   n_users N / n_items M / tolerance T / iterations K / converged 0|1 / final_residual R
//   row_param, then N values; col_param, then M values
//   row_component, then N ids; col_component, then M ids (-1 marks an empty row/column)
void ConsistencyModel::save(std::ostream& out) const {
    char buf[40];
    auto real = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    };
    out << "rankpref-consistency 1\n";
    out << "kind " << (kind_ == ConsistencyKind::shift ? "shift" : "unit") << '\n';
    out << "n_users " << row_.size() << '\n' << "n_items " << col_.size() << '\n';
    out << "tolerance " << real(stats_.tolerance) << '\n';
    out << "iterations " << stats_.iterations << '\n';
    out << "converged " << (stats_.converged ? 1 : 0) << '\n';
    out << "final_residual " << real(stats_.final_residual) << '\n';
    out << "row_param\n";
    for (double x : row_) out << real(x) << '\n';
    out << "col_param\n";
    for (double x : col_) out << real(x) << '\n';
    out << "row_component\n";
    for (std::size_t u = 0; u < row_.size(); ++u)
        out << (user_has_data_[u] ? static_cast<long long>(components_.component_of_user[u]) : -1)
            << '\n';
    out << "col_component\n";
    for (std::size_t i = 0; i < col_.size(); ++i)
        out << (item_has_data_[i] ? static_cast<long long>(components_.component_of_item[i]) : -1)
            << '\n';
}

namespace {

template <class T>
T read_field(std::istream& in, const char* key) {
    std::string k;
    T v{};
    if (!(in >> k) || k != key || !(in >> v))
        throw DataError(std::string("model file: expected '") + key + "'");
    return v;
}

void expect_token(std::istream& in, const char* key) {
    std::string k;
    if (!(in >> k) || k != key) throw DataError(std::string("model file: expected '") + key + "'");
}

double read_real(std::istream& in) {
    std::string tok;
    if (!(in >> tok)) throw DataError("model file: truncated");
    try {
        return std::stod(tok);
    } catch (const std::exception&) {
        throw DataError("model file: bad number '" + tok + "'");
    }
}

}  // namespace

ConsistencyModel ConsistencyModel::load(std::istream& in) {
    if (read_field<int>(in, "rankpref-consistency") != 1)
        throw DataError("model file: unsupported version");
    auto kind_name = read_field<std::string>(in, "kind");
    ConsistencyKind kind;
    if (kind_name == "shift")
        kind = ConsistencyKind::shift;
    else if (kind_name == "unit")
        kind = ConsistencyKind::unit;
    else
        throw DataError("model file: unknown kind '" + kind_name + "'");
    const auto nu = read_field<std::size_t>(in, "n_users");
    const auto ni = read_field<std::size_t>(in, "n_items");
    FitStats stats;
    expect_token(in, "tolerance");
    stats.tolerance = read_real(in);
    stats.iterations = read_field<std::size_t>(in, "iterations");
    stats.converged = read_field<int>(in, "converged") != 0;
    expect_token(in, "final_residual");
    stats.final_residual = read_real(in);

    std::vector<double> row(nu), col(ni);
    expect_token(in, "row_param");
    for (auto& x : row) x = read_real(in);
    expect_token(in, "col_param");
    for (auto& x : col) x = read_real(in);

    ComponentLabeling comps;
    comps.component_of_user.resize(nu);
    comps.component_of_item.resize(ni);
    std::vector<char> user_has(nu), item_has(ni);
    // Empty rows/columns get fresh singleton labels after the stored ones.
    long long max_label = -1;
    std::vector<long long> ru(nu), ci(ni);
    auto read_label = [&](long long& v) {
        if (!(in >> v) || v < -1) throw DataError("model file: bad component label");
        max_label = std::max(max_label, v);
    };
    expect_token(in, "row_component");
    for (auto& v : ru) read_label(v);
    expect_token(in, "col_component");
    for (auto& v : ci) read_label(v);
    auto next = static_cast<std::uint32_t>(max_label + 1);
    for (std::size_t u = 0; u < nu; ++u) {
        user_has[u] = ru[u] >= 0;
        comps.component_of_user[u] = ru[u] >= 0 ? static_cast<std::uint32_t>(ru[u]) : next++;
    }
    for (std::size_t i = 0; i < ni; ++i) {
        item_has[i] = ci[i] >= 0;
        comps.component_of_item[i] = ci[i] >= 0 ? static_cast<std::uint32_t>(ci[i]) : next++;
    }
    comps.n_components = next;
    return ConsistencyModel(kind, std::move(row), std::move(col), std::move(comps),
                            std::move(user_has), std::move(item_has), stats);
}

}  // namespace rankpref
