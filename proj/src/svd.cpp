#include "rankpref/svd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace rankpref {

ImputedTable impute_baseline(const SparseRatingMatrix& matrix, double damping) {
    if (matrix.nnz() == 0) throw DataError("no entries");
    if (damping < 0) throw std::invalid_argument("damping must be nonnegative");
    const auto nu = matrix.n_users();
    const auto ni = matrix.n_items();

    Baseline b;
    double total = 0.0;
    for (const auto& e : matrix.entries()) total += e.value;
    b.global_mean = total / static_cast<double>(matrix.nnz());

    b.row_bias.assign(nu, 0.0);
    for (Index u = 0; u < nu; ++u) {
        auto row = matrix.row(u);
        double s = 0.0;
        for (auto k : row) s += matrix.entry(k).value - b.global_mean;
        if (!row.empty()) b.row_bias[u] = s / (static_cast<double>(row.size()) + damping);
    }
    b.col_bias.assign(ni, 0.0);
    for (Index i = 0; i < ni; ++i) {
        auto col = matrix.col(i);
        double s = 0.0;
        for (auto k : col) {
            const auto& e = matrix.entry(k);
            s += e.value - b.global_mean - b.row_bias[e.user];
        }
        if (!col.empty()) b.col_bias[i] = s / (static_cast<double>(col.size()) + damping);
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(matrix.nnz());
    for (const auto& e : matrix.entries())
        triplets.emplace_back(static_cast<int>(e.user), static_cast<int>(e.item),
                              e.value - b(e.user, e.item));
    ImputedTable out;
    out.residual.resize(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(ni));
    out.residual.setFromTriplets(triplets.begin(), triplets.end());
    out.baseline = std::move(b);
    return out;
}

std::size_t retained_rank(double fraction, std::size_t n_users, std::size_t n_items) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("retained fraction must lie in (0, 1]");
    const auto full = std::min(n_users, n_items);
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(full)));
    return std::max<std::size_t>(1, std::min(k, full));
}

SvdModel::SvdModel(Eigen::MatrixXd left, Eigen::VectorXd singular_values, Eigen::MatrixXd right,
                   Baseline baseline)
    : left_(std::move(left)),
      sigma_(std::move(singular_values)),
      right_(std::move(right)),
      baseline_(std::move(baseline)) {
    if (sigma_.size() < 1) throw std::invalid_argument("SVD model needs rank k >= 1");
    if (left_.cols() != sigma_.size() || right_.cols() != sigma_.size())
        throw std::invalid_argument("SVD factor shapes disagree with rank");
    if (static_cast<std::size_t>(sigma_.size()) >
        static_cast<std::size_t>(std::min(left_.rows(), right_.rows())))
        throw std::invalid_argument("rank exceeds min(n_users, n_items)");
    if (baseline_.row_bias.size() != static_cast<std::size_t>(left_.rows()) ||
        baseline_.col_bias.size() != static_cast<std::size_t>(right_.rows()))
        throw std::invalid_argument("baseline dimensions disagree with factors");
}

Prediction SvdModel::try_predict(Index u, Index i) const {
    double s = 0.0;
    for (Eigen::Index j = 0; j < sigma_.size(); ++j) s += left_(u, j) * sigma_[j] * right_(i, j);
    return {baseline_(u, i) + s, PredictStatus::ok};
}

Eigen::MatrixXd SvdModel::reconstruct() const {
    return left_ * sigma_.asDiagonal() * right_.transpose();
}

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

SvdModel truncated_svd(const Eigen::SparseMatrix<double, Eigen::RowMajor>& table, std::size_t k,
                       Baseline baseline, const SvdOptions& opts) {
    const auto m = static_cast<std::size_t>(table.rows());
    const auto n = static_cast<std::size_t>(table.cols());
    if (k < 1 || k > std::min(m, n)) throw std::invalid_argument("rank k out of range");
    const auto width = static_cast<Eigen::Index>(std::min(k + opts.oversampling, std::min(m, n)));

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd omega(static_cast<Eigen::Index>(n), width);
    for (Eigen::Index c = 0; c < omega.cols(); ++c)
        for (Eigen::Index r = 0; r < omega.rows(); ++r) omega(r, c) = normal(rng);

    const Eigen::SparseMatrix<double, Eigen::RowMajor> table_t = table.transpose();
    Eigen::MatrixXd q = orthonormalize(table * omega);
    for (std::size_t it = 0; it < opts.power_iterations; ++it) {
        Eigen::MatrixXd z = orthonormalize(table_t * q);
        q = orthonormalize(table * z);
    }
    // table ~ q * b with b = q^T table; decompose b^T = table^T q (n x width).
    const Eigen::MatrixXd bt = table_t * q;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd left = q * svd.matrixV().leftCols(kk);
    Eigen::MatrixXd right = svd.matrixU().leftCols(kk);
    Eigen::VectorXd sigma = svd.singularValues().head(kk);
    return SvdModel(std::move(left), std::move(sigma), std::move(right), std::move(baseline));
}

SvdModel fit_svd(const SparseRatingMatrix& matrix, double fraction, const SvdOptions& opts) {
    const auto k = retained_rank(fraction, matrix.n_users(), matrix.n_items());
    auto imputed = impute_baseline(matrix, opts.damping);
    return truncated_svd(imputed.residual, k, std::move(imputed.baseline), opts);
}

// Text format:
//   rankpref-svd 1
//   n_users N / n_items M / rank K / global_mean G
//   row_bias (N values), col_bias (M values), singular_values (K values)
//   left_factors (N*K values, row-major), right_factors (M*K values, row-major)
void SvdModel::save(std::ostream& out) const {
    char buf[40];
    auto real = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    };
    out << "rankpref-svd 1\n";
    out << "n_users " << left_.rows() << "\nn_items " << right_.rows() << "\nrank " << sigma_.size()
        << '\n';
    out << "global_mean " << real(baseline_.global_mean) << '\n';
    out << "row_bias\n";
    for (double x : baseline_.row_bias) out << real(x) << '\n';
    out << "col_bias\n";
    for (double x : baseline_.col_bias) out << real(x) << '\n';
    out << "singular_values\n";
    for (Eigen::Index j = 0; j < sigma_.size(); ++j) out << real(sigma_[j]) << '\n';
    auto dump = [&](const Eigen::MatrixXd& f) {
        for (Eigen::Index r = 0; r < f.rows(); ++r)
            for (Eigen::Index c = 0; c < f.cols(); ++c) out << real(f(r, c)) << '\n';
    };
    out << "left_factors\n";
    dump(left_);
    out << "right_factors\n";
    dump(right_);
}

namespace {

void expect(std::istream& in, const char* key) {
    std::string tok;
    if (!(in >> tok) || tok != key) throw DataError(std::string("model file: expected '") + key + "'");
}

double next_real(std::istream& in) {
    std::string tok;
    if (!(in >> tok)) throw DataError("model file: truncated");
    try {
        return std::stod(tok);
    } catch (const std::exception&) {
        throw DataError("model file: bad number '" + tok + "'");
    }
}

std::size_t next_count(std::istream& in, const char* key) {
    expect(in, key);
    std::size_t v;
    if (!(in >> v)) throw DataError(std::string("model file: bad value for '") + key + "'");
    return v;
}

}  // namespace

SvdModel SvdModel::load(std::istream& in) {
    if (next_count(in, "rankpref-svd") != 1) throw DataError("model file: unsupported version");
    const auto nu = next_count(in, "n_users");
    const auto ni = next_count(in, "n_items");
    const auto k = next_count(in, "rank");
    Baseline b;
    expect(in, "global_mean");
    b.global_mean = next_real(in);
    expect(in, "row_bias");
    b.row_bias.resize(nu);
    for (auto& x : b.row_bias) x = next_real(in);
    expect(in, "col_bias");
    b.col_bias.resize(ni);
    for (auto& x : b.col_bias) x = next_real(in);
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::VectorXd sigma(kk);
    expect(in, "singular_values");
    for (Eigen::Index j = 0; j < kk; ++j) sigma[j] = next_real(in);
    auto read_factor = [&](const char* key, std::size_t rows) {
        expect(in, key);
        Eigen::MatrixXd f(static_cast<Eigen::Index>(rows), kk);
        for (Eigen::Index r = 0; r < f.rows(); ++r)
            for (Eigen::Index c = 0; c < kk; ++c) f(r, c) = next_real(in);
        return f;
    };
    auto left = read_factor("left_factors", nu);
    auto right = read_factor("right_factors", ni);
    return SvdModel(std::move(left), std::move(sigma), std::move(right), std::move(b));
}

}  // namespace rankpref
