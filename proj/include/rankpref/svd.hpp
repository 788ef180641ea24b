#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "rankpref/predictor.hpp"
#include "rankpref/ratings.hpp"

namespace rankpref {

/// Damped bias model: global mean plus per-user and per-item offsets.
/// User offsets are shrunk means of (r - mean); item offsets are shrunk means
/// of what remains after the user offset. Both divide by (count + damping).
struct Baseline {
    double global_mean = 0.0;
    std::vector<double> row_bias;
    std::vector<double> col_bias;

    double operator()(Index u, Index i) const { return global_mean + row_bias[u] + col_bias[i]; }
};

struct ImputedTable {
    /// r - baseline on filled cells; missing cells are implicit zeros.
    Eigen::SparseMatrix<double, Eigen::RowMajor> residual;
    Baseline baseline;
};

ImputedTable impute_baseline(const SparseRatingMatrix& matrix, double damping = 5.0);

struct SvdOptions {
    double damping = 5.0;
    std::size_t oversampling = 10;
    std::size_t power_iterations = 4;
    std::uint64_t seed = 42;
};

/// Number of retained singular triplets for a retained fraction:
/// max(1, round(fraction * min(n_users, n_items))).
std::size_t retained_rank(double fraction, std::size_t n_users, std::size_t n_items);

class SvdModel final : public Predictor {
public:
    SvdModel(Eigen::MatrixXd left, Eigen::VectorXd singular_values, Eigen::MatrixXd right,
             Baseline baseline);

    std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma_.size()); }
    const Eigen::MatrixXd& left_factors() const noexcept { return left_; }
    const Eigen::MatrixXd& right_factors() const noexcept { return right_; }
    const Eigen::VectorXd& singular_values() const noexcept { return sigma_; }
    const Baseline& baseline() const noexcept { return baseline_; }

    std::size_t n_users() const noexcept override { return static_cast<std::size_t>(left_.rows()); }
    std::size_t n_items() const noexcept override { return static_cast<std::size_t>(right_.rows()); }
    /// Baseline plus the rank-k reconstruction; never declines, never clamps.
    Prediction try_predict(Index u, Index i) const override;

    /// Rank-k reconstruction of the residual table, without the baseline.
    Eigen::MatrixXd reconstruct() const;

    void save(std::ostream& out) const;
    static SvdModel load(std::istream& in);

private:
    Eigen::MatrixXd left_;
    Eigen::VectorXd sigma_;
    Eigen::MatrixXd right_;
    Baseline baseline_;
};

/// Truncated SVD of the imputed residual table by randomized subspace iteration.
/// Throws std::invalid_argument unless 0 < fraction <= 1.
SvdModel fit_svd(const SparseRatingMatrix& matrix, double fraction, const SvdOptions& opts = {});

/// Same decomposition on an explicit table, keeping k triplets. Exposed for
/// tests and for callers that bring their own fill rule.
SvdModel truncated_svd(const Eigen::SparseMatrix<double, Eigen::RowMajor>& table, std::size_t k,
                       Baseline baseline, const SvdOptions& opts = {});

}  // namespace rankpref
