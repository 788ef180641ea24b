#pragma once

#include <iosfwd>
#include <vector>

#include "rankpref/components.hpp"
#include "rankpref/predictor.hpp"
#include "rankpref/ratings.hpp"

namespace rankpref {

struct BalanceOptions {
    double tol = 1e-10;
    std::size_t max_iter = 5000;
};

struct FitStats {
    std::size_t iterations = 0;
    double final_residual = 0.0;
    double tolerance = 0.0;
    bool converged = false;
};

enum class ConsistencyKind { shift, unit };

/// Two-factor completion model.
///
/// Shift-consistent (SC) models predict `row_param[u] + col_param[i]`, the
/// least-squares two-way additive fit of the filled cells. Unit-consistent
/// (UC) models are the same fit on log ratings and predict
/// `exp(row_param[u] + col_param[i])`.
///
/// Parameters are only identified up to a per-component constant moved
/// between rows and columns; the stored values use the gauge where row
/// parameters average to zero over the users of each component.
class ConsistencyModel final : public Predictor {
public:
    ConsistencyModel(ConsistencyKind kind, std::vector<double> row_param,
                     std::vector<double> col_param, ComponentLabeling components,
                     std::vector<char> user_has_data, std::vector<char> item_has_data,
                     FitStats stats);

    ConsistencyKind kind() const noexcept { return kind_; }
    const std::vector<double>& row_param() const noexcept { return row_; }
    const std::vector<double>& col_param() const noexcept { return col_; }
    const ComponentLabeling& components() const noexcept { return components_; }
    const FitStats& fit_stats() const noexcept { return stats_; }

    std::size_t n_users() const noexcept override { return row_.size(); }
    std::size_t n_items() const noexcept override { return col_.size(); }
    Prediction try_predict(Index u, Index i) const override;

    void save(std::ostream& out) const;
    static ConsistencyModel load(std::istream& in);

private:
    ConsistencyKind kind_;
    std::vector<double> row_;
    std::vector<double> col_;
    ComponentLabeling components_;
    std::vector<char> user_has_data_;
    std::vector<char> item_has_data_;
    FitStats stats_;
};

/// Shift-consistent fit by alternating row-mean / column-mean updates.
/// Each sweep costs O(nnz). A model is returned even when max_iter is reached
/// without meeting `tol`; check fit_stats().converged.
ConsistencyModel fit_sc(const SparseRatingMatrix& matrix, const BalanceOptions& opts = {});

/// Unit-consistent fit: fit_sc on the natural log of the ratings.
/// Throws DataError if any rating is not strictly positive.
ConsistencyModel fit_uc(const SparseRatingMatrix& matrix, const BalanceOptions& opts = {});

}  // namespace rankpref
