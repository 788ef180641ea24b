#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankpref/consistency.hpp"
#include "rankpref/predictor.hpp"
#include "rankpref/svd.hpp"

namespace rankpref {

enum class MethodKind { uc, sc, svd };

struct MethodSpec {
    MethodKind kind = MethodKind::sc;
    double fraction = 0.0;  // svd only

    /// "UC", "SC" or "SVD(<fraction>)".
    std::string label() const;
};

struct MethodOptions {
    BalanceOptions balance;
    SvdOptions svd;
};

struct FittedMethod {
    std::unique_ptr<Predictor> model;
    std::optional<FitStats> balance_stats;  // UC/SC only
};

FittedMethod fit_method(const MethodSpec& spec, const SparseRatingMatrix& matrix,
                        const MethodOptions& opts);

/// Parses "uc", "sc", "svd" (expanded to one entry per fraction) or "svd:<f>".
/// Throws std::invalid_argument on unknown names.
std::vector<MethodSpec> parse_methods(const std::string& list,
                                      const std::vector<double>& svd_fractions);

inline const std::vector<double> default_svd_fractions{0.1, 0.3, 0.6};

}  // namespace rankpref
