#pragma once

#include <cstdint>

#include "rankpref/methods.hpp"

namespace rankpref {

struct AuditResult {
    std::size_t trials = 0;
    std::size_t violations = 0;   // predicted B strictly above A
    std::size_t ties = 0;         // |pred A - pred B| <= tie tolerance
    std::size_t regenerated = 0;  // draws rejected because the held-out user was unpredictable
};

/// Consensus-order check on random unanimous-preference matrices.
///
/// Each trial draws a 3..8 x 3..8 integer-rated matrix with fill in [0.5, 1].
/// Items 0 (A) and 1 (B) are rated together or not at all, and every user
/// who rates them rates A strictly above B. One such user has both ratings
/// withheld; the trial is a violation when the fitted method predicts B above
/// A for that user. Draws where that user cannot be predicted are redrawn.
AuditResult audit_consensus_order(const MethodSpec& method, std::size_t trials, std::uint64_t seed,
                                  const MethodOptions& opts = {});

}  // namespace rankpref
