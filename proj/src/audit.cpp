#include "rankpref/audit.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rankpref/harness.hpp"
#include "rankpref/seeding.hpp"

namespace rankpref {

namespace {

constexpr Index item_a = 0;
constexpr Index item_b = 1;

struct Draw {
    SparseRatingMatrix training;
    Index held_out;
};

std::optional<Draw> draw_trial(std::mt19937_64& rng) {
    const auto nu = 3 + uniform_index(rng, 6);
    const auto ni = 3 + uniform_index(rng, 6);
    const double fill = 0.5 + 0.5 * uniform_real(rng);

    std::vector<Rating> entries;
    std::vector<Index> pair_raters;
    for (Index u = 0; u < nu; ++u) {
        if (uniform_real(rng) < fill) {
            const auto rb = 1 + uniform_index(rng, 4);           // 1..4
            const auto ra = rb + 1 + uniform_index(rng, 5 - rb);  // rb+1..5
            entries.push_back({u, item_a, static_cast<double>(ra)});
            entries.push_back({u, item_b, static_cast<double>(rb)});
            pair_raters.push_back(u);
        }
        for (Index i = 2; i < ni; ++i)
            if (uniform_real(rng) < fill)
                entries.push_back({u, i, static_cast<double>(1 + uniform_index(rng, 5))});
    }
    if (pair_raters.size() < 2) return std::nullopt;
    const Index held = pair_raters[uniform_index(rng, pair_raters.size())];

    std::erase_if(entries, [&](const Rating& e) {
        return e.user == held && (e.item == item_a || e.item == item_b);
    });
    return Draw{SparseRatingMatrix(nu, ni, std::move(entries)), held};
}

}  // namespace

AuditResult audit_consensus_order(const MethodSpec& method, std::size_t trials, std::uint64_t seed,
                                  const MethodOptions& opts) {
    std::mt19937_64 rng(seed);
    AuditResult out;
    while (out.trials < trials) {
        auto draw = draw_trial(rng);
        if (!draw) {
            ++out.regenerated;
            continue;
        }
        auto local = opts;
        local.svd.seed = combine_seed(seed, out.trials + out.regenerated);
        auto fitted = fit_method(method, draw->training, local);
        const auto pa = fitted.model->try_predict(draw->held_out, item_a);
        const auto pb = fitted.model->try_predict(draw->held_out, item_b);
        if (!pa.ok() || !pb.ok()) {
            ++out.regenerated;
            continue;
        }
        ++out.trials;
        if (std::abs(pa.value - pb.value) <= tie_tolerance)
            ++out.ties;
        else if (pb.value > pa.value)
            ++out.violations;
    }
    return out;
}

}  // namespace rankpref
