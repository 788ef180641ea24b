#include "rankpref/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rankpref/seeding.hpp"

namespace rankpref {

std::vector<std::pair<Index, Index>> WithholdingPlan::removals() const {
    std::vector<std::pair<Index, Index>> out;
    out.reserve(2 * triples.size());
    for (const auto& t : triples) {
        out.emplace_back(t.user, t.item_hi);
        out.emplace_back(t.user, t.item_lo);
    }
    return out;
}

namespace {

bool same_rating(double a, double b) { return std::abs(a - b) <= 1e-9; }

std::uint64_t gap_key(const RatingGap& g) {
    return combine_seed(std::bit_cast<std::uint64_t>(g.hi), std::bit_cast<std::uint64_t>(g.lo));
}

}  // namespace

WithholdingPlan select_pairs(const SparseRatingMatrix& matrix, double r_hi, double r_lo,
                             std::uint64_t seed, std::optional<std::size_t> max_users) {
    if (!(r_hi > r_lo)) throw std::invalid_argument("withholding requires r_hi > r_lo");
    std::vector<Index> eligible;
    for (Index u = 0; u < matrix.n_users(); ++u) {
        bool has_hi = false, has_lo = false;
        for (auto k : matrix.row(u)) {
            const double r = matrix.entry(k).value;
            has_hi = has_hi || same_rating(r, r_hi);
            has_lo = has_lo || same_rating(r, r_lo);
        }
        if (has_hi && has_lo) eligible.push_back(u);
    }
    if (eligible.empty()) throw DataError("no eligible users for the requested rating pair");

    std::mt19937_64 rng(seed);
    if (max_users && *max_users < eligible.size()) {
        // Partial Fisher-Yates: the first K slots become a uniform subset.
        for (std::size_t j = 0; j < *max_users; ++j) {
            auto pick = j + uniform_index(rng, eligible.size() - j);
            std::swap(eligible[j], eligible[pick]);
        }
        eligible.resize(*max_users);
        std::sort(eligible.begin(), eligible.end());
    }

    WithholdingPlan plan{r_hi, r_lo, {}, seed, max_users};
    plan.triples.reserve(eligible.size());
    std::vector<Index> hi_items, lo_items;
    for (Index u : eligible) {
        hi_items.clear();
        lo_items.clear();
        for (auto k : matrix.row(u)) {
            const auto& e = matrix.entry(k);
            if (same_rating(e.value, r_hi)) hi_items.push_back(e.item);
            if (same_rating(e.value, r_lo)) lo_items.push_back(e.item);
        }
        const Index hi = hi_items[uniform_index(rng, hi_items.size())];
        const Index lo = lo_items[uniform_index(rng, lo_items.size())];
        plan.triples.push_back({u, hi, lo});
    }
    return plan;
}

DiscordanceReport count_discordant(std::span<const PairPrediction> predictions,
                                   const WithholdingPlan& plan) {
    if (predictions.size() != plan.triples.size())
        throw std::invalid_argument("prediction count does not match the withholding plan");
    DiscordanceReport rep;
    rep.r_hi = plan.r_hi;
    rep.r_lo = plan.r_lo;
    rep.n_pairs = plan.triples.size();
    double sq = 0.0;
    for (const auto& p : predictions) {
        if (p.skipped) {
            ++rep.skipped;
            continue;
        }
        if (std::abs(p.hi - p.lo) <= tie_tolerance)
            ++rep.ties;
        else if (p.hi < p.lo)
            ++rep.discordant;
        else
            ++rep.concordant;
        sq += (p.hi - plan.r_hi) * (p.hi - plan.r_hi) + (p.lo - plan.r_lo) * (p.lo - plan.r_lo);
    }
    const auto compared = rep.concordant + rep.discordant + rep.ties;
    if (compared > 0) {
        rep.kendall_tau = (static_cast<double>(rep.concordant) - static_cast<double>(rep.discordant)) /
                          static_cast<double>(compared);
        rep.rmse_withheld = std::sqrt(sq / (2.0 * static_cast<double>(compared)));
    } else {
        rep.rmse_withheld = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

std::vector<DiscordanceReport> ExperimentResult::reports() const {
    std::vector<DiscordanceReport> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.report);
    return out;
}

bool ExperimentResult::all_converged() const {
    return std::all_of(cells.begin(), cells.end(), [](const ExperimentCell& c) {
        return !c.balance_stats || c.balance_stats->converged;
    });
}

void validate(const ExperimentConfig& config, const RatingScale& scale) {
    if (config.methods.empty()) throw std::invalid_argument("method list is empty");
    if (config.gaps.empty()) throw std::invalid_argument("gap list is empty");
    for (const auto& g : config.gaps) {
        if (!scale.contains(g.hi) || !scale.contains(g.lo))
            throw std::invalid_argument("gap rating outside scale");
        if (!(g.hi > g.lo)) throw std::invalid_argument("gap requires r_hi > r_lo");
    }
    for (const auto& m : config.methods)
        if (m.kind == MethodKind::svd) retained_rank(m.fraction, 1, 1);
    if (config.max_pairs && *config.max_pairs == 0)
        throw std::invalid_argument("max_pairs must be positive");
}

ExperimentResult run_experiment(const SparseRatingMatrix& matrix, const ExperimentConfig& config) {
    validate(config, matrix.scale());
    ExperimentResult result;
    for (std::size_t g = 0; g < config.gaps.size(); ++g) {
        const auto gap = config.gaps[g];
        const auto gap_seed = combine_seed(config.seed, gap_key(gap));
        auto plan = select_pairs(matrix, gap.hi, gap.lo, gap_seed, config.max_pairs);
        const auto removals = plan.removals();
        const auto training = remove_entries(matrix, removals);
        result.gaps.push_back({gap, plan, training.nnz()});
        const auto& stored_plan = result.gaps.back().plan;

        for (const auto& method : config.methods) {
            auto opts = config.options;
            opts.svd.seed = combine_seed(gap_seed, hash_name(method.label()));
            auto fitted = fit_method(method, training, opts);
            const auto preds = complete_all(*fitted.model, removals);

            ExperimentCell cell;
            cell.gap_index = g;
            cell.balance_stats = fitted.balance_stats;
            cell.predictions.reserve(stored_plan.triples.size());
            for (std::size_t t = 0; t < stored_plan.triples.size(); ++t) {
                const auto& ph = preds[2 * t];
                const auto& pl = preds[2 * t + 1];
                PairPrediction p;
                p.skipped = !ph.ok() || !pl.ok();
                if (!p.skipped) {
                    p.hi = config.clamp ? clamp_to(matrix.scale(), ph.value) : ph.value;
                    p.lo = config.clamp ? clamp_to(matrix.scale(), pl.value) : pl.value;
                }
                cell.predictions.push_back(p);
            }
            cell.report = count_discordant(cell.predictions, stored_plan);
            cell.report.dataset = config.dataset_name;
            cell.report.method = method.label();
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

SparseRatingMatrix load_dataset(const ExperimentConfig& config) {
    auto m = config.format == DataFormat::movielens ? load_movielens(config.dataset)
                                                    : load_csv(config.dataset, config.csv_header);
    if (config.max_users || config.max_items)
        m = truncate(m, config.max_users.value_or(m.n_users()), config.max_items.value_or(m.n_items()));
    return m;
}

}  // namespace rankpref
