#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankpref/methods.hpp"
#include "rankpref/ratings.hpp"

namespace rankpref {

struct RatingGap {
    double hi;
    double lo;

    friend bool operator==(const RatingGap&, const RatingGap&) = default;
};

inline const std::vector<RatingGap> default_gaps{{5, 1}, {5, 2}, {5, 3}, {5, 4}};

struct WithheldTriple {
    Index user;
    Index item_hi;
    Index item_lo;

    friend bool operator==(const WithheldTriple&, const WithheldTriple&) = default;
};

/// Per-user (item rated r_hi, item rated r_lo) pairs withheld from training.
struct WithholdingPlan {
    double r_hi = 0;
    double r_lo = 0;
    std::vector<WithheldTriple> triples;  // ascending by user, one per user
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_users;  // nullopt: all eligible users

    /// The 2K cells to remove from the training matrix.
    std::vector<std::pair<Index, Index>> removals() const;
};

/// For every user with at least one item rated exactly r_hi and one rated
/// exactly r_lo, draws one of each uniformly. When max_users is smaller than
/// the eligible count, a uniform subset of users is kept. Deterministic in
/// (matrix, r_hi, r_lo, seed). Throws DataError if no user is eligible.
WithholdingPlan select_pairs(const SparseRatingMatrix& matrix, double r_hi, double r_lo,
                             std::uint64_t seed, std::optional<std::size_t> max_users = {});

/// Predicted ratings for one withheld pair. `skipped` marks pairs a method
/// declined to predict (cold start, cross component).
struct PairPrediction {
    double hi = 0;
    double lo = 0;
    bool skipped = false;
};

inline constexpr double tie_tolerance = 1e-12;

struct DiscordanceReport {
    std::string dataset;
    std::string method;
    double r_hi = 0;
    double r_lo = 0;
    std::size_t n_pairs = 0;
    std::size_t discordant = 0;
    std::size_t concordant = 0;
    std::size_t ties = 0;
    std::size_t skipped = 0;
    double kendall_tau = 0;     // 0 when no pair was comparable
    double rmse_withheld = 0;   // NaN when no pair was comparable

    friend bool operator==(const DiscordanceReport&, const DiscordanceReport&) = default;
};

/// A pair is a tie when |hi - lo| <= tie_tolerance, discordant when hi < lo,
/// concordant otherwise. Throws std::invalid_argument on length mismatch.
DiscordanceReport count_discordant(std::span<const PairPrediction> predictions,
                                   const WithholdingPlan& plan);

enum class DataFormat { movielens, csv };

struct ExperimentConfig {
    std::string dataset_name = "dataset";
    std::filesystem::path dataset;
    DataFormat format = DataFormat::movielens;
    bool csv_header = true;
    std::vector<MethodSpec> methods;
    std::vector<RatingGap> gaps = default_gaps;
    std::uint64_t seed = 42;
    std::optional<std::size_t> max_pairs;  // K per gap; nullopt = all eligible
    std::optional<std::size_t> max_users;  // dataset truncation
    std::optional<std::size_t> max_items;
    MethodOptions options;
    bool clamp = false;
    std::optional<std::filesystem::path> out_csv;
    std::optional<std::filesystem::path> out_svg;
};

/// One (method, gap) cell with everything needed to audit it.
struct ExperimentCell {
    DiscordanceReport report;
    std::vector<PairPrediction> predictions;
    std::optional<FitStats> balance_stats;
    std::size_t gap_index = 0;
};

struct GapRun {
    RatingGap gap;
    WithholdingPlan plan;
    std::size_t training_nnz = 0;
};

struct ExperimentResult {
    std::vector<GapRun> gaps;
    std::vector<ExperimentCell> cells;  // gap-major, methods in config order

    std::vector<DiscordanceReport> reports() const;
    bool all_converged() const;
};

/// Validates methods and gaps against the matrix scale; throws
/// std::invalid_argument on a bad configuration.
void validate(const ExperimentConfig& config, const RatingScale& scale);

/// Pair-withholding experiment: per gap, build a plan, remove both withheld
/// cells of every triple, fit every method on that same reduced matrix and
/// score its predictions.
ExperimentResult run_experiment(const SparseRatingMatrix& matrix, const ExperimentConfig& config);

/// Loads (and optionally truncates) the configured dataset.
SparseRatingMatrix load_dataset(const ExperimentConfig& config);

}  // namespace rankpref
