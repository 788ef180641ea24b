#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rankpref/ratings.hpp"

namespace rankpref {

enum class PredictStatus { ok, cold_start, cross_component };

const char* to_string(PredictStatus s) noexcept;

struct Prediction {
    double value = 0.0;
    PredictStatus status = PredictStatus::ok;

    bool ok() const noexcept { return status == PredictStatus::ok; }
};

class PredictionError : public std::runtime_error {
public:
    PredictionError(PredictStatus kind, Index u, Index i);
    PredictStatus kind() const noexcept { return kind_; }

private:
    PredictStatus kind_;
};

/// A fitted completion model. Implementations are immutable after fitting,
/// so concurrent calls to try_predict are safe.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual std::size_t n_users() const noexcept = 0;
    virtual std::size_t n_items() const noexcept = 0;

    /// Non-throwing prediction; callers must check `status`.
    virtual Prediction try_predict(Index u, Index i) const = 0;

    /// Throws std::out_of_range for bad indices and PredictionError when the
    /// model declines to predict.
    double predict(Index u, Index i) const;
};

/// Batch prediction for a list of cells. Declined cells keep their status
/// flag; the rest are filled in.
std::vector<Prediction> complete_all(const Predictor& model,
                                     std::span<const std::pair<Index, Index>> cells);

inline double clamp_to(const RatingScale& scale, double x) noexcept {
    return x < scale.min_rating ? scale.min_rating : (x > scale.max_rating ? scale.max_rating : x);
}

}  // namespace rankpref
