#include "rankpref/predictor.hpp"

namespace rankpref {

const char* to_string(PredictStatus s) noexcept {
    switch (s) {
        case PredictStatus::ok: return "ok";
        case PredictStatus::cold_start: return "ColdStart";
        case PredictStatus::cross_component: return "CrossComponent";
    }
    return "unknown";
}

PredictionError::PredictionError(PredictStatus kind, Index u, Index i)
    : std::runtime_error(std::string(to_string(kind)) + ": no prediction for (user " +
                         std::to_string(u) + ", item " + std::to_string(i) + ")"),
      kind_(kind) {}

double Predictor::predict(Index u, Index i) const {
    if (u >= n_users() || i >= n_items()) throw std::out_of_range("prediction index out of range");
    auto p = try_predict(u, i);
    if (!p.ok()) throw PredictionError(p.status, u, i);
    return p.value;
}

std::vector<Prediction> complete_all(const Predictor& model,
                                     std::span<const std::pair<Index, Index>> cells) {
    std::vector<Prediction> out;
    out.reserve(cells.size());
    for (auto [u, i] : cells) {
        if (u >= model.n_users() || i >= model.n_items())
            throw std::out_of_range("prediction index out of range");
        out.push_back(model.try_predict(u, i));
    }
    return out;
}

}  // namespace rankpref
