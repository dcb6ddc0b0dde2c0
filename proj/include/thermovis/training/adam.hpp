#pragma once

#include <cstdint>
#include <vector>

#include "thermovis/model/layers.hpp"

namespace thermovis {

struct AdamState {
    std::uint64_t step = 0;
    std::vector<std::vector<float>> m, v;  // one entry per parameter tensor

    bool operator==(const AdamState&) const = default;
};

/// Bias-corrected Adam:
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
///   theta -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
class Adam {
public:
    Adam(std::vector<Param<float>*> params, double beta1, double beta2, double epsilon);

    void step(double learning_rate);

    const AdamState& state() const { return state_; }
    /// Throws ErrorCode::shape_mismatch if `s` does not fit the parameters.
    void set_state(AdamState s);

private:
    std::vector<Param<float>*> params_;
    double beta1_, beta2_, eps_;
    AdamState state_;
};

}  // namespace thermovis
