#pragma once

#include <limits>

namespace thermovis {

/// Halve-on-plateau: a validation loss counts as an improvement when it is
/// below best * (1 - min_improvement). After `patience` epochs without one the
/// rate is halved and the count restarts.
class PlateauScheduler {
public:
    struct State {
        double learning_rate = 0.0;
        double best = std::numeric_limits<double>::infinity();
        int bad_epochs = 0;

        bool operator==(const State&) const = default;
    };

    PlateauScheduler(double initial_lr, int patience, double min_improvement);

    /// Records one epoch; returns true when the loss was a new best.
    bool observe(double validation_loss);

    double learning_rate() const { return state_.learning_rate; }
    const State& state() const { return state_; }
    void set_state(const State& s) { state_ = s; }

private:
    State state_;
    int patience_;
    double min_improvement_;
};

}  // namespace thermovis
