#include "thermovis/training/schedule.hpp"

namespace thermovis {

PlateauScheduler::PlateauScheduler(double initial_lr, int patience, double min_improvement)
    : patience_(patience), min_improvement_(min_improvement) {
    state_.learning_rate = initial_lr;
}

bool PlateauScheduler::observe(double validation_loss) {
    if (validation_loss < state_.best * (1.0 - min_improvement_)) {
        state_.best = validation_loss;
        state_.bad_epochs = 0;
        return true;
    }
    if (++state_.bad_epochs >= patience_) {
        state_.learning_rate *= 0.5;
        state_.bad_epochs = 0;
    }
    return false;
}

}  // namespace thermovis
