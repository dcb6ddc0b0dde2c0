#include "thermovis/training/config.hpp"

#include <cmath>
#include <string>

#include "thermovis/core/error.hpp"

namespace thermovis {

void TrainConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, "train config: " + msg); };
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(learning_rate)) fail("learning_rate must be positive");
    if (batch_size < 1) fail("batch_size must be at least 1");
    if (micro_batch < 0) fail("micro_batch must not be negative");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("Adam betas must lie in [0, 1)");
    if (!positive(epsilon)) fail("epsilon must be positive");
    if (plateau_patience < 1) fail("plateau_patience must be at least 1");
    if (!(min_improvement >= 0.0 && min_improvement < 1.0)) fail("min_improvement must lie in [0, 1)");
    if (max_epochs < 1) fail("max_epochs must be at least 1");
    if (!positive(early_stop_lr)) fail("early_stop_lr must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) fail("validation_fraction must lie in (0, 1)");
}

nlohmann::json TrainConfig::to_json() const {
    return {{"learning_rate", learning_rate},
            {"batch_size", batch_size},
            {"micro_batch", micro_batch},
            {"beta1", beta1},
            {"beta2", beta2},
            {"epsilon", epsilon},
            {"plateau_patience", plateau_patience},
            {"min_improvement", min_improvement},
            {"max_epochs", max_epochs},
            {"early_stop_lr", early_stop_lr},
            {"validation_fraction", validation_fraction},
            {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig c;
    try {
        c.learning_rate = j.value("learning_rate", c.learning_rate);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.micro_batch = j.value("micro_batch", c.micro_batch);
        c.beta1 = j.value("beta1", c.beta1);
        c.beta2 = j.value("beta2", c.beta2);
        c.epsilon = j.value("epsilon", c.epsilon);
        c.plateau_patience = j.value("plateau_patience", c.plateau_patience);
        c.min_improvement = j.value("min_improvement", c.min_improvement);
        c.max_epochs = j.value("max_epochs", c.max_epochs);
        c.early_stop_lr = j.value("early_stop_lr", c.early_stop_lr);
        c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config_error, std::string("train config: ") + e.what());
    }
    return c;
}

}  // namespace thermovis
