#include "thermovis/training/adam.hpp"

#include <cmath>

#include "thermovis/core/error.hpp"

namespace thermovis {

Adam::Adam(std::vector<Param<float>*> params, double beta1, double beta2, double epsilon)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    for (const Param<float>* p : params_) {
        state_.m.emplace_back(p->numel(), 0.0f);
        state_.v.emplace_back(p->numel(), 0.0f);
    }
}

void Adam::step(double learning_rate) {
    ++state_.step;
    const double t = static_cast<double>(state_.step);
    const double c1 = 1.0 - std::pow(beta1_, t);
    const double c2 = 1.0 - std::pow(beta2_, t);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Param<float>& p = *params_[i];
        std::vector<float>& m = state_.m[i];
        std::vector<float>& v = state_.v[i];
        for (std::size_t j = 0; j < p.numel(); ++j) {
            const double g = p.grad[j];
            const double mj = beta1_ * m[j] + (1.0 - beta1_) * g;
            const double vj = beta2_ * v[j] + (1.0 - beta2_) * g * g;
            m[j] = static_cast<float>(mj);
            v[j] = static_cast<float>(vj);
            p.value[j] = static_cast<float>(p.value[j] - learning_rate * (mj / c1) / (std::sqrt(vj / c2) + eps_));
        }
    }
}

void Adam::set_state(AdamState s) {
    if (s.m.size() != params_.size() || s.v.size() != params_.size()) {
        throw Error(ErrorCode::shape_mismatch, "optimizer state does not match the parameter list");
    }
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (s.m[i].size() != params_[i]->numel() || s.v[i].size() != params_[i]->numel()) {
            throw Error(ErrorCode::shape_mismatch, "optimizer state for '" + params_[i]->name + "' has the wrong size");
        }
    }
    state_ = std::move(s);
}

}  // namespace thermovis
