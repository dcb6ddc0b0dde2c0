#pragma once

#include "thermovis/model/tensor.hpp"

namespace thermovis {

/// Mean of squared differences over every element.
template <typename T>
double mse_loss(const Tensor<T>& pred, const Tensor<T>& target);

/// d(sum of squared differences)/d(pred) * scale, i.e. 2 (pred - target) * scale.
template <typename T>
Tensor<T> mse_gradient(const Tensor<T>& pred, const Tensor<T>& target, double scale);

}  // namespace thermovis
