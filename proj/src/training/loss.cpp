#include "thermovis/training/loss.hpp"

#include "thermovis/core/error.hpp"

namespace thermovis {
namespace {

template <typename T>
void check(const Tensor<T>& pred, const Tensor<T>& target) {
    if (pred.shape != target.shape) {
        throw Error(ErrorCode::shape_mismatch,
                    "mse_loss: prediction " + pred.shape.str() + " vs target " + target.shape.str());
    }
    if (pred.data.empty()) throw Error(ErrorCode::invalid_argument, "mse_loss: empty tensors");
}

}  // namespace

template <typename T>
double mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
    check(pred, target);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(pred.data.size());
}

template <typename T>
Tensor<T> mse_gradient(const Tensor<T>& pred, const Tensor<T>& target, double scale) {
    check(pred, target);
    Tensor<T> g(pred.shape);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        g.data[i] = static_cast<T>(2.0 * scale *
                                   (static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i])));
    }
    return g;
}

template double mse_loss(const Tensor<float>&, const Tensor<float>&);
template double mse_loss(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> mse_gradient(const Tensor<float>&, const Tensor<float>&, double);
template Tensor<double> mse_gradient(const Tensor<double>&, const Tensor<double>&, double);

}  // namespace thermovis
