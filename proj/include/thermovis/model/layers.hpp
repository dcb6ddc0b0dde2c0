#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermovis/model/tensor.hpp"

namespace thermovis {

template <typename T>
struct Param {
    std::string name;
    std::vector<int> shape;
    std::vector<T> value;
    std::vector<T> grad;  // empty for non-trainable state
    bool trainable = true;
    int fan_in = 0;  // > 0: He-uniform initialised weight

    Param() = default;
    Param(std::string n, std::vector<int> s, bool is_trainable, T fill = T{}, int fan = 0);

    std::size_t numel() const { return value.size(); }
};

template <typename T>
using Inputs = std::vector<const Tensor<T>*>;
template <typename T>
using GradOutputs = std::vector<Tensor<T>*>;

/// Stride-1 "same" convolution with zero padding. Several inputs are read as
/// one channel-wise concatenation, in the order given.
template <typename T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(const std::string& name, int in_channels, int out_channels, int kernel);

    Tensor<T> forward(const Inputs<T>& inputs) const;
    /// Accumulates parameter gradients; adds input gradients into the
    /// non-null entries of `grad_inputs` (pre-sized like the inputs).
    void backward(const Inputs<T>& inputs, const Tensor<T>& grad_out,
                  const GradOutputs<T>& grad_inputs);

    int in_channels() const { return in_; }
    int out_channels() const { return out_; }

    Param<T> weight;  // [out, in, k, k]
    Param<T> bias;    // [out]

private:
    int in_ = 0, out_ = 0, k_ = 1;
};

template <typename T>
class BatchNorm2d {
public:
    static constexpr double kEps = 1e-5;
    static constexpr double kMomentum = 0.1;

    BatchNorm2d() = default;
    BatchNorm2d(const std::string& name, int channels);

    struct Stats {
        std::vector<double> mean, inv_std;
    };

    /// Normalizes with batch statistics and updates the running averages.
    Stats forward_train(const Tensor<T>& x, Tensor<T>& out);
    void forward_eval(const Tensor<T>& x, Tensor<T>& out) const;
    void backward(const Tensor<T>& x, const Stats& stats, const Tensor<T>& grad_out, Tensor<T>& grad_in);

    Param<T> weight, bias, running_mean, running_var;

private:
    int channels_ = 0;
};

/// conv -> batch norm -> ReLU. Training mode keeps the pre-norm and
/// post-ReLU activations for the backward pass.
template <typename T>
class ConvBnRelu {
public:
    ConvBnRelu() = default;
    ConvBnRelu(const std::string& prefix, const std::string& suffix, int in_channels, int out_channels,
               int kernel);

    const Tensor<T>& forward_train(const Inputs<T>& inputs);
    Tensor<T> forward_eval(const Inputs<T>& inputs) const;
    void backward(const Inputs<T>& inputs, const Tensor<T>& grad_out, const GradOutputs<T>& grad_inputs);

    const Tensor<T>& output() const { return act_; }
    void release();

    Conv2d<T> conv;
    BatchNorm2d<T> bn;

private:
    Tensor<T> pre_;  // conv output
    Tensor<T> act_;  // ReLU output
    typename BatchNorm2d<T>::Stats stats_;
};

/// 2x2 max pooling, stride 2.
template <typename T>
class MaxPool2 {
public:
    const Tensor<T>& forward_train(const Tensor<T>& x);
    Tensor<T> forward_eval(const Tensor<T>& x) const;
    /// Adds the routed gradient into grad_in.
    void backward(const Tensor<T>& grad_out, Tensor<T>& grad_in) const;

    const Tensor<T>& output() const { return out_; }
    void release();

private:
    Tensor<T> out_;
    std::vector<std::uint8_t> argmax_;
    Shape in_shape_;
};

/// Learned 2x2 stride-2 transposed convolution (doubles the resolution).
template <typename T>
class UpConv2x2 {
public:
    UpConv2x2() = default;
    UpConv2x2(const std::string& name, int in_channels, int out_channels);

    Tensor<T> forward(const Tensor<T>& x) const;
    void backward(const Tensor<T>& x, const Tensor<T>& grad_out, Tensor<T>* grad_in);

    Param<T> weight;  // [in, out, 2, 2]
    Param<T> bias;    // [out]

private:
    int in_ = 0, out_ = 0;
};

/// x2 bilinear upsampling with half-pixel centres (align_corners = false).
template <typename T>
Tensor<T> bilinear_up2(const Tensor<T>& x);
/// Adjoint of bilinear_up2; adds into grad_in.
template <typename T>
void bilinear_up2_backward(const Tensor<T>& grad_out, Tensor<T>& grad_in);

}  // namespace thermovis
