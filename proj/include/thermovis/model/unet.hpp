#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "thermovis/model/config.hpp"
#include "thermovis/model/layers.hpp"
#include "thermovis/model/tensor.hpp"

namespace thermovis {

/// Visible -> thermal encoder/decoder.
///
///   encoder stage i:  [conv-bn-relu] x2 -> 2x2 max-pool
///   bottleneck:       [conv-bn-relu] x2 at bottleneck_channels
///   decoder stage i:  upsample x2 (2x2 up-conv, or 1x1 conv + bilinear)
///                     -> concat with encoder stage output -> [conv-bn-relu] x2
///   head:             1x1 conv -> sigmoid
///
/// Tensor names follow "enc1.conv1.weight", "dec2.up.bias", "head.weight"...
template <typename T>
class UNet {
public:
    using Observer = std::function<void(std::string_view, const Tensor<T>&)>;

    UNet(const ModelConfig& cfg, std::uint64_t seed);

    const ModelConfig& config() const { return cfg_; }

    /// Inference mode (batch norm uses running statistics). Each image is
    /// processed on its own, so results do not depend on the batch layout.
    Tensor<T> forward(const Tensor<T>& x, const Observer& observer = {}) const;

    /// Training mode: batch statistics, activations cached for backward().
    Tensor<T> forward_train(const Tensor<T>& x);
    /// Accumulates parameter gradients for d(loss)/d(output) and frees the
    /// activation cache. Must follow forward_train().
    void backward(const Tensor<T>& grad_output);

    void zero_grad();
    /// Trainable tensors, in canonical order.
    std::vector<Param<T>*> parameters();
    /// Every named tensor (trainable and running statistics), canonical order.
    std::vector<Param<T>*> state();
    std::vector<const Param<T>*> state() const;

    std::size_t count_parameters() const;

private:
    struct Encoder {
        ConvBnRelu<T> c1, c2;
        MaxPool2<T> pool;
    };
    struct Decoder {
        std::optional<UpConv2x2<T>> up;
        std::optional<Conv2d<T>> reduce;
        ConvBnRelu<T> c1, c2;
        Tensor<T> reduced;    // bilinear variant: 1x1 output before interpolation
        Tensor<T> upsampled;  // cached in training mode
    };

    void check_input(const Tensor<T>& x) const;
    Tensor<T> upsample(const Decoder& d, const Tensor<T>& x) const;
    void initialize(std::uint64_t seed);

    ModelConfig cfg_;
    std::vector<Encoder> enc_;
    ConvBnRelu<T> mid1_, mid2_;
    std::vector<Decoder> dec_;
    Conv2d<T> head_;

    // training cache
    const Tensor<T>* train_input_ = nullptr;
    Tensor<T> output_;
};

using Model = UNet<float>;

std::size_t count_parameters(const Model& model);

}  // namespace thermovis
