#include "thermovis/model/unet.hpp"

#include <cmath>

#include "thermovis/core/error.hpp"
#include "thermovis/core/random.hpp"

namespace thermovis {

template <typename T>
UNet<T>::UNet(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    const int k = cfg_.conv_kernel;
    int in = cfg_.input_channels;
    for (int i = 0; i < cfg_.stages(); ++i) {
        const int width = cfg_.encoder_channels[static_cast<std::size_t>(i)];
        const std::string prefix = "enc" + std::to_string(i + 1);
        enc_.push_back(Encoder{ConvBnRelu<T>(prefix, "1", in, width, k),
                               ConvBnRelu<T>(prefix, "2", width, width, k), MaxPool2<T>{}});
        in = width;
    }
    mid1_ = ConvBnRelu<T>("bottleneck", "1", in, cfg_.bottleneck_channels, k);
    mid2_ = ConvBnRelu<T>("bottleneck", "2", cfg_.bottleneck_channels, cfg_.bottleneck_channels, k);
    in = cfg_.bottleneck_channels;
    for (int i = cfg_.stages() - 1, d = 1; i >= 0; --i, ++d) {
        const int width = cfg_.encoder_channels[static_cast<std::size_t>(i)];
        const std::string prefix = "dec" + std::to_string(d);
        Decoder dec;
        if (cfg_.decoder_variant == DecoderVariant::upconv) {
            dec.up.emplace(prefix + ".up", in, width);
        } else {
            dec.reduce.emplace(prefix + ".reduce", in, width, 1);
        }
        const int cat = cfg_.use_skip_connections ? 2 * width : width;
        dec.c1 = ConvBnRelu<T>(prefix, "1", cat, width, k);
        dec.c2 = ConvBnRelu<T>(prefix, "2", width, width, k);
        dec_.push_back(std::move(dec));
        in = width;
    }
    head_ = Conv2d<T>("head", in, cfg_.output_channels, 1);
    initialize(seed);
}

template <typename T>
void UNet<T>::initialize(std::uint64_t seed) {
    // He-uniform: U(-b, b) with b = sqrt(6 / fan_in); biases stay zero,
    // batch-norm scale one and shift zero.
    Rng rng(seed);
    for (Param<T>* p : state()) {
        if (p->fan_in <= 0) continue;
        const double bound = std::sqrt(6.0 / p->fan_in);
        for (T& v : p->value) v = static_cast<T>(rng.uniform(-bound, bound));
    }
}

template <typename T>
std::vector<Param<T>*> UNet<T>::state() {
    std::vector<Param<T>*> out;
    auto block = [&](ConvBnRelu<T>& b) {
        out.insert(out.end(), {&b.conv.weight, &b.conv.bias, &b.bn.weight, &b.bn.bias,
                               &b.bn.running_mean, &b.bn.running_var});
    };
    for (auto& e : enc_) {
        block(e.c1);
        block(e.c2);
    }
    block(mid1_);
    block(mid2_);
    for (auto& d : dec_) {
        if (d.up) out.insert(out.end(), {&d.up->weight, &d.up->bias});
        if (d.reduce) out.insert(out.end(), {&d.reduce->weight, &d.reduce->bias});
        block(d.c1);
        block(d.c2);
    }
    out.insert(out.end(), {&head_.weight, &head_.bias});
    return out;
}

template <typename T>
std::vector<const Param<T>*> UNet<T>::state() const {
    auto mutable_state = const_cast<UNet<T>*>(this)->state();
    return {mutable_state.begin(), mutable_state.end()};
}

template <typename T>
std::vector<Param<T>*> UNet<T>::parameters() {
    std::vector<Param<T>*> out;
    for (Param<T>* p : state()) {
        if (p->trainable) out.push_back(p);
    }
    return out;
}

template <typename T>
std::size_t UNet<T>::count_parameters() const {
    std::size_t total = 0;
    for (const Param<T>* p : state()) {
        if (p->trainable) total += p->numel();
    }
    return total;
}

template <typename T>
void UNet<T>::zero_grad() {
    for (Param<T>* p : parameters()) std::fill(p->grad.begin(), p->grad.end(), T{});
}

template <typename T>
void UNet<T>::check_input(const Tensor<T>& x) const {
    const Shape& s = x.shape;
    if (s.n < 1 || s.h != cfg_.input_size || s.w != cfg_.input_size) {
        throw Error(ErrorCode::shape_mismatch,
                    "model expects N x " + std::to_string(cfg_.input_channels) + " x " +
                        std::to_string(cfg_.input_size) + " x " + std::to_string(cfg_.input_size) +
                        " input, got " + s.str());
    }
    if (s.c != cfg_.input_channels) {
        throw Error(ErrorCode::shape_mismatch, "model expects " + std::to_string(cfg_.input_channels) +
                                                   " input channels, got " + std::to_string(s.c));
    }
}

template <typename T>
Tensor<T> UNet<T>::upsample(const Decoder& d, const Tensor<T>& x) const {
    if (d.up) return d.up->forward(x);
    // A 1x1 convolution commutes with bilinear interpolation (its weights
    // sum to one), so the channel reduction runs at the coarse resolution.
    return bilinear_up2(d.reduce->forward({&x}));
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& x, const Observer& observer) const {
    check_input(x);
    const Shape& s = x.shape;
    Tensor<T> out(s.n, cfg_.output_channels, s.h, s.w);
    for (int n = 0; n < s.n; ++n) {
        Tensor<T> cur(1, s.c, s.h, s.w);
        std::copy(x.image(n), x.image(n) + x.image_size(), cur.data.begin());

        std::vector<Tensor<T>> skips;
        for (std::size_t i = 0; i < enc_.size(); ++i) {
            Tensor<T> a = enc_[i].c1.forward_eval({&cur});
            Tensor<T> b = enc_[i].c2.forward_eval({&a});
            cur = enc_[i].pool.forward_eval(b);
            if (observer) observer("enc" + std::to_string(i + 1), b);
            skips.push_back(std::move(b));
        }
        {
            Tensor<T> a = mid1_.forward_eval({&cur});
            cur = mid2_.forward_eval({&a});
        }
        if (observer) observer("bottleneck", cur);
        for (std::size_t d = 0; d < dec_.size(); ++d) {
            Tensor<T> up = upsample(dec_[d], cur);
            Tensor<T>& skip = skips[skips.size() - 1 - d];
            Tensor<T> a = cfg_.use_skip_connections ? dec_[d].c1.forward_eval({&skip, &up})
                                                    : dec_[d].c1.forward_eval({&up});
            skip.release();
            cur = dec_[d].c2.forward_eval({&a});
            if (observer) observer("dec" + std::to_string(d + 1), cur);
        }
        Tensor<T> logits = head_.forward({&cur});
        T* dst = out.image(n);
        for (std::size_t i = 0; i < logits.data.size(); ++i) {
            dst[i] = static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(logits.data[i]))));
        }
    }
    if (observer) observer("output", out);
    return out;
}

template <typename T>
Tensor<T> UNet<T>::forward_train(const Tensor<T>& x) {
    check_input(x);
    train_input_ = &x;
    const Tensor<T>* cur = &x;
    for (auto& e : enc_) {
        const Tensor<T>& a = e.c1.forward_train({cur});
        const Tensor<T>& b = e.c2.forward_train({&a});
        cur = &e.pool.forward_train(b);
    }
    const Tensor<T>& m1 = mid1_.forward_train({cur});
    cur = &mid2_.forward_train({&m1});
    for (std::size_t d = 0; d < dec_.size(); ++d) {
        Decoder& dec = dec_[d];
        if (dec.up) {
            dec.upsampled = dec.up->forward(*cur);
        } else {
            dec.reduced = dec.reduce->forward({cur});
            dec.upsampled = bilinear_up2(dec.reduced);
        }
        const Tensor<T>& skip = enc_[enc_.size() - 1 - d].c2.output();
        const Tensor<T>& a = cfg_.use_skip_connections ? dec.c1.forward_train({&skip, &dec.upsampled})
                                                       : dec.c1.forward_train({&dec.upsampled});
        cur = &dec.c2.forward_train({&a});
    }
    output_ = head_.forward({cur});
    for (T& v : output_.data) v = static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
    return output_;
}

template <typename T>
void UNet<T>::backward(const Tensor<T>& grad_output) {
    if (!train_input_ || output_.shape != grad_output.shape) {
        throw Error(ErrorCode::shape_mismatch, "backward: no matching forward_train pass");
    }
    Tensor<T> g(output_.shape);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        const T y = output_.data[i];
        g.data[i] = grad_output.data[i] * y * (T{1} - y);
    }
    output_.release();

    const Tensor<T>& last = dec_.back().c2.output();
    Tensor<T> grad(last.shape);
    head_.backward({&last}, g, {&grad});
    g.release();

    // Gradients flowing into encoder outputs through the skip connections.
    std::vector<Tensor<T>> skip_grads(enc_.size());

    for (std::size_t step = 0; step < dec_.size(); ++step) {
        const std::size_t d = dec_.size() - 1 - step;
        Decoder& dec = dec_[d];
        const std::size_t e = enc_.size() - 1 - d;

        Tensor<T> ga(dec.c1.output().shape);
        dec.c2.backward({&dec.c1.output()}, grad, {&ga});
        dec.c2.release();

        Tensor<T> gup(dec.upsampled.shape);
        const Tensor<T>& skip = enc_[e].c2.output();
        if (cfg_.use_skip_connections) {
            skip_grads[e] = Tensor<T>(skip.shape);
            dec.c1.backward({&skip, &dec.upsampled}, ga, {&skip_grads[e], &gup});
        } else {
            dec.c1.backward({&dec.upsampled}, ga, {&gup});
        }
        dec.c1.release();
        ga.release();

        const Tensor<T>& prev = d == 0 ? mid2_.output() : dec_[d - 1].c2.output();
        Tensor<T> gprev(prev.shape);
        if (dec.up) {
            dec.up->backward(prev, gup, &gprev);
        } else {
            Tensor<T> gred(dec.reduced.shape);
            bilinear_up2_backward(gup, gred);
            dec.reduce->backward({&prev}, gred, {&gprev});
            dec.reduced.release();
        }
        dec.upsampled.release();
        grad = std::move(gprev);
    }

    {
        Tensor<T> g1(mid1_.output().shape);
        mid2_.backward({&mid1_.output()}, grad, {&g1});
        mid2_.release();
        const Tensor<T>& pooled = enc_.back().pool.output();
        grad = Tensor<T>(pooled.shape);
        mid1_.backward({&pooled}, g1, {&grad});
        mid1_.release();
    }

    for (std::size_t step = 0; step < enc_.size(); ++step) {
        const std::size_t i = enc_.size() - 1 - step;
        Encoder& e = enc_[i];
        Tensor<T> g2 = skip_grads[i].data.empty() ? Tensor<T>(e.c2.output().shape)
                                                  : std::move(skip_grads[i]);
        e.pool.backward(grad, g2);
        e.pool.release();

        Tensor<T> g1(e.c1.output().shape);
        e.c2.backward({&e.c1.output()}, g2, {&g1});
        e.c2.release();
        g2.release();

        if (i == 0) {
            e.c1.backward({train_input_}, g1, {nullptr});
            grad.release();
        } else {
            const Tensor<T>& input = enc_[i - 1].pool.output();
            grad = Tensor<T>(input.shape);
            e.c1.backward({&input}, g1, {&grad});
        }
        e.c1.release();
    }
    train_input_ = nullptr;
}

template class UNet<float>;
template class UNet<double>;

std::size_t count_parameters(const Model& model) { return model.count_parameters(); }

}  // namespace thermovis
