#include "thermovis/model/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "thermovis/core/error.hpp"
#include "thermovis/model/blas.hpp"

namespace thermovis {

namespace {

std::size_t product(const std::vector<int>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1},
                           [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
}

template <typename T>
int total_channels(const Inputs<T>& inputs) {
    int c = 0;
    for (const auto* in : inputs) c += in->shape.c;
    return c;
}

// Unfolds image n of the (virtually concatenated) inputs into a
// [channels * k * k, h * w] matrix; taps outside the image read zero.
template <typename T>
void im2col(const Inputs<T>& inputs, int n, int k, T* col) {
    const int h = inputs[0]->shape.h;
    const int w = inputs[0]->shape.w;
    const int pad = k / 2;
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    std::size_t row = 0;
    for (const auto* in : inputs) {
        for (int c = 0; c < in->shape.c; ++c) {
            const T* src = in->plane(n, c);
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx, ++row) {
                    T* dst = col + row * hw;
                    const int dy = ky - pad;
                    const int dx = kx - pad;
                    const int x0 = std::max(0, -dx);
                    const int x1 = std::min(w, w - dx);
                    for (int y = 0; y < h; ++y) {
                        T* d = dst + static_cast<std::size_t>(y) * w;
                        const int sy = y + dy;
                        if (sy < 0 || sy >= h || x0 >= x1) {
                            std::fill(d, d + w, T{});
                            continue;
                        }
                        const T* s = src + static_cast<std::size_t>(sy) * w;
                        std::fill(d, d + x0, T{});
                        std::copy(s + x0 + dx, s + x1 + dx, d + x0);
                        std::fill(d + x1, d + w, T{});
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: folds the column matrix back, adding into the non-null outputs.
template <typename T>
void col2im(const T* col, int n, int k, const GradOutputs<T>& outs, const Inputs<T>& shapes) {
    const int h = shapes[0]->shape.h;
    const int w = shapes[0]->shape.w;
    const int pad = k / 2;
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    std::size_t row = 0;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        Tensor<T>* out = outs[i];
        const int channels = shapes[i]->shape.c;
        if (!out) {
            row += static_cast<std::size_t>(channels) * k * k;
            continue;
        }
        for (int c = 0; c < channels; ++c) {
            T* dst = out->plane(n, c);
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx, ++row) {
                    const T* src = col + row * hw;
                    const int dy = ky - pad;
                    const int dx = kx - pad;
                    const int x0 = std::max(0, -dx);
                    const int x1 = std::min(w, w - dx);
                    for (int y = 0; y < h; ++y) {
                        const int sy = y + dy;
                        if (sy < 0 || sy >= h || x0 >= x1) continue;
                        const T* s = src + static_cast<std::size_t>(y) * w;
                        T* d = dst + static_cast<std::size_t>(sy) * w;
                        for (int x = x0; x < x1; ++x) d[x + dx] += s[x];
                    }
                }
            }
        }
    }
}

template <typename T>
void check_inputs(const Inputs<T>& inputs, int expected_channels, const std::string& name) {
    if (inputs.empty()) throw Error(ErrorCode::shape_mismatch, name + ": no inputs");
    const Shape& s0 = inputs[0]->shape;
    for (const auto* in : inputs) {
        if (in->shape.n != s0.n || in->shape.h != s0.h || in->shape.w != s0.w) {
            throw Error(ErrorCode::shape_mismatch, name + ": concatenated inputs disagree in shape");
        }
    }
    if (total_channels(inputs) != expected_channels) {
        throw Error(ErrorCode::shape_mismatch,
                    name + ": expected " + std::to_string(expected_channels) + " input channels, got " +
                        std::to_string(total_channels(inputs)));
    }
}

}  // namespace

template <typename T>
Param<T>::Param(std::string n, std::vector<int> s, bool is_trainable, T fill, int fan)
    : name(std::move(n)), shape(std::move(s)), trainable(is_trainable), fan_in(fan) {
    value.assign(product(shape), fill);
    if (trainable) grad.assign(value.size(), T{});
}

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(const std::string& name, int in_channels, int out_channels, int kernel)
    : weight(name + ".weight", {out_channels, in_channels, kernel, kernel}, true, T{},
             in_channels * kernel * kernel),
      bias(name + ".bias", {out_channels}, true),
      in_(in_channels),
      out_(out_channels),
      k_(kernel) {}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Inputs<T>& inputs) const {
    check_inputs(inputs, in_, weight.name);
    const Shape& s = inputs[0]->shape;
    const int hw = s.h * s.w;
    const int kdim = in_ * k_ * k_;
    Tensor<T> out(s.n, out_, s.h, s.w);
    const bool direct = k_ == 1 && inputs.size() == 1;
    std::vector<T> col(direct ? 0 : static_cast<std::size_t>(kdim) * hw);
    for (int n = 0; n < s.n; ++n) {
        const T* b = inputs[0]->image(n);
        if (!direct) {
            im2col(inputs, n, k_, col.data());
            b = col.data();
        }
        T* y = out.image(n);
        for (int o = 0; o < out_; ++o) {
            std::fill(y + static_cast<std::size_t>(o) * hw, y + static_cast<std::size_t>(o + 1) * hw,
                      bias.value[static_cast<std::size_t>(o)]);
        }
        gemm<T>(false, false, out_, hw, kdim, T{1}, weight.value.data(), kdim, b, hw, T{1}, y, hw);
    }
    return out;
}

template <typename T>
void Conv2d<T>::backward(const Inputs<T>& inputs, const Tensor<T>& grad_out,
                         const GradOutputs<T>& grad_inputs) {
    check_inputs(inputs, in_, weight.name);
    const Shape& s = inputs[0]->shape;
    const int hw = s.h * s.w;
    const int kdim = in_ * k_ * k_;
    const bool direct = k_ == 1 && inputs.size() == 1;
    const bool want_input_grad =
        std::any_of(grad_inputs.begin(), grad_inputs.end(), [](auto* g) { return g != nullptr; });
    std::vector<T> col(direct ? 0 : static_cast<std::size_t>(kdim) * hw);
    std::vector<T> dcol(direct || !want_input_grad ? 0 : static_cast<std::size_t>(kdim) * hw);

    for (int n = 0; n < s.n; ++n) {
        const T* dy = grad_out.image(n);
        const T* b = inputs[0]->image(n);
        if (!direct) {
            im2col(inputs, n, k_, col.data());
            b = col.data();
        }
        gemm<T>(false, true, out_, kdim, hw, T{1}, dy, hw, b, hw, T{1}, weight.grad.data(), kdim);
        for (int o = 0; o < out_; ++o) {
            const T* row = dy + static_cast<std::size_t>(o) * hw;
            bias.grad[static_cast<std::size_t>(o)] += std::accumulate(row, row + hw, T{});
        }
        if (!want_input_grad) continue;
        if (direct) {
            gemm<T>(true, false, kdim, hw, out_, T{1}, weight.value.data(), kdim, dy, hw, T{1},
                    grad_inputs[0]->image(n), hw);
        } else {
            gemm<T>(true, false, kdim, hw, out_, T{1}, weight.value.data(), kdim, dy, hw, T{0},
                    dcol.data(), hw);
            col2im(dcol.data(), n, k_, grad_inputs, inputs);
        }
    }
}

// ----------------------------------------------------------- BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(const std::string& name, int channels)
    : weight(name + ".weight", {channels}, true, T{1}),
      bias(name + ".bias", {channels}, true, T{0}),
      running_mean(name + ".running_mean", {channels}, false, T{0}),
      running_var(name + ".running_var", {channels}, false, T{1}),
      channels_(channels) {}

template <typename T>
typename BatchNorm2d<T>::Stats BatchNorm2d<T>::forward_train(const Tensor<T>& x, Tensor<T>& out) {
    const Shape& s = x.shape;
    const std::size_t hw = x.plane_size();
    const double count = static_cast<double>(s.n) * static_cast<double>(hw);
    Stats st;
    st.mean.assign(static_cast<std::size_t>(channels_), 0.0);
    st.inv_std.assign(static_cast<std::size_t>(channels_), 0.0);
    if (out.shape != s) out = Tensor<T>(s);
    for (int c = 0; c < channels_; ++c) {
        double sum = 0.0;
        for (int n = 0; n < s.n; ++n) {
            const T* p = x.plane(n, c);
            for (std::size_t i = 0; i < hw; ++i) sum += p[i];
        }
        const double mean = sum / count;
        double sq = 0.0;
        for (int n = 0; n < s.n; ++n) {
            const T* p = x.plane(n, c);
            for (std::size_t i = 0; i < hw; ++i) {
                const double d = p[i] - mean;
                sq += d * d;
            }
        }
        const double var = sq / count;
        const double inv_std = 1.0 / std::sqrt(var + kEps);
        const auto ci = static_cast<std::size_t>(c);
        st.mean[ci] = mean;
        st.inv_std[ci] = inv_std;

        const double g = weight.value[ci] * inv_std;
        const double b = bias.value[ci] - g * mean;
        for (int n = 0; n < s.n; ++n) {
            const T* p = x.plane(n, c);
            T* q = out.plane(n, c);
            for (std::size_t i = 0; i < hw; ++i) q[i] = static_cast<T>(g * p[i] + b);
        }
        const double unbiased = count > 1 ? var * count / (count - 1) : var;
        running_mean.value[ci] =
            static_cast<T>((1 - kMomentum) * running_mean.value[ci] + kMomentum * mean);
        running_var.value[ci] =
            static_cast<T>((1 - kMomentum) * running_var.value[ci] + kMomentum * unbiased);
    }
    return st;
}

template <typename T>
void BatchNorm2d<T>::forward_eval(const Tensor<T>& x, Tensor<T>& out) const {
    const Shape& s = x.shape;
    const std::size_t hw = x.plane_size();
    if (out.shape != s) out = Tensor<T>(s);
    for (int c = 0; c < channels_; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const double inv_std = 1.0 / std::sqrt(static_cast<double>(running_var.value[ci]) + kEps);
        const double g = weight.value[ci] * inv_std;
        const double b = bias.value[ci] - g * running_mean.value[ci];
        for (int n = 0; n < s.n; ++n) {
            const T* p = x.plane(n, c);
            T* q = out.plane(n, c);
            for (std::size_t i = 0; i < hw; ++i) q[i] = static_cast<T>(g * p[i] + b);
        }
    }
}

template <typename T>
void BatchNorm2d<T>::backward(const Tensor<T>& x, const Stats& st, const Tensor<T>& grad_out,
                              Tensor<T>& grad_in) {
    const Shape& s = x.shape;
    const std::size_t hw = x.plane_size();
    const double count = static_cast<double>(s.n) * static_cast<double>(hw);
    if (grad_in.shape != s) grad_in = Tensor<T>(s);
    for (int c = 0; c < channels_; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const double mean = st.mean[ci];
        const double inv_std = st.inv_std[ci];
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int n = 0; n < s.n; ++n) {
            const T* p = x.plane(n, c);
            const T* g = grad_out.plane(n, c);
            for (std::size_t i = 0; i < hw; ++i) {
                sum_dy += g[i];
                sum_dy_xhat += g[i] * (p[i] - mean) * inv_std;
            }
        }
        weight.grad[ci] += static_cast<T>(sum_dy_xhat);
        bias.grad[ci] += static_cast<T>(sum_dy);

        // dx = gamma * inv_std / M * (M dy - sum(dy) - xhat * sum(dy xhat))
        const double scale = weight.value[ci] * inv_std;
        const double mean_dy = sum_dy / count;
        const double mean_dy_xhat = sum_dy_xhat / count;
        for (int n = 0; n < s.n; ++n) {
            const T* p = x.plane(n, c);
            const T* g = grad_out.plane(n, c);
            T* d = grad_in.plane(n, c);
            for (std::size_t i = 0; i < hw; ++i) {
                const double xhat = (p[i] - mean) * inv_std;
                d[i] = static_cast<T>(scale * (g[i] - mean_dy - xhat * mean_dy_xhat));
            }
        }
    }
}

// ------------------------------------------------------------ ConvBnRelu

template <typename T>
ConvBnRelu<T>::ConvBnRelu(const std::string& prefix, const std::string& suffix, int in_channels,
                          int out_channels, int kernel)
    : conv(prefix + ".conv" + suffix, in_channels, out_channels, kernel),
      bn(prefix + ".bn" + suffix, out_channels) {}

template <typename T>
const Tensor<T>& ConvBnRelu<T>::forward_train(const Inputs<T>& inputs) {
    pre_ = conv.forward(inputs);
    stats_ = bn.forward_train(pre_, act_);
    for (T& v : act_.data) v = v > T{0} ? v : T{0};
    return act_;
}

template <typename T>
Tensor<T> ConvBnRelu<T>::forward_eval(const Inputs<T>& inputs) const {
    Tensor<T> z = conv.forward(inputs);
    bn.forward_eval(z, z);
    for (T& v : z.data) v = v > T{0} ? v : T{0};
    return z;
}

template <typename T>
void ConvBnRelu<T>::backward(const Inputs<T>& inputs, const Tensor<T>& grad_out,
                             const GradOutputs<T>& grad_inputs) {
    Tensor<T> g(grad_out.shape);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        g.data[i] = act_.data[i] > T{0} ? grad_out.data[i] : T{0};
    }
    Tensor<T> dz;
    bn.backward(pre_, stats_, g, dz);
    g.release();
    conv.backward(inputs, dz, grad_inputs);
}

template <typename T>
void ConvBnRelu<T>::release() {
    pre_.release();
    act_.release();
}

// -------------------------------------------------------------- MaxPool2

template <typename T>
const Tensor<T>& MaxPool2<T>::forward_train(const Tensor<T>& x) {
    const Shape& s = x.shape;
    in_shape_ = s;
    out_ = Tensor<T>(s.n, s.c, s.h / 2, s.w / 2);
    argmax_.assign(out_.data.size(), 0);
    const int ow = s.w / 2;
    const int oh = s.h / 2;
    std::size_t o = 0;
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const T* p = x.plane(n, c);
            for (int y = 0; y < oh; ++y) {
                for (int xx = 0; xx < ow; ++xx, ++o) {
                    const T* r0 = p + static_cast<std::size_t>(2 * y) * s.w + 2 * xx;
                    const T* r1 = r0 + s.w;
                    const T cand[4] = {r0[0], r0[1], r1[0], r1[1]};
                    std::uint8_t best = 0;
                    for (std::uint8_t k = 1; k < 4; ++k) {
                        if (cand[k] > cand[best]) best = k;
                    }
                    out_.data[o] = cand[best];
                    argmax_[o] = best;
                }
            }
        }
    }
    return out_;
}

template <typename T>
Tensor<T> MaxPool2<T>::forward_eval(const Tensor<T>& x) const {
    const Shape& s = x.shape;
    Tensor<T> out(s.n, s.c, s.h / 2, s.w / 2);
    const int ow = s.w / 2;
    const int oh = s.h / 2;
    std::size_t o = 0;
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const T* p = x.plane(n, c);
            for (int y = 0; y < oh; ++y) {
                for (int xx = 0; xx < ow; ++xx, ++o) {
                    const T* r0 = p + static_cast<std::size_t>(2 * y) * s.w + 2 * xx;
                    const T* r1 = r0 + s.w;
                    out.data[o] = std::max(std::max(r0[0], r0[1]), std::max(r1[0], r1[1]));
                }
            }
        }
    }
    return out;
}

template <typename T>
void MaxPool2<T>::backward(const Tensor<T>& grad_out, Tensor<T>& grad_in) const {
    const Shape& s = in_shape_;
    const int ow = s.w / 2;
    const int oh = s.h / 2;
    std::size_t o = 0;
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            T* p = grad_in.plane(n, c);
            for (int y = 0; y < oh; ++y) {
                for (int xx = 0; xx < ow; ++xx, ++o) {
                    const int k = argmax_[o];
                    p[static_cast<std::size_t>(2 * y + k / 2) * s.w + 2 * xx + k % 2] += grad_out.data[o];
                }
            }
        }
    }
}

template <typename T>
void MaxPool2<T>::release() {
    out_.release();
    argmax_.clear();
    argmax_.shrink_to_fit();
}

// ------------------------------------------------------------- UpConv2x2

template <typename T>
UpConv2x2<T>::UpConv2x2(const std::string& name, int in_channels, int out_channels)
    : weight(name + ".weight", {in_channels, out_channels, 2, 2}, true, T{}, in_channels),
      bias(name + ".bias", {out_channels}, true),
      in_(in_channels),
      out_(out_channels) {}

template <typename T>
Tensor<T> UpConv2x2<T>::forward(const Tensor<T>& x) const {
    const Shape& s = x.shape;
    if (s.c != in_) throw Error(ErrorCode::shape_mismatch, weight.name + ": channel mismatch");
    const int hw = s.h * s.w;
    const int rows = out_ * 4;
    Tensor<T> out(s.n, out_, 2 * s.h, 2 * s.w);
    std::vector<T> cols(static_cast<std::size_t>(rows) * hw);
    for (int n = 0; n < s.n; ++n) {
        gemm<T>(true, false, rows, hw, in_, T{1}, weight.value.data(), rows, x.image(n), hw, T{0},
                cols.data(), hw);
        for (int o = 0; o < out_; ++o) {
            T* dst = out.plane(n, o);
            const T b = bias.value[static_cast<std::size_t>(o)];
            for (int k = 0; k < 4; ++k) {
                const T* src = cols.data() + static_cast<std::size_t>(o * 4 + k) * hw;
                const int dy = k / 2, dx = k % 2;
                for (int y = 0; y < s.h; ++y) {
                    T* row = dst + static_cast<std::size_t>(2 * y + dy) * (2 * s.w) + dx;
                    const T* srow = src + static_cast<std::size_t>(y) * s.w;
                    for (int xx = 0; xx < s.w; ++xx) row[2 * xx] = srow[xx] + b;
                }
            }
        }
    }
    return out;
}

template <typename T>
void UpConv2x2<T>::backward(const Tensor<T>& x, const Tensor<T>& grad_out, Tensor<T>* grad_in) {
    const Shape& s = x.shape;
    const int hw = s.h * s.w;
    const int rows = out_ * 4;
    std::vector<T> dcols(static_cast<std::size_t>(rows) * hw);
    for (int n = 0; n < s.n; ++n) {
        for (int o = 0; o < out_; ++o) {
            const T* src = grad_out.plane(n, o);
            T bsum{};
            for (int k = 0; k < 4; ++k) {
                T* dst = dcols.data() + static_cast<std::size_t>(o * 4 + k) * hw;
                const int dy = k / 2, dx = k % 2;
                for (int y = 0; y < s.h; ++y) {
                    const T* row = src + static_cast<std::size_t>(2 * y + dy) * (2 * s.w) + dx;
                    T* drow = dst + static_cast<std::size_t>(y) * s.w;
                    for (int xx = 0; xx < s.w; ++xx) {
                        drow[xx] = row[2 * xx];
                        bsum += row[2 * xx];
                    }
                }
            }
            bias.grad[static_cast<std::size_t>(o)] += bsum;
        }
        gemm<T>(false, true, in_, rows, hw, T{1}, x.image(n), hw, dcols.data(), hw, T{1},
                weight.grad.data(), rows);
        if (grad_in) {
            gemm<T>(false, false, in_, hw, rows, T{1}, weight.value.data(), rows, dcols.data(), hw,
                    T{1}, grad_in->image(n), hw);
        }
    }
}

// -------------------------------------------------------- bilinear x2

namespace {
struct Tap {
    int i0, i1;
    double f;
};

std::vector<Tap> up2_taps(int n_in) {
    std::vector<Tap> taps(static_cast<std::size_t>(2 * n_in));
    for (int o = 0; o < 2 * n_in; ++o) {
        const double src = std::clamp((o + 0.5) * 0.5 - 0.5, 0.0, static_cast<double>(n_in - 1));
        const int i0 = static_cast<int>(std::floor(src));
        taps[static_cast<std::size_t>(o)] = {i0, std::min(i0 + 1, n_in - 1), src - i0};
    }
    return taps;
}
}  // namespace

template <typename T>
Tensor<T> bilinear_up2(const Tensor<T>& x) {
    const Shape& s = x.shape;
    Tensor<T> out(s.n, s.c, 2 * s.h, 2 * s.w);
    const auto ty = up2_taps(s.h);
    const auto tx = up2_taps(s.w);
    const int ow = 2 * s.w;
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const T* p = x.plane(n, c);
            T* q = out.plane(n, c);
            for (int y = 0; y < 2 * s.h; ++y) {
                const Tap& a = ty[static_cast<std::size_t>(y)];
                const T* r0 = p + static_cast<std::size_t>(a.i0) * s.w;
                const T* r1 = p + static_cast<std::size_t>(a.i1) * s.w;
                for (int xx = 0; xx < ow; ++xx) {
                    const Tap& b = tx[static_cast<std::size_t>(xx)];
                    const double top = (1 - b.f) * r0[b.i0] + b.f * r0[b.i1];
                    const double bot = (1 - b.f) * r1[b.i0] + b.f * r1[b.i1];
                    q[static_cast<std::size_t>(y) * ow + xx] = static_cast<T>((1 - a.f) * top + a.f * bot);
                }
            }
        }
    }
    return out;
}

template <typename T>
void bilinear_up2_backward(const Tensor<T>& grad_out, Tensor<T>& grad_in) {
    const Shape& s = grad_in.shape;
    const auto ty = up2_taps(s.h);
    const auto tx = up2_taps(s.w);
    const int ow = 2 * s.w;
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const T* g = grad_out.plane(n, c);
            T* d = grad_in.plane(n, c);
            for (int y = 0; y < 2 * s.h; ++y) {
                const Tap& a = ty[static_cast<std::size_t>(y)];
                T* r0 = d + static_cast<std::size_t>(a.i0) * s.w;
                T* r1 = d + static_cast<std::size_t>(a.i1) * s.w;
                for (int xx = 0; xx < ow; ++xx) {
                    const Tap& b = tx[static_cast<std::size_t>(xx)];
                    const double v = g[static_cast<std::size_t>(y) * ow + xx];
                    r0[b.i0] += static_cast<T>((1 - a.f) * (1 - b.f) * v);
                    r0[b.i1] += static_cast<T>((1 - a.f) * b.f * v);
                    r1[b.i0] += static_cast<T>(a.f * (1 - b.f) * v);
                    r1[b.i1] += static_cast<T>(a.f * b.f * v);
                }
            }
        }
    }
}

template struct Param<float>;
template struct Param<double>;
template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class ConvBnRelu<float>;
template class ConvBnRelu<double>;
template class MaxPool2<float>;
template class MaxPool2<double>;
template class UpConv2x2<float>;
template class UpConv2x2<double>;
template Tensor<float> bilinear_up2(const Tensor<float>&);
template Tensor<double> bilinear_up2(const Tensor<double>&);
template void bilinear_up2_backward(const Tensor<float>&, Tensor<float>&);
template void bilinear_up2_backward(const Tensor<double>&, Tensor<double>&);

}  // namespace thermovis
