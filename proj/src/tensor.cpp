#include "jcnf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jcnf {

bool Tensor::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

void GradTape::add(const GradTape& o) {
    if (kernels.size() != o.kernels.size() || biases.size() != o.biases.size())
        throw std::invalid_argument("GradTape::add: shape mismatch");
    for (std::size_t i = 0; i < kernels.size(); ++i) kernels[i] += o.kernels[i];
    for (std::size_t i = 0; i < biases.size(); ++i) biases[i] += o.biases[i];
}

void GradTape::scale(double s) {
    for (double& v : kernels) v *= s;
    for (double& v : biases) v *= s;
}

void GradTape::clear() {
    std::fill(kernels.begin(), kernels.end(), 0.0);
    std::fill(biases.begin(), biases.end(), 0.0);
}

int conv_out_extent(int in_extent, int kernel, int stride, Padding padding) {
    if (padding == Padding::Same)
        return (in_extent + stride - 1) / stride;
    return (in_extent - kernel) / stride + 1;
}

namespace {

// Total zero padding on one axis for "same" output size.
int same_pad_total(int in_extent, int kernel, int stride) {
    int out = (in_extent + stride - 1) / stride;
    return std::max(0, (out - 1) * stride + kernel - in_extent);
}

void check_conv_args(const Tensor& input, const LayerParams& params, int stride,
                     Padding padding) {
    if (input.channels != params.in_channels)
        throw std::invalid_argument("conv2d: input has " +
                                    std::to_string(input.channels) +
                                    " channels but kernel expects " +
                                    std::to_string(params.in_channels));
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (padding == Padding::Valid &&
        (input.height < params.kernel_h || input.width < params.kernel_w))
        throw std::invalid_argument("conv2d: kernel " +
                                    std::to_string(params.kernel_h) + "x" +
                                    std::to_string(params.kernel_w) +
                                    " larger than input " + input.shape_str());
}

} // namespace

Tensor conv2d(const Tensor& input, const LayerParams& params, int stride,
              Padding padding) {
    check_conv_args(input, params, stride, padding);
    const int H = input.height, W = input.width, IC = input.channels;
    const int OC = params.out_channels, KH = params.kernel_h, KW = params.kernel_w;
    const int OH = conv_out_extent(H, KH, stride, padding);
    const int OW = conv_out_extent(W, KW, stride, padding);
    const int pad_top = padding == Padding::Same ? same_pad_total(H, KH, stride) / 2 : 0;
    const int pad_left = padding == Padding::Same ? same_pad_total(W, KW, stride) / 2 : 0;

    // Kernels transposed to (ky, kx, ic, oc) so the inner oc loop is contiguous.
    std::vector<double> kt(static_cast<std::size_t>(KH) * KW * IC * OC);
    for (int oc = 0; oc < OC; ++oc)
        for (int ic = 0; ic < IC; ++ic)
            for (int ky = 0; ky < KH; ++ky)
                for (int kx = 0; kx < KW; ++kx)
                    kt[((static_cast<std::size_t>(ky) * KW + kx) * IC + ic) * OC + oc] =
                        params.kernel(oc, ic, ky, kx);

    Tensor out(OH, OW, OC);
#pragma omp parallel for schedule(static)
    for (int oy = 0; oy < OH; ++oy) {
        std::vector<double> acc(OC);
        for (int ox = 0; ox < OW; ++ox) {
            for (int oc = 0; oc < OC; ++oc) acc[oc] = params.biases[oc];
            const int iy0 = oy * stride - pad_top;
            const int ix0 = ox * stride - pad_left;
            for (int ky = 0; ky < KH; ++ky) {
                const int iy = iy0 + ky;
                if (iy < 0 || iy >= H) continue;
                for (int kx = 0; kx < KW; ++kx) {
                    const int ix = ix0 + kx;
                    if (ix < 0 || ix >= W) continue;
                    const double* in_px = &input.data[(static_cast<std::size_t>(iy) * W + ix) * IC];
                    const double* krow = &kt[(static_cast<std::size_t>(ky) * KW + kx) * IC * OC];
                    for (int ic = 0; ic < IC; ++ic) {
                        const double v = in_px[ic];
                        const double* kv = krow + static_cast<std::size_t>(ic) * OC;
                        for (int oc = 0; oc < OC; ++oc) acc[oc] += v * kv[oc];
                    }
                }
            }
            double* out_px = &out.data[(static_cast<std::size_t>(oy) * OW + ox) * OC];
            for (int oc = 0; oc < OC; ++oc) out_px[oc] = acc[oc];
        }
    }
    return out;
}

ConvBackwardResult conv2d_backward(const Tensor& input, const LayerParams& params,
                                   int stride, Padding padding,
                                   const Tensor& upstream_grad) {
    check_conv_args(input, params, stride, padding);
    const int H = input.height, W = input.width, IC = input.channels;
    const int OC = params.out_channels, KH = params.kernel_h, KW = params.kernel_w;
    const int OH = conv_out_extent(H, KH, stride, padding);
    const int OW = conv_out_extent(W, KW, stride, padding);
    if (upstream_grad.height != OH || upstream_grad.width != OW ||
        upstream_grad.channels != OC)
        throw std::invalid_argument("conv2d_backward: upstream grad " +
                                    upstream_grad.shape_str() + ", expected " +
                                    std::to_string(OH) + "x" + std::to_string(OW) +
                                    "x" + std::to_string(OC));
    const int pad_top = padding == Padding::Same ? same_pad_total(H, KH, stride) / 2 : 0;
    const int pad_left = padding == Padding::Same ? same_pad_total(W, KW, stride) / 2 : 0;

    ConvBackwardResult res{Tensor(H, W, IC), GradTape(params)};
    for (int oy = 0; oy < OH; ++oy) {
        for (int ox = 0; ox < OW; ++ox) {
            const double* g_px = &upstream_grad.data[(static_cast<std::size_t>(oy) * OW + ox) * OC];
            const int iy0 = oy * stride - pad_top;
            const int ix0 = ox * stride - pad_left;
            for (int oc = 0; oc < OC; ++oc) {
                const double g = g_px[oc];
                if (g == 0.0) continue;
                res.param_grad.biases[oc] += g;
                for (int ky = 0; ky < KH; ++ky) {
                    const int iy = iy0 + ky;
                    if (iy < 0 || iy >= H) continue;
                    for (int kx = 0; kx < KW; ++kx) {
                        const int ix = ix0 + kx;
                        if (ix < 0 || ix >= W) continue;
                        const double* in_px = &input.data[(static_cast<std::size_t>(iy) * W + ix) * IC];
                        double* ig_px = &res.input_grad.data[(static_cast<std::size_t>(iy) * W + ix) * IC];
                        const std::size_t kbase =
                            ((static_cast<std::size_t>(oc) * IC) * KH + ky) * KW + kx;
                        for (int ic = 0; ic < IC; ++ic) {
                            const std::size_t ki = kbase + static_cast<std::size_t>(ic) * KH * KW;
                            res.param_grad.kernels[ki] += g * in_px[ic];
                            ig_px[ic] += g * params.kernels[ki];
                        }
                    }
                }
            }
        }
    }
    return res;
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& upstream_grad) {
    if (!input.same_shape(upstream_grad))
        throw std::invalid_argument("relu_backward: shape mismatch");
    Tensor out(input.height, input.width, input.channels);
    for (std::size_t i = 0; i < input.data.size(); ++i)
        out.data[i] = input.data[i] > 0.0 ? upstream_grad.data[i] : 0.0;
    return out;
}

Tensor maxpool(const Tensor& input, int window, int stride) {
    if (window < 1 || stride < 1)
        throw std::invalid_argument("maxpool: window and stride must be >= 1");
    if (window > input.height || window > input.width)
        throw std::invalid_argument("maxpool: window " + std::to_string(window) +
                                    " larger than input " + input.shape_str());
    const int OH = (input.height - window) / stride + 1;
    const int OW = (input.width - window) / stride + 1;
    Tensor out(OH, OW, input.channels);
    for (int oy = 0; oy < OH; ++oy)
        for (int ox = 0; ox < OW; ++ox)
            for (int c = 0; c < input.channels; ++c) {
                double m = -std::numeric_limits<double>::infinity();
                for (int ky = 0; ky < window; ++ky)
                    for (int kx = 0; kx < window; ++kx)
                        m = std::max(m, input.at(oy * stride + ky, ox * stride + kx, c));
                out.at(oy, ox, c) = m;
            }
    return out;
}

Tensor maxpool_backward(const Tensor& input, int window, int stride,
                        const Tensor& upstream_grad) {
    const int OH = (input.height - window) / stride + 1;
    const int OW = (input.width - window) / stride + 1;
    if (upstream_grad.height != OH || upstream_grad.width != OW ||
        upstream_grad.channels != input.channels)
        throw std::invalid_argument("maxpool_backward: shape mismatch");
    Tensor grad(input.height, input.width, input.channels);
    for (int oy = 0; oy < OH; ++oy)
        for (int ox = 0; ox < OW; ++ox)
            for (int c = 0; c < input.channels; ++c) {
                // First maximum wins on ties.
                int by = 0, bx = 0;
                double m = -std::numeric_limits<double>::infinity();
                for (int ky = 0; ky < window; ++ky)
                    for (int kx = 0; kx < window; ++kx) {
                        double v = input.at(oy * stride + ky, ox * stride + kx, c);
                        if (v > m) { m = v; by = ky; bx = kx; }
                    }
                grad.at(oy * stride + by, ox * stride + bx, c) +=
                    upstream_grad.at(oy, ox, c);
            }
    return grad;
}

Tensor fully_connected(const Tensor& input, const LayerParams& params) {
    const int in_dim = input.height * input.width * input.channels;
    if (params.in_channels != in_dim || params.kernel_h != 1 || params.kernel_w != 1)
        throw std::invalid_argument("fully_connected: params expect input dim " +
                                    std::to_string(params.in_channels) + ", got " +
                                    std::to_string(in_dim));
    Tensor out(1, 1, params.out_channels);
    for (int o = 0; o < params.out_channels; ++o) {
        double acc = params.biases[o];
        const double* w = &params.kernels[static_cast<std::size_t>(o) * in_dim];
        for (int i = 0; i < in_dim; ++i) acc += w[i] * input.data[i];
        out.data[o] = acc;
    }
    return out;
}

ConvBackwardResult fully_connected_backward(const Tensor& input,
                                            const LayerParams& params,
                                            const Tensor& upstream_grad) {
    const int in_dim = input.height * input.width * input.channels;
    if (params.in_channels != in_dim)
        throw std::invalid_argument("fully_connected_backward: dim mismatch");
    if (static_cast<int>(upstream_grad.size()) != params.out_channels)
        throw std::invalid_argument("fully_connected_backward: upstream size mismatch");
    ConvBackwardResult res{Tensor(input.height, input.width, input.channels),
                           GradTape(params)};
    for (int o = 0; o < params.out_channels; ++o) {
        const double g = upstream_grad.data[o];
        res.param_grad.biases[o] = g;
        const double* w = &params.kernels[static_cast<std::size_t>(o) * in_dim];
        double* kg = &res.param_grad.kernels[static_cast<std::size_t>(o) * in_dim];
        for (int i = 0; i < in_dim; ++i) {
            kg[i] = g * input.data[i];
            res.input_grad.data[i] += g * w[i];
        }
    }
    return res;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("concat_channels: spatial dims differ: " +
                                    a.shape_str() + " vs " + b.shape_str());
    Tensor out(a.height, a.width, a.channels + b.channels);
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            for (int c = 0; c < a.channels; ++c) out.at(y, x, c) = a.at(y, x, c);
            for (int c = 0; c < b.channels; ++c)
                out.at(y, x, a.channels + c) = b.at(y, x, c);
        }
    return out;
}

void concat_channels_backward(const Tensor& upstream_grad, int channels_a,
                              Tensor& grad_a, Tensor& grad_b) {
    const int cb = upstream_grad.channels - channels_a;
    if (cb < 0)
        throw std::invalid_argument("concat_channels_backward: channels_a too large");
    grad_a = Tensor(upstream_grad.height, upstream_grad.width, channels_a);
    grad_b = Tensor(upstream_grad.height, upstream_grad.width, cb);
    for (int y = 0; y < upstream_grad.height; ++y)
        for (int x = 0; x < upstream_grad.width; ++x) {
            for (int c = 0; c < channels_a; ++c)
                grad_a.at(y, x, c) = upstream_grad.at(y, x, c);
            for (int c = 0; c < cb; ++c)
                grad_b.at(y, x, c) = upstream_grad.at(y, x, channels_a + c);
        }
}

Tensor crop_center(const Tensor& input, int crop_h, int crop_w) {
    if (crop_h > input.height || crop_w > input.width)
        throw std::invalid_argument("crop_center: crop larger than input");
    if ((input.height - crop_h) % 2 != 0 || (input.width - crop_w) % 2 != 0)
        throw std::invalid_argument("crop_center: asymmetric crop");
    const int oy = (input.height - crop_h) / 2;
    const int ox = (input.width - crop_w) / 2;
    Tensor out(crop_h, crop_w, input.channels);
    for (int y = 0; y < crop_h; ++y)
        for (int x = 0; x < crop_w; ++x)
            for (int c = 0; c < input.channels; ++c)
                out.at(y, x, c) = input.at(oy + y, ox + x, c);
    return out;
}

Tensor crop_center_backward(const Tensor& upstream_grad, int full_h, int full_w) {
    const int oy = (full_h - upstream_grad.height) / 2;
    const int ox = (full_w - upstream_grad.width) / 2;
    Tensor grad(full_h, full_w, upstream_grad.channels);
    for (int y = 0; y < upstream_grad.height; ++y)
        for (int x = 0; x < upstream_grad.width; ++x)
            for (int c = 0; c < upstream_grad.channels; ++c)
                grad.at(oy + y, ox + x, c) = upstream_grad.at(y, x, c);
    return grad;
}

void sgd_step(LayerParams& params, const GradTape& grads, double lr) {
    if (grads.kernels.size() != params.kernels.size() ||
        grads.biases.size() != params.biases.size())
        throw std::invalid_argument("sgd_step: grad/param shape mismatch");
    for (std::size_t i = 0; i < params.kernels.size(); ++i)
        params.kernels[i] -= lr * grads.kernels[i];
    for (std::size_t i = 0; i < params.biases.size(); ++i)
        params.biases[i] -= lr * grads.biases[i];
}

} // namespace jcnf
