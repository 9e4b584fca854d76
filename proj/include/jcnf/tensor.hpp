#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcnf {

// Dense H x W x C tensor of doubles, row-major with the channel index
// fastest: data[(y * width + x) * channels + c].
struct Tensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {
        if (h < 0 || w < 0 || c < 0)
            throw std::invalid_argument("Tensor: negative dimension");
    }

    std::size_t size() const { return data.size(); }

    double& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const Tensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    std::string shape_str() const {
        return std::to_string(height) + "x" + std::to_string(width) + "x" +
               std::to_string(channels);
    }

    bool all_finite() const;
};

enum class Padding { Same, Valid };

// One convolutional (or fully-connected) parameter block.
// Kernels are stored out-channel-major: k[((oc*in_ch + ic)*kh + ky)*kw + kx].
struct LayerParams {
    int out_channels = 0;
    int in_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    std::vector<double> kernels;
    std::vector<double> biases;

    LayerParams() = default;
    LayerParams(int oc, int ic, int kh, int kw)
        : out_channels(oc), in_channels(ic), kernel_h(kh), kernel_w(kw),
          kernels(static_cast<std::size_t>(oc) * ic * kh * kw, 0.0),
          biases(static_cast<std::size_t>(oc), 0.0) {}

    double& kernel(int oc, int ic, int ky, int kx) {
        return kernels[((static_cast<std::size_t>(oc) * in_channels + ic) * kernel_h + ky) * kernel_w + kx];
    }
    double kernel(int oc, int ic, int ky, int kx) const {
        return kernels[((static_cast<std::size_t>(oc) * in_channels + ic) * kernel_h + ky) * kernel_w + kx];
    }

    std::size_t param_count() const { return kernels.size() + biases.size(); }
};

// Gradient accumulators mirroring one LayerParams block.
struct GradTape {
    std::vector<double> kernels;
    std::vector<double> biases;

    GradTape() = default;
    explicit GradTape(const LayerParams& p)
        : kernels(p.kernels.size(), 0.0), biases(p.biases.size(), 0.0) {}

    void add(const GradTape& o);
    void scale(double s);
    void clear();
};

// ---- forward ops ----

Tensor conv2d(const Tensor& input, const LayerParams& params, int stride,
              Padding padding);
Tensor relu(const Tensor& input);
Tensor maxpool(const Tensor& input, int window, int stride);
// Flattens the input and applies a dense map; params.kernel dims must be
// (out, H*W*C, 1, 1). Output is 1 x 1 x out.
Tensor fully_connected(const Tensor& input, const LayerParams& params);
Tensor concat_channels(const Tensor& a, const Tensor& b);
// Centered crop; (height - crop_h) and (width - crop_w) must be even.
Tensor crop_center(const Tensor& input, int crop_h, int crop_w);

// ---- backward ops ----
// Each takes the forward inputs plus the upstream gradient (matching the
// forward output shape) and returns gradients of a scalar loss.

struct ConvBackwardResult {
    Tensor input_grad;
    GradTape param_grad;
};

ConvBackwardResult conv2d_backward(const Tensor& input, const LayerParams& params,
                                   int stride, Padding padding,
                                   const Tensor& upstream_grad);
Tensor relu_backward(const Tensor& input, const Tensor& upstream_grad);
Tensor maxpool_backward(const Tensor& input, int window, int stride,
                        const Tensor& upstream_grad);
ConvBackwardResult fully_connected_backward(const Tensor& input,
                                            const LayerParams& params,
                                            const Tensor& upstream_grad);
void concat_channels_backward(const Tensor& upstream_grad, int channels_a,
                              Tensor& grad_a, Tensor& grad_b);
Tensor crop_center_backward(const Tensor& upstream_grad, int full_h, int full_w);

// params <- params - lr * grads
void sgd_step(LayerParams& params, const GradTape& grads, double lr);

// Output spatial size for one axis under the given padding mode.
int conv_out_extent(int in_extent, int kernel, int stride, Padding padding);

} // namespace jcnf
