#pragma once

#include <string>
#include <vector>

#include "jcnf/tensor.hpp"

namespace jcnf {

enum class Domain { Linear, Log };

// Offset used when mapping linear [0,1] values into the log domain,
// so log(0) never occurs: log_value = log(linear + kLogOffset).
constexpr double kLogOffset = 1e-4;

// H x W x C raster with a domain tag. Color images have C = 3,
// depth maps C = 1.
struct Image {
    Tensor t;
    Domain domain = Domain::Linear;

    Image() = default;
    Image(int h, int w, int c, Domain d, double fill = 0.0)
        : t(h, w, c, fill), domain(d) {}
    Image(Tensor tensor, Domain d) : t(std::move(tensor)), domain(d) {}

    int height() const { return t.height; }
    int width() const { return t.width; }
    int channels() const { return t.channels; }
    double& at(int y, int x, int c) { return t.at(y, x, c); }
    double at(int y, int x, int c) const { return t.at(y, x, c); }
};

// Forward-difference gradients of an image; gx and gy keep the source
// channel count. Last column of gx and last row of gy are zero
// (replicate/Neumann boundary).
struct GradientField {
    Tensor gx;
    Tensor gy;

    int height() const { return gx.height; }
    int width() const { return gx.width; }
    int channels() const { return gx.channels; }
};

// gx[p] = img[x+1,y] - img[x,y], gy[p] = img[x,y+1] - img[x,y].
GradientField forward_gradient(const Tensor& img);
inline GradientField forward_gradient(const Image& img) { return forward_gradient(img.t); }

// Exact adjoint (transpose) of forward_gradient.
Tensor divergence_adjoint(const GradientField& field);

// Per source channel c: out[c] = gx[c]^2 + gy[c]^2.
Tensor squared_magnitude_channels(const GradientField& field);

// L = lum(I) + eps with Rec.601 weights; input must be a linear-domain
// color image.
Image luminance_weight(const Image& img_linear, double eps);

// Levels are ordered coarse to fine; the last level is the input.
// Downsampling is a 2x2 box filter (edge rows/cols replicated when odd).
std::vector<Image> build_pyramid(const Image& img, int levels);

Tensor downsample_box2(const Tensor& img);
// Area mean over block x block cells; dims must be divisible by block.
Tensor downsample_block_mean(const Tensor& img, int block);

// Bilinear resize with pixel centers at half-integers (align-corners-false).
Tensor bilinear_resize(const Tensor& img, int out_h, int out_w);
inline Image bilinear_resize(const Image& img, int out_h, int out_w) {
    return Image(bilinear_resize(img.t, out_h, out_w), img.domain);
}

// Domain conversions. Color/albedo/shading use the kLogOffset mapping;
// depth maps (strictly positive) use a plain log.
Image linear_to_log(const Image& img);
Image log_to_linear(const Image& img);
Image depth_to_log(const Image& depth_linear);
Image depth_from_log(const Image& depth_log);

} // namespace jcnf
