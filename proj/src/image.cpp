#include "jcnf/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jcnf {

GradientField forward_gradient(const Tensor& img) {
    if (img.height < 2 || img.width < 2)
        throw std::invalid_argument("forward_gradient: image must be at least 2x2, got " +
                                    img.shape_str());
    const int H = img.height, W = img.width, C = img.channels;
    GradientField f{Tensor(H, W, C), Tensor(H, W, C)};
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                if (x + 1 < W) f.gx.at(y, x, c) = img.at(y, x + 1, c) - img.at(y, x, c);
                if (y + 1 < H) f.gy.at(y, x, c) = img.at(y + 1, x, c) - img.at(y, x, c);
            }
    return f;
}

Tensor divergence_adjoint(const GradientField& field) {
    if (!field.gx.same_shape(field.gy))
        throw std::invalid_argument("divergence_adjoint: gx/gy shape mismatch");
    const int H = field.height(), W = field.width(), C = field.channels();
    Tensor out(H, W, C);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double v = 0.0;
                if (x >= 1) v += field.gx.at(y, x - 1, c);
                if (x <= W - 2) v -= field.gx.at(y, x, c);
                if (y >= 1) v += field.gy.at(y - 1, x, c);
                if (y <= H - 2) v -= field.gy.at(y, x, c);
                out.at(y, x, c) = v;
            }
    return out;
}

Tensor squared_magnitude_channels(const GradientField& field) {
    const int H = field.height(), W = field.width(), C = field.channels();
    Tensor out(H, W, C);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = field.gx.data[i] * field.gx.data[i] +
                      field.gy.data[i] * field.gy.data[i];
    return out;
}

Image luminance_weight(const Image& img_linear, double eps) {
    if (img_linear.domain != Domain::Linear)
        throw std::invalid_argument("luminance_weight: expects a linear-domain image");
    if (img_linear.channels() != 3)
        throw std::invalid_argument("luminance_weight: expects 3 channels, got " +
                                    std::to_string(img_linear.channels()));
    const int H = img_linear.height(), W = img_linear.width();
    Image out(H, W, 1, Domain::Linear);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            out.at(y, x, 0) = 0.299 * img_linear.at(y, x, 0) +
                              0.587 * img_linear.at(y, x, 1) +
                              0.114 * img_linear.at(y, x, 2) + eps;
    return out;
}

Tensor downsample_box2(const Tensor& img) {
    const int OH = (img.height + 1) / 2, OW = (img.width + 1) / 2;
    Tensor out(OH, OW, img.channels);
    for (int y = 0; y < OH; ++y)
        for (int x = 0; x < OW; ++x)
            for (int c = 0; c < img.channels; ++c) {
                const int y0 = 2 * y, x0 = 2 * x;
                const int y1 = std::min(y0 + 1, img.height - 1);
                const int x1 = std::min(x0 + 1, img.width - 1);
                out.at(y, x, c) = 0.25 * (img.at(y0, x0, c) + img.at(y0, x1, c) +
                                          img.at(y1, x0, c) + img.at(y1, x1, c));
            }
    return out;
}

Tensor downsample_block_mean(const Tensor& img, int block) {
    if (block < 1 || img.height % block != 0 || img.width % block != 0)
        throw std::invalid_argument("downsample_block_mean: dims " + img.shape_str() +
                                    " not divisible by block " + std::to_string(block));
    const int OH = img.height / block, OW = img.width / block;
    Tensor out(OH, OW, img.channels);
    const double norm = 1.0 / (static_cast<double>(block) * block);
    for (int y = 0; y < OH; ++y)
        for (int x = 0; x < OW; ++x)
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int dy = 0; dy < block; ++dy)
                    for (int dx = 0; dx < block; ++dx)
                        acc += img.at(y * block + dy, x * block + dx, c);
                out.at(y, x, c) = acc * norm;
            }
    return out;
}

std::vector<Image> build_pyramid(const Image& img, int levels) {
    if (levels < 1) throw std::invalid_argument("build_pyramid: levels must be >= 1");
    const int coarse_h = img.height() >> (levels - 1);
    const int coarse_w = img.width() >> (levels - 1);
    if (coarse_h < 8 || coarse_w < 8)
        throw std::invalid_argument("build_pyramid: coarsest level would be " +
                                    std::to_string(coarse_h) + "x" +
                                    std::to_string(coarse_w) + ", need at least 8x8");
    std::vector<Image> pyr(levels);
    pyr[levels - 1] = img;
    for (int l = levels - 2; l >= 0; --l)
        pyr[l] = Image(downsample_box2(pyr[l + 1].t), img.domain);
    return pyr;
}

Tensor bilinear_resize(const Tensor& img, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1)
        throw std::invalid_argument("bilinear_resize: bad target size");
    Tensor out(out_h, out_w, img.channels);
    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < img.channels; ++c) {
                const double top = (1.0 - wx) * img.at(y0, x0, c) + wx * img.at(y0, x1, c);
                const double bot = (1.0 - wx) * img.at(y1, x0, c) + wx * img.at(y1, x1, c);
                out.at(y, x, c) = (1.0 - wy) * top + wy * bot;
            }
        }
    }
    return out;
}

Image linear_to_log(const Image& img) {
    if (img.domain != Domain::Linear)
        throw std::invalid_argument("linear_to_log: image already in log domain");
    Image out = img;
    out.domain = Domain::Log;
    for (double& v : out.t.data) v = std::log(v + kLogOffset);
    return out;
}

Image log_to_linear(const Image& img) {
    if (img.domain != Domain::Log)
        throw std::invalid_argument("log_to_linear: image already linear");
    Image out = img;
    out.domain = Domain::Linear;
    for (double& v : out.t.data) v = std::exp(v) - kLogOffset;
    return out;
}

Image depth_to_log(const Image& depth_linear) {
    if (depth_linear.domain != Domain::Linear)
        throw std::invalid_argument("depth_to_log: expects linear depth");
    Image out = depth_linear;
    out.domain = Domain::Log;
    for (double& v : out.t.data) {
        if (v <= 0.0) throw std::invalid_argument("depth_to_log: nonpositive depth");
        v = std::log(v);
    }
    return out;
}

Image depth_from_log(const Image& depth_log) {
    if (depth_log.domain != Domain::Log)
        throw std::invalid_argument("depth_from_log: expects log depth");
    Image out = depth_log;
    out.domain = Domain::Linear;
    for (double& v : out.t.data) v = std::exp(v);
    return out;
}

} // namespace jcnf
