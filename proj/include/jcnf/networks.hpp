#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jcnf/image.hpp"
#include "jcnf/rng.hpp"
#include "jcnf/tensor.hpp"

namespace jcnf {

// Final nonlinearity of the scale nets: (1 - e^(1-x)) / (1 + e^(1-x)),
// evaluated as tanh((x-1)/2). Strictly increasing, range (-1, 1), f(1) = 0.
double scale_activation(double x);
// Derivative expressed through the activation value: (1 - f^2) / 2.
double scale_activation_grad_from_value(double fx);

// Channel widths and geometry for all networks. Defaults are the desk-scale
// configuration; tests shrink them.
struct NetworkShape {
    int global_input = 64;                       // declared square input size
    int global_conv[5] = {24, 64, 96, 96, 64};
    int global_fc1 = 512;
    int grad_conv1 = 24;                         // gradient-net first conv
    int grad_mid = 16;                           // gradient-net conv2..conv4
    int scale_mid = 16;                          // scale-net conv1..conv2
};

struct ConvStage {
    LayerParams p;
    int stride = 1;
    Padding pad = Padding::Same;
};

// ---- global depth net ----
// Five convs (pool after conv1, conv2, conv5) and two FC layers; maps a
// log-domain color image at the declared input size to a coarse depth map
// at 1/16 linear scale.

struct GlobalCache;

struct GlobalDepthNet {
    int input_size = 0;
    ConvStage conv1, conv2, conv3, conv4, conv5;
    LayerParams fc1, fc2;

    static GlobalDepthNet create(const NetworkShape& shape, Rng& rng, double init_std);

    int coarse_size() const { return input_size / 16; }
    // input must be input_size x input_size x 3 (log domain).
    Tensor forward(const Tensor& input, GlobalCache* cache = nullptr) const;
    std::vector<GradTape> backward(const GlobalCache& cache,
                                   const Tensor& coarse_grad) const;

    std::vector<std::pair<std::string, LayerParams*>> param_blocks();
    std::vector<std::pair<std::string, const LayerParams*>> param_blocks() const;
};

struct GlobalCache {
    Tensor x0, z1, r1, p1, z2, r2, p2, z3, r3, z4, r4, z5, r5, p5;
    Tensor f1, rf1;
};

// Result of running the global net on an arbitrary image: the coarse map at
// 1/16 of the input's linear scale plus its full-size upsampled copy.
struct GlobalPrediction {
    Image coarse;      // log depth, ~H/16 x W/16
    Image upsampled;   // log depth, H x W
};

GlobalPrediction global_depth_forward(const Image& log_rgb, const GlobalDepthNet& net);

// ---- gradient nets ----
// Depth branch (conv1..conv5; conv1 sees RGB + upsampled coarse depth) and
// a shared intrinsic stem (conv1..conv3) with separate albedo/shading heads
// (conv4..conv5). conv2 activations are exchanged between the depth and
// intrinsic branches and concatenated before each conv3 (own block first).

struct GradNetsCache;

struct GradientNets {
    ConvStage d1, d2, d3, d4, d5;        // depth branch
    ConvStage i1, i2, i3;                // shared intrinsic stem
    ConvStage a4, a5;                    // albedo head
    ConvStage s4, s5;                    // shading head

    static GradientNets create(const NetworkShape& shape, Rng& rng, double init_std);

    // rgb: H x W x 3 log image; coarse_up: H x W x 1 upsampled coarse depth.
    // live_peers = false substitutes zero tensors for the cross-branch
    // activations (cold-start mode).
    void forward(const Tensor& rgb, const Tensor& coarse_up, bool live_peers,
                 GradNetsCache& cache) const;

    // Upstream grads may be empty tensors to skip a head.
    std::vector<GradTape> backward(const GradNetsCache& cache, const Tensor& gd,
                                   const Tensor& ga, const Tensor& gs) const;

    std::vector<std::pair<std::string, LayerParams*>> param_blocks();
    std::vector<std::pair<std::string, const LayerParams*>> param_blocks() const;
    // Indices into param_blocks() of the final conv of each branch
    // (reduced learning rate per configuration).
    static std::vector<int> final_block_indices() { return {4, 9, 11}; }
};

struct GradNetsCache {
    bool live_peers = true;
    Tensor in_d, in_i;
    Tensor zd1, rd1, zd2, rd2, cat_d, zd3, rd3, zd4, rd4, out_d;
    Tensor zi1, ri1, zi2, ri2, cat_i, zi3, ri3;
    Tensor za4, ra4, out_a;
    Tensor zs4, rs4, out_s;
};

// Joint full-image prediction of all three gradient fields.
struct GradientPrediction {
    Tensor depth;    // H x W x 2: (x, y)
    Tensor albedo;   // H x W x 6: (r_x, g_x, b_x, r_y, g_y, b_y)
    Tensor shading;  // H x W x 6
};

GradientPrediction gradient_nets_forward(const GradientNets& nets, const Tensor& rgb,
                                         const Tensor& coarse_up);

// Patch-tiled prediction: 35x35 input patches, centered 19x19 output crops,
// overlapping contributions averaged.
GradientPrediction gradient_nets_forward_tiled(const GradientNets& nets,
                                               const Tensor& rgb,
                                               const Tensor& coarse_up,
                                               int patch = 35, int out = 19);

// ---- gradient scale nets ----
// Three convs (no interior nonlinearity) followed by scale_activation.
// While `bypass` is set the net emits constant confidence 1.

struct ScaleCache;

struct ScaleNet {
    ConvStage c1, c2, c3;
    bool bypass = true;
    int in_channels = 0;
    int out_channels = 0;

    static ScaleNet create(int in_ch, int out_ch, const NetworkShape& shape, Rng& rng,
                           double init_std);

    Tensor forward(const Tensor& sqmag_stack, ScaleCache* cache = nullptr) const;
    std::vector<GradTape> backward(const ScaleCache& cache,
                                   const Tensor& upstream) const;

    std::vector<std::pair<std::string, LayerParams*>> param_blocks();
    std::vector<std::pair<std::string, const LayerParams*>> param_blocks() const;
};

struct ScaleCache {
    Tensor input, z1, z2, z3, out;
};

// Confidence inputs. Depth confidence is driven by (|grad I|^2, |grad A|^2,
// |grad S|^2); albedo by (I, D, S); shading by (I, D, A). Each block holds
// the per-channel squared gradient magnitudes.
Tensor stack_confidence_input_depth(const Tensor& sq_i, const Tensor& sq_a,
                                    const Tensor& sq_s);
Tensor stack_confidence_input_albedo(const Tensor& sq_i, const Tensor& sq_d,
                                     const Tensor& sq_s);
Tensor stack_confidence_input_shading(const Tensor& sq_i, const Tensor& sq_d,
                                      const Tensor& sq_a);

// Plain-text topology manifest: one line per layer with kernel dims,
// channels, stride, padding, and share-group id.
std::string topology_manifest(const GlobalDepthNet& global, const GradientNets& nets,
                              const ScaleNet& scale_d, const ScaleNet& scale_a,
                              const ScaleNet& scale_s);

} // namespace jcnf
