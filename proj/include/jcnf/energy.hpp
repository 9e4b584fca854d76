#pragma once

#include <vector>

#include "jcnf/image.hpp"
#include "jcnf/networks.hpp"
#include "jcnf/solver.hpp"

namespace jcnf {

struct EnergyConfig {
    double lambda_d = 1.0;
    double lambda_a = 0.1;
    double lambda_s = 0.1;
    double epsilon = 0.001;
    int levels = 3;            // pyramid depth
    int inner_iters = 3;
    double solver_tol = 1e-8;
    int solver_max_iters = 0;  // 0: 10 * unknown count

    void validate() const;
};

struct EnergyBreakdown {
    double unary_depth = 0.0;
    double unary_intrinsic = 0.0;
    double pairwise_depth = 0.0;
    double pairwise_albedo = 0.0;
    double pairwise_shading = 0.0;
    double total = 0.0;
};

// sum_p (D_p - D_pred_p)^2
double unary_depth(const Tensor& depth, const Tensor& depth_pred);

// sum_p,c (L_p (I - A - S)_pc)^2; all images log domain, L single channel.
double unary_intrinsic(const Image& img, const Image& albedo, const Image& shading,
                       const Image& lum_weight);

// sum_p || grad T_p - C_p o G_p ||^2 over 2C-channel fields (x gradients of
// each source channel first, then y gradients).
double pairwise_term(const GradientField& target_grad, const Tensor& confidence,
                     const Tensor& predicted_grad);

EnergyBreakdown evaluate_energy(const EnergyConfig& cfg, const Tensor& depth,
                                const Tensor& depth_pred, const Image& img,
                                const Image& albedo, const Image& shading,
                                const Image& lum_weight, const Tensor& conf_d,
                                const Tensor& pred_d, const Tensor& conf_a,
                                const Tensor& pred_a, const Tensor& conf_s,
                                const Tensor& pred_s);

// ---- training losses ----

// One training sample for the global depth net.
struct GlobalSample {
    Tensor input;         // S x S x 3 log image
    Tensor coarse_target; // S/16 x S/16 x 1 log depth
};

struct GlobalLossResult {
    double loss = 0.0;                 // mean over batch of per-image sums
    std::vector<GradTape> grads;       // aligned with GlobalDepthNet::param_blocks
};

GlobalLossResult loss_global_depth(const std::vector<GlobalSample>& batch,
                                   const GlobalDepthNet& net, bool compute_grads = true);

// One pairwise training sample: a 35x35 input window with concentric 19x19
// gradient targets and the ground-truth squared-magnitude stacks feeding the
// scale nets.
struct PatchSample {
    int x0 = 0, y0 = 0;   // top-left of the input window in the source image
    Tensor input_rgb;     // 35x35x3 log image
    Tensor input_coarse;  // 35x35x1 upsampled coarse depth (filled by the trainer)
    Tensor target_d;      // 19x19x2
    Tensor target_a;      // 19x19x6
    Tensor target_s;      // 19x19x6
    Tensor conf_in_d;     // 35x35x9
    Tensor conf_in_a;     // 35x35x7
    Tensor conf_in_s;     // 35x35x7
};

enum class Freeze { ScaleNets, GradNets };

struct PairwiseLossResult {
    double loss = 0.0;    // mean over batch of per-patch sums (all three tasks)
    double loss_d = 0.0, loss_a = 0.0, loss_s = 0.0;
    std::vector<GradTape> grad_net_grads;  // aligned with GradientNets blocks
    std::vector<GradTape> scale_d_grads, scale_a_grads, scale_s_grads;
};

// Evaluates the pairwise loss over a batch and backpropagates into the
// unfrozen side only; the frozen side's tapes are returned all-zero.
PairwiseLossResult loss_pairwise(const std::vector<PatchSample>& batch,
                                 const GradientNets& nets, const ScaleNet& scale_d,
                                 const ScaleNet& scale_a, const ScaleNet& scale_s,
                                 Freeze freeze, bool live_peers,
                                 bool compute_grads = true);

} // namespace jcnf
