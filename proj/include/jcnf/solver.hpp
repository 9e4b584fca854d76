#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jcnf/image.hpp"

namespace jcnf {

struct SolverError : std::runtime_error {
    double residual;
    int iterations;
    SolverError(const std::string& msg, double res, int iters)
        : std::runtime_error(msg), residual(res), iterations(iters) {}
};

// Quadratic energy over a single-channel H x W unknown u:
//   sum_j w_j .* (u - t_j)^2  +  sum_k lambda_k * ||grad u - g_k||^2
// Its normal equations (sum_j W_j + sum_k lambda_k grad^T grad) u = rhs are
// symmetric positive definite as long as some data weight is positive.
struct ScreenedPoissonSystem {
    int h = 0, w = 0;
    std::vector<std::pair<Tensor, Tensor>> data_terms;            // (weight, target)
    std::vector<std::pair<double, GradientField>> gradient_terms; // (lambda, g)

    void add_data(Tensor weight, Tensor target);
    void add_gradient(double lambda, GradientField g);
    void validate() const;

    Tensor apply(const Tensor& u) const;
    Tensor rhs() const;
    Tensor diagonal() const;
    // Energy of a candidate u under this system's quadratic.
    double energy(const Tensor& u) const;
};

using LinearOp =
    std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct CgOptions {
    double tol = 1e-8;                     // relative residual
    int max_iters = 0;                     // 0: defaults to 10 * n
    const std::vector<double>* jacobi_diag = nullptr;
    const std::vector<double>* x0 = nullptr;
    std::vector<double>* residual_trace = nullptr;
};

// Preconditioned conjugate gradients on an SPD operator. Throws SolverError
// if the relative residual has not reached tol within the iteration cap.
std::vector<double> cg_solve(const LinearOp& apply_op, const std::vector<double>& rhs,
                             const CgOptions& opts = {});

// Minimizer of
//   sum (D - D_star)^2 [+ sum (D - D_prev)^2] + lambda_d ||grad D - g||^2.
// All tensors single-channel.
Tensor solve_depth(const Tensor& d_star, const Tensor* d_prev,
                   const GradientField& guided_grad, double lambda_d,
                   double tol = 1e-8, int max_iters = 0,
                   const Tensor* warm_start = nullptr);

// Joint minimizer over (A, S), per color channel:
//   sum (L (I - A - S))^2 [+ sum (A - A_prev)^2 + (S - S_prev)^2]
//   + lambda_a ||grad A - g_a||^2 + lambda_s ||grad S - g_s||^2.
// guided_* are 2C-channel tensors (x gradients of each channel first, then
// y gradients). Without previous-level anchors the constant exchange
// A + c, S - c is a null direction; it is pinned by a rank-one gauge term
// so that sum(A) = sum(S) per channel (the energy value is unaffected).
struct IntrinsicSolveResult {
    Tensor albedo;
    Tensor shading;
};

IntrinsicSolveResult solve_intrinsic(const Tensor& img_log, const Tensor& lum_weight,
                                     const Tensor& guided_a, const Tensor& guided_s,
                                     const Tensor* a_prev, const Tensor* s_prev,
                                     double lambda_a, double lambda_s,
                                     double tol = 1e-8, int max_iters = 0,
                                     const Tensor* warm_a = nullptr,
                                     const Tensor* warm_s = nullptr);

// Coupled operator behind solve_intrinsic for one color channel; exposed so
// tests can densify and cross-check it.
struct IntrinsicChannelSystem {
    int h = 0, w = 0;
    Tensor lum_sq;          // L^2, single channel
    Tensor img_channel;     // I_c, single channel
    GradientField g_a, g_s; // single-channel guided targets
    const Tensor* a_prev = nullptr; // single channel
    const Tensor* s_prev = nullptr;
    double lambda_a = 0.0, lambda_s = 0.0;
    double gauge_weight = 0.0; // > 0 only when no anchors are present

    std::size_t size() const { return 2 * static_cast<std::size_t>(h) * w; }
    void apply(const std::vector<double>& x, std::vector<double>& out) const;
    std::vector<double> rhs() const;
    std::vector<double> diagonal() const;
};

// Split a 2C-channel gradient tensor (x gradients first) into a C-channel
// GradientField, and back.
GradientField channels_to_grad(const Tensor& t);
Tensor grad_to_channels(const GradientField& f);

} // namespace jcnf
