#include "jcnf/energy.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jcnf {

void EnergyConfig::validate() const {
    if (lambda_d < 0.0 || lambda_a < 0.0 || lambda_s < 0.0)
        throw std::invalid_argument("EnergyConfig: lambda weights must be >= 0");
    if (epsilon <= 0.0) throw std::invalid_argument("EnergyConfig: epsilon must be > 0");
    if (levels < 1) throw std::invalid_argument("EnergyConfig: levels must be >= 1");
    if (inner_iters < 1)
        throw std::invalid_argument("EnergyConfig: inner_iters must be >= 1");
    if (solver_tol <= 0.0)
        throw std::invalid_argument("EnergyConfig: solver_tol must be > 0");
}

double unary_depth(const Tensor& depth, const Tensor& depth_pred) {
    if (!depth.same_shape(depth_pred))
        throw std::invalid_argument("unary_depth: shape mismatch " + depth.shape_str() +
                                    " vs " + depth_pred.shape_str());
    double e = 0.0;
    for (std::size_t i = 0; i < depth.data.size(); ++i) {
        const double r = depth.data[i] - depth_pred.data[i];
        e += r * r;
    }
    return e;
}

double unary_intrinsic(const Image& img, const Image& albedo, const Image& shading,
                       const Image& lum_weight) {
    if (img.domain != Domain::Log || albedo.domain != Domain::Log ||
        shading.domain != Domain::Log)
        throw std::invalid_argument("unary_intrinsic: I, A, S must be log-domain");
    if (!img.t.same_shape(albedo.t) || !img.t.same_shape(shading.t))
        throw std::invalid_argument("unary_intrinsic: shape mismatch");
    if (lum_weight.channels() != 1 || lum_weight.height() != img.height() ||
        lum_weight.width() != img.width())
        throw std::invalid_argument("unary_intrinsic: luminance weight must be HxWx1");
    double e = 0.0;
    const int C = img.channels();
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double L = lum_weight.at(y, x, 0);
            for (int c = 0; c < C; ++c) {
                const double r = L * (img.at(y, x, c) - albedo.at(y, x, c) -
                                      shading.at(y, x, c));
                e += r * r;
            }
        }
    return e;
}

double pairwise_term(const GradientField& target_grad, const Tensor& confidence,
                     const Tensor& predicted_grad) {
    const Tensor target = grad_to_channels(target_grad);
    if (!target.same_shape(confidence) || !target.same_shape(predicted_grad))
        throw std::invalid_argument("pairwise_term: shape mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < target.data.size(); ++i) {
        const double r = target.data[i] - confidence.data[i] * predicted_grad.data[i];
        e += r * r;
    }
    return e;
}

EnergyBreakdown evaluate_energy(const EnergyConfig& cfg, const Tensor& depth,
                                const Tensor& depth_pred, const Image& img,
                                const Image& albedo, const Image& shading,
                                const Image& lum_weight, const Tensor& conf_d,
                                const Tensor& pred_d, const Tensor& conf_a,
                                const Tensor& pred_a, const Tensor& conf_s,
                                const Tensor& pred_s) {
    EnergyBreakdown b;
    b.unary_depth = unary_depth(depth, depth_pred);
    b.unary_intrinsic = unary_intrinsic(img, albedo, shading, lum_weight);
    b.pairwise_depth = pairwise_term(forward_gradient(depth), conf_d, pred_d);
    b.pairwise_albedo = pairwise_term(forward_gradient(albedo.t), conf_a, pred_a);
    b.pairwise_shading = pairwise_term(forward_gradient(shading.t), conf_s, pred_s);
    b.total = b.unary_depth + b.unary_intrinsic + cfg.lambda_d * b.pairwise_depth +
              cfg.lambda_a * b.pairwise_albedo + cfg.lambda_s * b.pairwise_shading;
    return b;
}

GlobalLossResult loss_global_depth(const std::vector<GlobalSample>& batch,
                                   const GlobalDepthNet& net, bool compute_grads) {
    if (batch.empty())
        throw std::invalid_argument("loss_global_depth: empty batch");
    const int s16 = net.coarse_size();
    for (const GlobalSample& s : batch) {
        if (s.input.height != net.input_size || s.input.width != net.input_size ||
            s.input.channels != 3)
            throw std::invalid_argument("loss_global_depth: input shape mismatch");
        if (s.coarse_target.height != s16 || s.coarse_target.width != s16 ||
            s.coarse_target.channels != 1)
            throw std::invalid_argument("loss_global_depth: target shape mismatch");
    }
    GlobalLossResult res;
    std::vector<double> losses(batch.size(), 0.0);
    std::vector<std::vector<GradTape>> tapes(batch.size());

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(batch.size()); ++i) {
        GlobalCache cache;
        Tensor coarse = net.forward(batch[i].input, &cache);
        Tensor grad(coarse.height, coarse.width, 1);
        double loss = 0.0;
        for (std::size_t k = 0; k < coarse.data.size(); ++k) {
            const double r = coarse.data[k] - batch[i].coarse_target.data[k];
            loss += r * r;
            grad.data[k] = 2.0 * r;
        }
        losses[i] = loss;
        if (compute_grads) tapes[i] = net.backward(cache, grad);
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double l : losses) res.loss += l;
    res.loss *= inv;
    if (compute_grads) {
        res.grads = std::move(tapes[0]);
        for (std::size_t i = 1; i < tapes.size(); ++i)
            for (std::size_t k = 0; k < res.grads.size(); ++k)
                res.grads[k].add(tapes[i][k]);
        for (auto& g : res.grads) g.scale(inv);
    }
    return res;
}

namespace {

// dL/dF for residual T - C o F is -2 C o R; symmetric for dL/dC.
Tensor residual_upstream(const Tensor& residual, const Tensor& other_factor) {
    Tensor up(residual.height, residual.width, residual.channels);
    for (std::size_t i = 0; i < up.data.size(); ++i)
        up.data[i] = -2.0 * other_factor.data[i] * residual.data[i];
    return up;
}

} // namespace

PairwiseLossResult loss_pairwise(const std::vector<PatchSample>& batch,
                                 const GradientNets& nets, const ScaleNet& scale_d,
                                 const ScaleNet& scale_a, const ScaleNet& scale_s,
                                 Freeze freeze, bool live_peers, bool compute_grads) {
    if (batch.empty()) throw std::invalid_argument("loss_pairwise: empty batch");
    const bool train_scales = freeze == Freeze::GradNets;
    if (compute_grads && train_scales &&
        (scale_d.bypass || scale_a.bypass || scale_s.bypass))
        throw std::logic_error("loss_pairwise: cannot train bypassed scale nets");

    const std::size_t n = batch.size();
    std::vector<double> ld(n), la(n), ls(n);
    std::vector<std::vector<GradTape>> net_tapes(n), sd_tapes(n), sa_tapes(n), ss_tapes(n);

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(n); ++i) {
        const PatchSample& ps = batch[i];
        const int out_h = ps.target_d.height, out_w = ps.target_d.width;

        GradNetsCache cache;
        nets.forward(ps.input_rgb, ps.input_coarse, live_peers, cache);
        const Tensor fd = crop_center(cache.out_d, out_h, out_w);
        const Tensor fa = crop_center(cache.out_a, out_h, out_w);
        const Tensor fs = crop_center(cache.out_s, out_h, out_w);

        ScaleCache cd, ca, cs;
        const bool record = compute_grads && train_scales;
        const Tensor conf_d = crop_center(
            scale_d.forward(ps.conf_in_d, record ? &cd : nullptr), out_h, out_w);
        const Tensor conf_a = crop_center(
            scale_a.forward(ps.conf_in_a, record ? &ca : nullptr), out_h, out_w);
        const Tensor conf_s = crop_center(
            scale_s.forward(ps.conf_in_s, record ? &cs : nullptr), out_h, out_w);

        auto residual = [](const Tensor& t, const Tensor& c, const Tensor& f) {
            Tensor r(t.height, t.width, t.channels);
            for (std::size_t k = 0; k < r.data.size(); ++k)
                r.data[k] = t.data[k] - c.data[k] * f.data[k];
            return r;
        };
        const Tensor rd = residual(ps.target_d, conf_d, fd);
        const Tensor ra = residual(ps.target_a, conf_a, fa);
        const Tensor rs = residual(ps.target_s, conf_s, fs);
        auto ssq = [](const Tensor& t) {
            double s = 0.0;
            for (double v : t.data) s += v * v;
            return s;
        };
        ld[i] = ssq(rd);
        la[i] = ssq(ra);
        ls[i] = ssq(rs);

        if (!compute_grads) continue;
        if (freeze == Freeze::ScaleNets) {
            const Tensor gd = crop_center_backward(residual_upstream(rd, conf_d),
                                                   cache.out_d.height, cache.out_d.width);
            const Tensor ga = crop_center_backward(residual_upstream(ra, conf_a),
                                                   cache.out_a.height, cache.out_a.width);
            const Tensor gs = crop_center_backward(residual_upstream(rs, conf_s),
                                                   cache.out_s.height, cache.out_s.width);
            net_tapes[i] = nets.backward(cache, gd, ga, gs);
        } else {
            const int full_h = ps.conf_in_d.height, full_w = ps.conf_in_d.width;
            sd_tapes[i] = scale_d.backward(
                cd, crop_center_backward(residual_upstream(rd, fd), full_h, full_w));
            sa_tapes[i] = scale_a.backward(
                ca, crop_center_backward(residual_upstream(ra, fa), full_h, full_w));
            ss_tapes[i] = scale_s.backward(
                cs, crop_center_backward(residual_upstream(rs, fs), full_h, full_w));
        }
    }

    PairwiseLossResult res;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        res.loss_d += ld[i];
        res.loss_a += la[i];
        res.loss_s += ls[i];
    }
    res.loss_d *= inv;
    res.loss_a *= inv;
    res.loss_s *= inv;
    res.loss = res.loss_d + res.loss_a + res.loss_s;

    auto zero_tapes_like = [](const std::vector<std::pair<std::string, const LayerParams*>>& blocks) {
        std::vector<GradTape> out;
        out.reserve(blocks.size());
        for (const auto& [name, p] : blocks) out.emplace_back(*p);
        return out;
    };

    if (compute_grads) {
        auto reduce = [&](std::vector<std::vector<GradTape>>& tapes,
                          std::vector<GradTape>& out) {
            for (std::size_t i = 0; i < n; ++i) {
                if (tapes[i].empty()) continue;
                if (out.empty()) {
                    out = std::move(tapes[i]);
                } else {
                    for (std::size_t k = 0; k < out.size(); ++k) out[k].add(tapes[i][k]);
                }
            }
            for (auto& g : out) g.scale(inv);
        };
        reduce(net_tapes, res.grad_net_grads);
        reduce(sd_tapes, res.scale_d_grads);
        reduce(sa_tapes, res.scale_a_grads);
        reduce(ss_tapes, res.scale_s_grads);
    }
    // Frozen (or unset) sides get explicit zero tapes.
    if (res.grad_net_grads.empty()) res.grad_net_grads = zero_tapes_like(nets.param_blocks());
    if (res.scale_d_grads.empty()) res.scale_d_grads = zero_tapes_like(scale_d.param_blocks());
    if (res.scale_a_grads.empty()) res.scale_a_grads = zero_tapes_like(scale_a.param_blocks());
    if (res.scale_s_grads.empty()) res.scale_s_grads = zero_tapes_like(scale_s.param_blocks());
    return res;
}

} // namespace jcnf
