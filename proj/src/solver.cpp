#include "jcnf/solver.hpp"

#include <cmath>
#include <cstring>

namespace jcnf {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Edge count of the forward-difference stencil at (y, x): the diagonal of
// grad^T grad.
double stencil_degree(int y, int x, int h, int w) {
    double d = 0.0;
    if (x >= 1) d += 1.0;
    if (x <= w - 2) d += 1.0;
    if (y >= 1) d += 1.0;
    if (y <= h - 2) d += 1.0;
    return d;
}

} // namespace

void ScreenedPoissonSystem::add_data(Tensor weight, Tensor target) {
    if (h == 0) { h = weight.height; w = weight.width; }
    if (weight.height != h || weight.width != w || weight.channels != 1 ||
        !weight.same_shape(target))
        throw std::invalid_argument("ScreenedPoissonSystem: data term shape mismatch");
    data_terms.emplace_back(std::move(weight), std::move(target));
}

void ScreenedPoissonSystem::add_gradient(double lambda, GradientField g) {
    if (h == 0) { h = g.height(); w = g.width(); }
    if (g.height() != h || g.width() != w || g.channels() != 1)
        throw std::invalid_argument("ScreenedPoissonSystem: gradient term shape mismatch");
    if (lambda < 0.0)
        throw std::invalid_argument("ScreenedPoissonSystem: negative lambda");
    gradient_terms.emplace_back(lambda, std::move(g));
}

void ScreenedPoissonSystem::validate() const {
    for (const auto& [weight, target] : data_terms)
        for (double v : weight.data)
            if (v > 0.0) return;
    throw std::invalid_argument(
        "ScreenedPoissonSystem: no strictly positive data weight; system singular");
}

Tensor ScreenedPoissonSystem::apply(const Tensor& u) const {
    Tensor out(h, w, 1);
    for (const auto& [weight, target] : data_terms)
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] += weight.data[i] * u.data[i];
    double lam = 0.0;
    for (const auto& [lambda, g] : gradient_terms) lam += lambda;
    if (lam > 0.0) {
        Tensor lap = divergence_adjoint(forward_gradient(u));
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] += lam * lap.data[i];
    }
    return out;
}

Tensor ScreenedPoissonSystem::rhs() const {
    Tensor out(h, w, 1);
    for (const auto& [weight, target] : data_terms)
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] += weight.data[i] * target.data[i];
    for (const auto& [lambda, g] : gradient_terms) {
        if (lambda == 0.0) continue;
        Tensor div = divergence_adjoint(g);
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] += lambda * div.data[i];
    }
    return out;
}

Tensor ScreenedPoissonSystem::diagonal() const {
    Tensor out(h, w, 1);
    for (const auto& [weight, target] : data_terms)
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] += weight.data[i];
    double lam = 0.0;
    for (const auto& [lambda, g] : gradient_terms) lam += lambda;
    if (lam > 0.0)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(y, x, 0) += lam * stencil_degree(y, x, h, w);
    return out;
}

double ScreenedPoissonSystem::energy(const Tensor& u) const {
    double e = 0.0;
    for (const auto& [weight, target] : data_terms)
        for (std::size_t i = 0; i < u.data.size(); ++i) {
            const double r = u.data[i] - target.data[i];
            e += weight.data[i] * r * r;
        }
    for (const auto& [lambda, g] : gradient_terms) {
        GradientField gu = forward_gradient(u);
        for (std::size_t i = 0; i < u.data.size(); ++i) {
            const double rx = gu.gx.data[i] - g.gx.data[i];
            const double ry = gu.gy.data[i] - g.gy.data[i];
            e += lambda * (rx * rx + ry * ry);
        }
    }
    return e;
}

std::vector<double> cg_solve(const LinearOp& apply_op, const std::vector<double>& rhs,
                             const CgOptions& opts) {
    const std::size_t n = rhs.size();
    const int max_iters = opts.max_iters > 0 ? opts.max_iters : static_cast<int>(10 * n);
    const double bnorm = norm(rhs);

    std::vector<double> x(n, 0.0);
    if (opts.x0) {
        if (opts.x0->size() != n)
            throw std::invalid_argument("cg_solve: warm start size mismatch");
        x = *opts.x0;
    }
    if (bnorm == 0.0) return std::vector<double>(n, 0.0);

    std::vector<double> r(n), z(n), p(n), ap(n);
    apply_op(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];

    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (opts.jacobi_diag) {
            for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / (*opts.jacobi_diag)[i];
        } else {
            out = in;
        }
    };

    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    double rel = norm(r) / bnorm;
    if (opts.residual_trace) opts.residual_trace->push_back(rel);
    if (rel <= opts.tol) return x;

    for (int it = 0; it < max_iters; ++it) {
        apply_op(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0)
            throw SolverError("cg_solve: operator not positive definite", rel, it);
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(r) / bnorm;
        if (opts.residual_trace) opts.residual_trace->push_back(rel);
        if (rel <= opts.tol) return x;
        precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError("cg_solve: no convergence in " + std::to_string(max_iters) +
                          " iterations (relative residual " + std::to_string(rel) + ")",
                      rel, max_iters);
}

Tensor solve_depth(const Tensor& d_star, const Tensor* d_prev,
                   const GradientField& guided_grad, double lambda_d, double tol,
                   int max_iters, const Tensor* warm_start) {
    if (d_star.channels != 1)
        throw std::invalid_argument("solve_depth: expects a single-channel target");
    ScreenedPoissonSystem sys;
    sys.add_data(Tensor(d_star.height, d_star.width, 1, 1.0), d_star);
    if (d_prev) {
        if (!d_prev->same_shape(d_star))
            throw std::invalid_argument("solve_depth: previous-level shape mismatch");
        sys.add_data(Tensor(d_star.height, d_star.width, 1, 1.0), *d_prev);
    }
    sys.add_gradient(lambda_d, guided_grad);
    sys.validate();

    const Tensor diag = sys.diagonal();
    const Tensor b = sys.rhs();
    Tensor u(d_star.height, d_star.width, 1);
    LinearOp op = [&sys, &u](const std::vector<double>& x, std::vector<double>& out) {
        u.data = x;
        out = sys.apply(u).data;
    };
    CgOptions opts;
    opts.tol = tol;
    opts.max_iters = max_iters;
    opts.jacobi_diag = &diag.data;
    if (warm_start) opts.x0 = &warm_start->data;
    Tensor result(d_star.height, d_star.width, 1);
    result.data = cg_solve(op, b.data, opts);
    return result;
}

void IntrinsicChannelSystem::apply(const std::vector<double>& x,
                                   std::vector<double>& out) const {
    const std::size_t n = static_cast<std::size_t>(h) * w;
    out.assign(2 * n, 0.0);
    Tensor a(h, w, 1), s(h, w, 1);
    std::memcpy(a.data.data(), x.data(), n * sizeof(double));
    std::memcpy(s.data.data(), x.data() + n, n * sizeof(double));

    const double m = a_prev ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double coupled = lum_sq.data[i] * (a.data[i] + s.data[i]);
        out[i] = coupled + m * a.data[i];
        out[n + i] = coupled + m * s.data[i];
    }
    if (lambda_a > 0.0) {
        Tensor lap = divergence_adjoint(forward_gradient(a));
        for (std::size_t i = 0; i < n; ++i) out[i] += lambda_a * lap.data[i];
    }
    if (lambda_s > 0.0) {
        Tensor lap = divergence_adjoint(forward_gradient(s));
        for (std::size_t i = 0; i < n; ++i) out[n + i] += lambda_s * lap.data[i];
    }
    if (gauge_weight > 0.0) {
        // mu * q * n with n = (1,..,1,-1,..,-1)/sqrt(2n), q = <x, n>
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) q += a.data[i] - s.data[i];
        const double scale = gauge_weight * q / (2.0 * static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += scale;
            out[n + i] -= scale;
        }
    }
}

std::vector<double> IntrinsicChannelSystem::rhs() const {
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> b(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = lum_sq.data[i] * img_channel.data[i];
        b[i] = v;
        b[n + i] = v;
    }
    if (a_prev)
        for (std::size_t i = 0; i < n; ++i) {
            b[i] += a_prev->data[i];
            b[n + i] += s_prev->data[i];
        }
    if (lambda_a > 0.0) {
        Tensor div = divergence_adjoint(g_a);
        for (std::size_t i = 0; i < n; ++i) b[i] += lambda_a * div.data[i];
    }
    if (lambda_s > 0.0) {
        Tensor div = divergence_adjoint(g_s);
        for (std::size_t i = 0; i < n; ++i) b[n + i] += lambda_s * div.data[i];
    }
    return b;
}

std::vector<double> IntrinsicChannelSystem::diagonal() const {
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> d(2 * n, 0.0);
    const double m = a_prev ? 1.0 : 0.0;
    const double gauge = gauge_weight / (2.0 * static_cast<double>(n));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double deg = stencil_degree(y, x, h, w);
            d[i] = lum_sq.data[i] + m + lambda_a * deg + gauge;
            d[n + i] = lum_sq.data[i] + m + lambda_s * deg + gauge;
        }
    return d;
}

GradientField channels_to_grad(const Tensor& t) {
    if (t.channels % 2 != 0)
        throw std::invalid_argument("channels_to_grad: odd channel count");
    const int C = t.channels / 2;
    GradientField f{Tensor(t.height, t.width, C), Tensor(t.height, t.width, C)};
    for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x)
            for (int c = 0; c < C; ++c) {
                f.gx.at(y, x, c) = t.at(y, x, c);
                f.gy.at(y, x, c) = t.at(y, x, C + c);
            }
    return f;
}

Tensor grad_to_channels(const GradientField& f) {
    const int C = f.channels();
    Tensor t(f.height(), f.width(), 2 * C);
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x)
            for (int c = 0; c < C; ++c) {
                t.at(y, x, c) = f.gx.at(y, x, c);
                t.at(y, x, C + c) = f.gy.at(y, x, c);
            }
    return t;
}

IntrinsicSolveResult solve_intrinsic(const Tensor& img_log, const Tensor& lum_weight,
                                     const Tensor& guided_a, const Tensor& guided_s,
                                     const Tensor* a_prev, const Tensor* s_prev,
                                     double lambda_a, double lambda_s, double tol,
                                     int max_iters, const Tensor* warm_a,
                                     const Tensor* warm_s) {
    const int H = img_log.height, W = img_log.width, C = img_log.channels;
    if (lum_weight.channels != 1 || lum_weight.height != H || lum_weight.width != W)
        throw std::invalid_argument("solve_intrinsic: luminance weight must be HxWx1");
    if (guided_a.channels != 2 * C || guided_s.channels != 2 * C)
        throw std::invalid_argument("solve_intrinsic: guided gradients must have 2C channels");
    if ((a_prev == nullptr) != (s_prev == nullptr))
        throw std::invalid_argument("solve_intrinsic: anchors must come in pairs");
    const bool anchored = a_prev != nullptr;
    if (!anchored && lambda_a == 0.0 && lambda_s == 0.0)
        throw std::invalid_argument(
            "solve_intrinsic: lambda_a = lambda_s = 0 with no previous level leaves "
            "the albedo/shading split undetermined");
    double max_lum_sq = 0.0;
    for (double v : lum_weight.data) max_lum_sq = std::max(max_lum_sq, v * v);
    if (!anchored && max_lum_sq == 0.0)
        throw std::invalid_argument(
            "solve_intrinsic: zero luminance weight with no previous level leaves "
            "per-channel constants undetermined");

    Tensor lum_sq(H, W, 1);
    for (std::size_t i = 0; i < lum_sq.data.size(); ++i)
        lum_sq.data[i] = lum_weight.data[i] * lum_weight.data[i];

    const GradientField ga_full = channels_to_grad(guided_a);
    const GradientField gs_full = channels_to_grad(guided_s);

    IntrinsicSolveResult res{Tensor(H, W, C), Tensor(H, W, C)};
    const std::size_t n = static_cast<std::size_t>(H) * W;

    for (int c = 0; c < C; ++c) {
        auto slice = [&](const Tensor& t, int ch) {
            Tensor out(H, W, 1);
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) out.at(y, x, 0) = t.at(y, x, ch);
            return out;
        };

        IntrinsicChannelSystem sys;
        sys.h = H;
        sys.w = W;
        sys.lum_sq = lum_sq;
        sys.img_channel = slice(img_log, c);
        sys.g_a = GradientField{slice(ga_full.gx, c), slice(ga_full.gy, c)};
        sys.g_s = GradientField{slice(gs_full.gx, c), slice(gs_full.gy, c)};
        Tensor ap, sp;
        if (anchored) {
            ap = slice(*a_prev, c);
            sp = slice(*s_prev, c);
            sys.a_prev = &ap;
            sys.s_prev = &sp;
        } else {
            sys.gauge_weight = 1.0;
        }
        sys.lambda_a = lambda_a;
        sys.lambda_s = lambda_s;

        const std::vector<double> b = sys.rhs();
        const std::vector<double> diag = sys.diagonal();
        LinearOp op = [&sys](const std::vector<double>& x, std::vector<double>& out) {
            sys.apply(x, out);
        };
        CgOptions opts;
        opts.tol = tol;
        opts.max_iters = max_iters > 0 ? max_iters : static_cast<int>(10 * 2 * n);
        opts.jacobi_diag = &diag;
        std::vector<double> x0;
        if (warm_a && warm_s) {
            x0.resize(2 * n);
            for (std::size_t i = 0; i < n; ++i) {
                x0[i] = warm_a->data[i * C + c];
                x0[n + i] = warm_s->data[i * C + c];
            }
            opts.x0 = &x0;
        }
        std::vector<double> x;
        try {
            x = cg_solve(op, b, opts);
        } catch (const SolverError& e) {
            throw SolverError(std::string("solve_intrinsic (channel ") +
                                  std::to_string(c) + "): " + e.what(),
                              e.residual, e.iterations);
        }
        for (std::size_t i = 0; i < n; ++i) {
            res.albedo.data[i * C + c] = x[i];
            res.shading.data[i * C + c] = x[n + i];
        }
    }
    return res;
}

} // namespace jcnf
