#include "jcnf/networks.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace jcnf {

double scale_activation(double x) { return std::tanh(0.5 * (x - 1.0)); }

double scale_activation_grad_from_value(double fx) { return 0.5 * (1.0 - fx * fx); }

namespace {

LayerParams random_params(int oc, int ic, int kh, int kw, Rng& rng, double init_std) {
    LayerParams p(oc, ic, kh, kw);
    for (double& v : p.kernels) v = rng.normal(0.0, init_std);
    // biases start at zero
    return p;
}

Tensor conv_stage(const ConvStage& s, const Tensor& in) {
    return conv2d(in, s.p, s.stride, s.pad);
}

void manifest_line(std::ostringstream& os, const std::string& name,
                   const LayerParams& p, int stride, const std::string& pad,
                   const std::string& share) {
    os << name << " kernel=" << p.kernel_h << "x" << p.kernel_w
       << " in=" << p.in_channels << " out=" << p.out_channels
       << " stride=" << stride << " pad=" << pad << " share=" << share << "\n";
}

} // namespace

// ---- global depth net ----

GlobalDepthNet GlobalDepthNet::create(const NetworkShape& shape, Rng& rng,
                                      double init_std) {
    if (shape.global_input % 16 != 0)
        throw std::invalid_argument("global net input size must be divisible by 16");
    GlobalDepthNet n;
    n.input_size = shape.global_input;
    const int* c = shape.global_conv;
    n.conv1 = {random_params(c[0], 3, 11, 11, rng, init_std), 2, Padding::Same};
    n.conv2 = {random_params(c[1], c[0], 5, 5, rng, init_std), 1, Padding::Same};
    n.conv3 = {random_params(c[2], c[1], 3, 3, rng, init_std), 1, Padding::Same};
    n.conv4 = {random_params(c[3], c[2], 3, 3, rng, init_std), 1, Padding::Same};
    n.conv5 = {random_params(c[4], c[3], 3, 3, rng, init_std), 1, Padding::Same};
    const int s16 = n.input_size / 16;
    const int fc_in = s16 * s16 * c[4];
    n.fc1 = random_params(shape.global_fc1, fc_in, 1, 1, rng, init_std);
    n.fc2 = random_params(s16 * s16, shape.global_fc1, 1, 1, rng, init_std);
    return n;
}

Tensor GlobalDepthNet::forward(const Tensor& input, GlobalCache* cache) const {
    if (input.height != input_size || input.width != input_size || input.channels != 3)
        throw std::invalid_argument("global net expects " + std::to_string(input_size) +
                                    "x" + std::to_string(input_size) + "x3, got " +
                                    input.shape_str());
    GlobalCache local;
    GlobalCache& c = cache ? *cache : local;
    c.x0 = input;
    c.z1 = conv_stage(conv1, c.x0);
    c.r1 = relu(c.z1);
    c.p1 = maxpool(c.r1, 2, 2);
    c.z2 = conv_stage(conv2, c.p1);
    c.r2 = relu(c.z2);
    c.p2 = maxpool(c.r2, 2, 2);
    c.z3 = conv_stage(conv3, c.p2);
    c.r3 = relu(c.z3);
    c.z4 = conv_stage(conv4, c.r3);
    c.r4 = relu(c.z4);
    c.z5 = conv_stage(conv5, c.r4);
    c.r5 = relu(c.z5);
    c.p5 = maxpool(c.r5, 2, 2);
    c.f1 = fully_connected(c.p5, fc1);
    c.rf1 = relu(c.f1);
    Tensor f2 = fully_connected(c.rf1, fc2);
    const int s16 = coarse_size();
    Tensor coarse(s16, s16, 1);
    coarse.data = f2.data;
    return coarse;
}

std::vector<GradTape> GlobalDepthNet::backward(const GlobalCache& c,
                                               const Tensor& coarse_grad) const {
    const int s16 = coarse_size();
    if (coarse_grad.height != s16 || coarse_grad.width != s16 ||
        coarse_grad.channels != 1)
        throw std::invalid_argument("global backward: coarse grad shape mismatch");
    Tensor up(1, 1, s16 * s16);
    up.data = coarse_grad.data;

    auto bf2 = fully_connected_backward(c.rf1, fc2, up);
    Tensor g_f1 = relu_backward(c.f1, bf2.input_grad);
    auto bf1 = fully_connected_backward(c.p5, fc1, g_f1);
    Tensor g_r5 = maxpool_backward(c.r5, 2, 2, bf1.input_grad);
    Tensor g_z5 = relu_backward(c.z5, g_r5);
    auto b5 = conv2d_backward(c.r4, conv5.p, conv5.stride, conv5.pad, g_z5);
    Tensor g_z4 = relu_backward(c.z4, b5.input_grad);
    auto b4 = conv2d_backward(c.r3, conv4.p, conv4.stride, conv4.pad, g_z4);
    Tensor g_z3 = relu_backward(c.z3, b4.input_grad);
    auto b3 = conv2d_backward(c.p2, conv3.p, conv3.stride, conv3.pad, g_z3);
    Tensor g_r2 = maxpool_backward(c.r2, 2, 2, b3.input_grad);
    Tensor g_z2 = relu_backward(c.z2, g_r2);
    auto b2 = conv2d_backward(c.p1, conv2.p, conv2.stride, conv2.pad, g_z2);
    Tensor g_r1 = maxpool_backward(c.r1, 2, 2, b2.input_grad);
    Tensor g_z1 = relu_backward(c.z1, g_r1);
    auto b1 = conv2d_backward(c.x0, conv1.p, conv1.stride, conv1.pad, g_z1);

    std::vector<GradTape> g;
    g.push_back(std::move(b1.param_grad));
    g.push_back(std::move(b2.param_grad));
    g.push_back(std::move(b3.param_grad));
    g.push_back(std::move(b4.param_grad));
    g.push_back(std::move(b5.param_grad));
    g.push_back(std::move(bf1.param_grad));
    g.push_back(std::move(bf2.param_grad));
    return g;
}

std::vector<std::pair<std::string, LayerParams*>> GlobalDepthNet::param_blocks() {
    return {{"global.conv1", &conv1.p}, {"global.conv2", &conv2.p},
            {"global.conv3", &conv3.p}, {"global.conv4", &conv4.p},
            {"global.conv5", &conv5.p}, {"global.fc1", &fc1},
            {"global.fc2", &fc2}};
}

std::vector<std::pair<std::string, const LayerParams*>> GlobalDepthNet::param_blocks() const {
    auto blocks = const_cast<GlobalDepthNet*>(this)->param_blocks();
    std::vector<std::pair<std::string, const LayerParams*>> out;
    out.reserve(blocks.size());
    for (auto& [n, p] : blocks) out.emplace_back(n, p);
    return out;
}

GlobalPrediction global_depth_forward(const Image& log_rgb, const GlobalDepthNet& net) {
    if (log_rgb.domain != Domain::Log)
        throw std::invalid_argument("global_depth_forward: expects a log-domain image");
    const int H = log_rgb.height(), W = log_rgb.width();
    if (H < 8 || W < 8)
        throw std::invalid_argument(
            "global_depth_forward: image below the net's minimum footprint (8px), got " +
            log_rgb.t.shape_str());
    Tensor in = (H == net.input_size && W == net.input_size)
                    ? log_rgb.t
                    : bilinear_resize(log_rgb.t, net.input_size, net.input_size);
    Tensor coarse = net.forward(in);
    const int ch = std::max(1, H / 16), cw = std::max(1, W / 16);
    GlobalPrediction pred;
    pred.coarse = Image(ch == coarse.height && cw == coarse.width
                            ? coarse
                            : bilinear_resize(coarse, ch, cw),
                        Domain::Log);
    pred.upsampled = Image(bilinear_resize(pred.coarse.t, H, W), Domain::Log);
    return pred;
}

// ---- gradient nets ----

GradientNets GradientNets::create(const NetworkShape& shape, Rng& rng,
                                  double init_std) {
    GradientNets n;
    const int c1 = shape.grad_conv1, m = shape.grad_mid;
    n.d1 = {random_params(c1, 4, 11, 11, rng, init_std), 1, Padding::Same};
    n.d2 = {random_params(m, c1, 3, 3, rng, init_std), 1, Padding::Same};
    n.d3 = {random_params(m, 2 * m, 3, 3, rng, init_std), 1, Padding::Same};
    n.d4 = {random_params(m, m, 3, 3, rng, init_std), 1, Padding::Same};
    n.d5 = {random_params(2, m, 3, 3, rng, init_std), 1, Padding::Same};
    n.i1 = {random_params(c1, 3, 11, 11, rng, init_std), 1, Padding::Same};
    n.i2 = {random_params(m, c1, 3, 3, rng, init_std), 1, Padding::Same};
    n.i3 = {random_params(m, 2 * m, 3, 3, rng, init_std), 1, Padding::Same};
    n.a4 = {random_params(m, m, 3, 3, rng, init_std), 1, Padding::Same};
    n.a5 = {random_params(6, m, 3, 3, rng, init_std), 1, Padding::Same};
    n.s4 = {random_params(m, m, 3, 3, rng, init_std), 1, Padding::Same};
    n.s5 = {random_params(6, m, 3, 3, rng, init_std), 1, Padding::Same};
    return n;
}

void GradientNets::forward(const Tensor& rgb, const Tensor& coarse_up, bool live_peers,
                           GradNetsCache& c) const {
    if (rgb.channels != 3)
        throw std::invalid_argument("gradient nets expect a 3-channel image");
    if (coarse_up.height != rgb.height || coarse_up.width != rgb.width ||
        coarse_up.channels != 1)
        throw std::invalid_argument("gradient nets: coarse depth channel must be HxWx1");
    c.live_peers = live_peers;
    c.in_d = concat_channels(rgb, coarse_up);
    c.in_i = rgb;

    c.zd1 = conv_stage(d1, c.in_d);
    c.rd1 = relu(c.zd1);
    c.zd2 = conv_stage(d2, c.rd1);
    c.rd2 = relu(c.zd2);

    c.zi1 = conv_stage(i1, c.in_i);
    c.ri1 = relu(c.zi1);
    c.zi2 = conv_stage(i2, c.ri1);
    c.ri2 = relu(c.zi2);

    const Tensor zeros_d(c.rd2.height, c.rd2.width, c.rd2.channels);
    c.cat_d = concat_channels(c.rd2, live_peers ? c.ri2 : zeros_d);
    c.cat_i = concat_channels(c.ri2, live_peers ? c.rd2 : zeros_d);

    c.zd3 = conv_stage(d3, c.cat_d);
    c.rd3 = relu(c.zd3);
    c.zd4 = conv_stage(d4, c.rd3);
    c.rd4 = relu(c.zd4);
    c.out_d = conv_stage(d5, c.rd4);

    c.zi3 = conv_stage(i3, c.cat_i);
    c.ri3 = relu(c.zi3);
    c.za4 = conv_stage(a4, c.ri3);
    c.ra4 = relu(c.za4);
    c.out_a = conv_stage(a5, c.ra4);
    c.zs4 = conv_stage(s4, c.ri3);
    c.rs4 = relu(c.zs4);
    c.out_s = conv_stage(s5, c.rs4);
}

std::vector<GradTape> GradientNets::backward(const GradNetsCache& c, const Tensor& gd,
                                             const Tensor& ga, const Tensor& gs) const {
    GradTape td1(d1.p), td2(d2.p), td3(d3.p), td4(d4.p), td5(d5.p);
    GradTape ti1(i1.p), ti2(i2.p), ti3(i3.p);
    GradTape ta4(a4.p), ta5(a5.p), ts4(s4.p), ts5(s5.p);

    Tensor g_rd2(c.rd2.height, c.rd2.width, c.rd2.channels);
    Tensor g_ri2(c.ri2.height, c.ri2.width, c.ri2.channels);

    auto add_into = [](Tensor& dst, const Tensor& src) {
        for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
    };

    // depth head
    if (gd.size() > 0) {
        auto b5 = conv2d_backward(c.rd4, d5.p, d5.stride, d5.pad, gd);
        td5.add(b5.param_grad);
        Tensor g_zd4 = relu_backward(c.zd4, b5.input_grad);
        auto b4 = conv2d_backward(c.rd3, d4.p, d4.stride, d4.pad, g_zd4);
        td4.add(b4.param_grad);
        Tensor g_zd3 = relu_backward(c.zd3, b4.input_grad);
        auto b3 = conv2d_backward(c.cat_d, d3.p, d3.stride, d3.pad, g_zd3);
        td3.add(b3.param_grad);
        Tensor own, peer;
        concat_channels_backward(b3.input_grad, c.rd2.channels, own, peer);
        add_into(g_rd2, own);
        if (c.live_peers) add_into(g_ri2, peer);
    }

    // intrinsic heads
    Tensor g_ri3(c.ri3.height, c.ri3.width, c.ri3.channels);
    bool intrinsic_active = false;
    if (ga.size() > 0) {
        auto b5 = conv2d_backward(c.ra4, a5.p, a5.stride, a5.pad, ga);
        ta5.add(b5.param_grad);
        Tensor g_za4 = relu_backward(c.za4, b5.input_grad);
        auto b4 = conv2d_backward(c.ri3, a4.p, a4.stride, a4.pad, g_za4);
        ta4.add(b4.param_grad);
        add_into(g_ri3, b4.input_grad);
        intrinsic_active = true;
    }
    if (gs.size() > 0) {
        auto b5 = conv2d_backward(c.rs4, s5.p, s5.stride, s5.pad, gs);
        ts5.add(b5.param_grad);
        Tensor g_zs4 = relu_backward(c.zs4, b5.input_grad);
        auto b4 = conv2d_backward(c.ri3, s4.p, s4.stride, s4.pad, g_zs4);
        ts4.add(b4.param_grad);
        add_into(g_ri3, b4.input_grad);
        intrinsic_active = true;
    }
    if (intrinsic_active) {
        Tensor g_zi3 = relu_backward(c.zi3, g_ri3);
        auto b3 = conv2d_backward(c.cat_i, i3.p, i3.stride, i3.pad, g_zi3);
        ti3.add(b3.param_grad);
        Tensor own, peer;
        concat_channels_backward(b3.input_grad, c.ri2.channels, own, peer);
        add_into(g_ri2, own);
        if (c.live_peers) add_into(g_rd2, peer);
    }

    // depth branch trunk
    {
        Tensor g_zd2 = relu_backward(c.zd2, g_rd2);
        auto b2 = conv2d_backward(c.rd1, d2.p, d2.stride, d2.pad, g_zd2);
        td2.add(b2.param_grad);
        Tensor g_zd1 = relu_backward(c.zd1, b2.input_grad);
        auto b1 = conv2d_backward(c.in_d, d1.p, d1.stride, d1.pad, g_zd1);
        td1.add(b1.param_grad);
    }
    // intrinsic stem trunk
    {
        Tensor g_zi2 = relu_backward(c.zi2, g_ri2);
        auto b2 = conv2d_backward(c.ri1, i2.p, i2.stride, i2.pad, g_zi2);
        ti2.add(b2.param_grad);
        Tensor g_zi1 = relu_backward(c.zi1, b2.input_grad);
        auto b1 = conv2d_backward(c.in_i, i1.p, i1.stride, i1.pad, g_zi1);
        ti1.add(b1.param_grad);
    }

    std::vector<GradTape> g;
    g.push_back(std::move(td1));
    g.push_back(std::move(td2));
    g.push_back(std::move(td3));
    g.push_back(std::move(td4));
    g.push_back(std::move(td5));
    g.push_back(std::move(ti1));
    g.push_back(std::move(ti2));
    g.push_back(std::move(ti3));
    g.push_back(std::move(ta4));
    g.push_back(std::move(ta5));
    g.push_back(std::move(ts4));
    g.push_back(std::move(ts5));
    return g;
}

std::vector<std::pair<std::string, LayerParams*>> GradientNets::param_blocks() {
    return {{"grad_depth.conv1", &d1.p},          {"grad_depth.conv2", &d2.p},
            {"grad_depth.conv3", &d3.p},          {"grad_depth.conv4", &d4.p},
            {"grad_depth.conv5", &d5.p},          {"grad_intrinsic.conv1", &i1.p},
            {"grad_intrinsic.conv2", &i2.p},      {"grad_intrinsic.conv3", &i3.p},
            {"grad_albedo.conv4", &a4.p},         {"grad_albedo.conv5", &a5.p},
            {"grad_shading.conv4", &s4.p},        {"grad_shading.conv5", &s5.p}};
}

std::vector<std::pair<std::string, const LayerParams*>> GradientNets::param_blocks() const {
    auto blocks = const_cast<GradientNets*>(this)->param_blocks();
    std::vector<std::pair<std::string, const LayerParams*>> out;
    out.reserve(blocks.size());
    for (auto& [n, p] : blocks) out.emplace_back(n, p);
    return out;
}

GradientPrediction gradient_nets_forward(const GradientNets& nets, const Tensor& rgb,
                                         const Tensor& coarse_up) {
    GradNetsCache c;
    nets.forward(rgb, coarse_up, true, c);
    return {c.out_d, c.out_a, c.out_s};
}

GradientPrediction gradient_nets_forward_tiled(const GradientNets& nets,
                                               const Tensor& rgb,
                                               const Tensor& coarse_up, int patch,
                                               int out) {
    const int H = rgb.height, W = rgb.width;
    if (H < patch || W < patch)
        throw std::invalid_argument("image smaller than the tile size");
    const int margin = (patch - out) / 2;

    GradientPrediction acc{Tensor(H, W, 2), Tensor(H, W, 6), Tensor(H, W, 6)};
    Tensor weight(H, W, 1);

    std::vector<int> ys, xs;
    for (int y = 0;; y += out) {
        ys.push_back(std::min(y, H - patch));
        if (y >= H - patch) break;
    }
    for (int x = 0;; x += out) {
        xs.push_back(std::min(x, W - patch));
        if (x >= W - patch) break;
    }

    auto slice = [&](const Tensor& src, int y0, int x0, int size) {
        Tensor t(size, size, src.channels);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                for (int ch = 0; ch < src.channels; ++ch)
                    t.at(y, x, ch) = src.at(y0 + y, x0 + x, ch);
        return t;
    };

    for (int y0 : ys)
        for (int x0 : xs) {
            GradNetsCache c;
            nets.forward(slice(rgb, y0, x0, patch), slice(coarse_up, y0, x0, patch),
                         true, c);
            const Tensor pd = crop_center(c.out_d, out, out);
            const Tensor pa = crop_center(c.out_a, out, out);
            const Tensor ps = crop_center(c.out_s, out, out);
            for (int y = 0; y < out; ++y)
                for (int x = 0; x < out; ++x) {
                    const int gy = y0 + margin + y, gx = x0 + margin + x;
                    weight.at(gy, gx, 0) += 1.0;
                    for (int ch = 0; ch < 2; ++ch)
                        acc.depth.at(gy, gx, ch) += pd.at(y, x, ch);
                    for (int ch = 0; ch < 6; ++ch) {
                        acc.albedo.at(gy, gx, ch) += pa.at(y, x, ch);
                        acc.shading.at(gy, gx, ch) += ps.at(y, x, ch);
                    }
                }
        }

    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const double w = weight.at(y, x, 0);
            if (w <= 0.0) continue;
            for (int ch = 0; ch < 2; ++ch) acc.depth.at(y, x, ch) /= w;
            for (int ch = 0; ch < 6; ++ch) {
                acc.albedo.at(y, x, ch) /= w;
                acc.shading.at(y, x, ch) /= w;
            }
        }
    return acc;
}

// ---- scale nets ----

ScaleNet ScaleNet::create(int in_ch, int out_ch, const NetworkShape& shape, Rng& rng,
                          double init_std) {
    ScaleNet n;
    n.in_channels = in_ch;
    n.out_channels = out_ch;
    n.c1 = {random_params(shape.scale_mid, in_ch, 3, 3, rng, init_std), 1, Padding::Same};
    n.c2 = {random_params(shape.scale_mid, shape.scale_mid, 3, 3, rng, init_std), 1,
            Padding::Same};
    n.c3 = {random_params(out_ch, shape.scale_mid, 1, 1, rng, init_std), 1, Padding::Same};
    return n;
}

Tensor ScaleNet::forward(const Tensor& in, ScaleCache* cache) const {
    if (in.channels != in_channels)
        throw std::invalid_argument("scale net expects " + std::to_string(in_channels) +
                                    " input channels, got " + std::to_string(in.channels));
    if (bypass) {
        if (cache) throw std::logic_error("scale net: cannot record a cache in bypass mode");
        return Tensor(in.height, in.width, out_channels, 1.0);
    }
    ScaleCache local;
    ScaleCache& c = cache ? *cache : local;
    c.input = in;
    c.z1 = conv_stage(c1, c.input);
    c.z2 = conv_stage(c2, c.z1);
    c.z3 = conv_stage(c3, c.z2);
    c.out = c.z3;
    for (double& v : c.out.data) v = scale_activation(v);
    return c.out;
}

std::vector<GradTape> ScaleNet::backward(const ScaleCache& c,
                                         const Tensor& upstream) const {
    Tensor g_z3 = upstream;
    for (std::size_t i = 0; i < g_z3.data.size(); ++i)
        g_z3.data[i] *= scale_activation_grad_from_value(c.out.data[i]);
    auto b3 = conv2d_backward(c.z2, c3.p, c3.stride, c3.pad, g_z3);
    auto b2 = conv2d_backward(c.z1, c2.p, c2.stride, c2.pad, b3.input_grad);
    auto b1 = conv2d_backward(c.input, c1.p, c1.stride, c1.pad, b2.input_grad);
    std::vector<GradTape> g;
    g.push_back(std::move(b1.param_grad));
    g.push_back(std::move(b2.param_grad));
    g.push_back(std::move(b3.param_grad));
    return g;
}

std::vector<std::pair<std::string, LayerParams*>> ScaleNet::param_blocks() {
    return {{"conv1", &c1.p}, {"conv2", &c2.p}, {"conv3", &c3.p}};
}

std::vector<std::pair<std::string, const LayerParams*>> ScaleNet::param_blocks() const {
    auto blocks = const_cast<ScaleNet*>(this)->param_blocks();
    std::vector<std::pair<std::string, const LayerParams*>> out;
    out.reserve(blocks.size());
    for (auto& [n, p] : blocks) out.emplace_back(n, p);
    return out;
}

Tensor stack_confidence_input_depth(const Tensor& sq_i, const Tensor& sq_a,
                                    const Tensor& sq_s) {
    return concat_channels(concat_channels(sq_i, sq_a), sq_s);
}

Tensor stack_confidence_input_albedo(const Tensor& sq_i, const Tensor& sq_d,
                                     const Tensor& sq_s) {
    return concat_channels(concat_channels(sq_i, sq_d), sq_s);
}

Tensor stack_confidence_input_shading(const Tensor& sq_i, const Tensor& sq_d,
                                      const Tensor& sq_a) {
    return concat_channels(concat_channels(sq_i, sq_d), sq_a);
}

std::string topology_manifest(const GlobalDepthNet& global, const GradientNets& nets,
                              const ScaleNet& scale_d, const ScaleNet& scale_a,
                              const ScaleNet& scale_s) {
    std::ostringstream os;
    manifest_line(os, "global.conv1", global.conv1.p, global.conv1.stride, "same", "-");
    manifest_line(os, "global.conv2", global.conv2.p, 1, "same", "-");
    manifest_line(os, "global.conv3", global.conv3.p, 1, "same", "-");
    manifest_line(os, "global.conv4", global.conv4.p, 1, "same", "-");
    manifest_line(os, "global.conv5", global.conv5.p, 1, "same", "-");
    manifest_line(os, "global.fc1", global.fc1, 1, "none", "-");
    manifest_line(os, "global.fc2", global.fc2, 1, "none", "-");
    manifest_line(os, "grad_depth.conv1", nets.d1.p, 1, "same", "-");
    manifest_line(os, "grad_depth.conv2", nets.d2.p, 1, "same", "cross_concat");
    manifest_line(os, "grad_depth.conv3", nets.d3.p, 1, "same", "-");
    manifest_line(os, "grad_depth.conv4", nets.d4.p, 1, "same", "-");
    manifest_line(os, "grad_depth.conv5", nets.d5.p, 1, "same", "-");
    manifest_line(os, "grad_intrinsic.conv1", nets.i1.p, 1, "same", "intrinsic_stem");
    manifest_line(os, "grad_intrinsic.conv2", nets.i2.p, 1, "same", "intrinsic_stem cross_concat");
    manifest_line(os, "grad_intrinsic.conv3", nets.i3.p, 1, "same", "intrinsic_stem");
    manifest_line(os, "grad_albedo.conv4", nets.a4.p, 1, "same", "-");
    manifest_line(os, "grad_albedo.conv5", nets.a5.p, 1, "same", "-");
    manifest_line(os, "grad_shading.conv4", nets.s4.p, 1, "same", "-");
    manifest_line(os, "grad_shading.conv5", nets.s5.p, 1, "same", "-");
    manifest_line(os, "scale_depth.conv1", scale_d.c1.p, 1, "same", "-");
    manifest_line(os, "scale_depth.conv2", scale_d.c2.p, 1, "same", "-");
    manifest_line(os, "scale_depth.conv3", scale_d.c3.p, 1, "same", "-");
    manifest_line(os, "scale_albedo.conv1", scale_a.c1.p, 1, "same", "-");
    manifest_line(os, "scale_albedo.conv2", scale_a.c2.p, 1, "same", "-");
    manifest_line(os, "scale_albedo.conv3", scale_a.c3.p, 1, "same", "-");
    manifest_line(os, "scale_shading.conv1", scale_s.c1.p, 1, "same", "-");
    manifest_line(os, "scale_shading.conv2", scale_s.c2.p, 1, "same", "-");
    manifest_line(os, "scale_shading.conv3", scale_s.c3.p, 1, "same", "-");
    return os.str();
}

} // namespace jcnf
