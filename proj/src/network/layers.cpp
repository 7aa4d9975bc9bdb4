// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/errors.hpp"
#include "skyloss/network.hpp"
#include "skyloss/simd/kernels.hpp"

#include <algorithm>

namespace skyloss::nn {

namespace {

// Valid output-index range [lo, hi) along one axis for kernel offset `d`
// (-1, 0, +1) with zero padding of one.
inline void valid_range(int n, int d, int& lo, int& hi)
{
    lo = std::max(0, -d);
    hi = std::min(n, n - d);
}

// out[oc] = bias[oc] + sum_ic conv3x3(in[ic], w[oc][ic]), then relu.
void conv_forward(const ConvLayout& l, const double* params, const double* in, double* out,
                  const simd::KernelTable& k)
{
    const std::size_t plane = static_cast<std::size_t>(l.h) * l.w;
    for (int oc = 0; oc < l.out_c; ++oc) {
        double* o = out + oc * plane;
        std::fill(o, o + plane, params[l.bias + oc]);
        for (int ic = 0; ic < l.in_c; ++ic) {
            const double* src = in + ic * plane;
            const double* w = params + l.weight + (static_cast<std::size_t>(oc) * l.in_c + ic) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                int y0, y1;
                valid_range(l.h, ky - 1, y0, y1);
                for (int kx = 0; kx < 3; ++kx) {
                    int x0, x1;
                    valid_range(l.w, kx - 1, x0, x1);
                    const double wv = w[ky * 3 + kx];
                    for (int y = y0; y < y1; ++y)
                        k.axpy(wv, src + (y + ky - 1) * l.w + x0 + kx - 1, o + y * l.w + x0,
                               static_cast<std::size_t>(x1 - x0));
                }
            }
        }
        for (std::size_t i = 0; i < plane; ++i)
            o[i] = o[i] > 0.0 ? o[i] : 0.0;
    }
}

// Gradients of conv+relu given d loss / d relu output in `g` (modified in
// place into d loss / d preactivation). `gin` may be null for the first layer.
void conv_backward(const ConvLayout& l, const double* params, const double* in, const double* out, double* g,
                   double* grad, double* gin, const simd::KernelTable& k)
{
    const std::size_t plane = static_cast<std::size_t>(l.h) * l.w;
    for (std::size_t i = 0; i < plane * l.out_c; ++i)
        if (!(out[i] > 0.0))
            g[i] = 0.0;
    if (gin)
        std::fill(gin, gin + plane * l.in_c, 0.0);

    for (int oc = 0; oc < l.out_c; ++oc) {
        const double* go = g + oc * plane;
        grad[l.bias + oc] += k.sum(go, plane);
        for (int ic = 0; ic < l.in_c; ++ic) {
            const double* src = in + ic * plane;
            const std::size_t woff = l.weight + (static_cast<std::size_t>(oc) * l.in_c + ic) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                int y0, y1;
                valid_range(l.h, ky - 1, y0, y1);
                for (int kx = 0; kx < 3; ++kx) {
                    int x0, x1;
                    valid_range(l.w, kx - 1, x0, x1);
                    const std::size_t len = static_cast<std::size_t>(x1 - x0);
                    const double wv = params[woff + ky * 3 + kx];
                    double gw = 0.0;
                    for (int y = y0; y < y1; ++y) {
                        const std::size_t src_off = (y + ky - 1) * l.w + x0 + kx - 1;
                        const double* grow = go + y * l.w + x0;
                        gw += k.dot(grow, src + src_off, len);
                        if (gin)
                            k.axpy(wv, grow, gin + ic * plane + src_off, len);
                    }
                    grad[woff + ky * 3 + kx] += gw;
                }
            }
        }
    }
}

void pool_forward(int c, int h, int w, const double* in, double* out, std::uint32_t* argmax)
{
    const int oh = h / 2, ow = w / 2;
    for (int ch = 0; ch < c; ++ch) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                std::uint32_t best = static_cast<std::uint32_t>((ch * h + 2 * y) * w + 2 * x);
                // Scan order (0,0) (0,1) (1,0) (1,1); ties keep the first.
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const auto idx = static_cast<std::uint32_t>((ch * h + 2 * y + dy) * w + 2 * x + dx);
                        if (in[idx] > in[best])
                            best = idx;
                    }
                const std::size_t o = (static_cast<std::size_t>(ch) * oh + y) * ow + x;
                out[o] = in[best];
                argmax[o] = best;
            }
        }
    }
}

void dense_forward(const DenseLayout& l, const double* params, const double* in, double* out, bool relu,
                   const simd::KernelTable& k)
{
    for (int o = 0; o < l.out; ++o) {
        const double v = params[l.bias + o] + k.dot(params + l.weight + static_cast<std::size_t>(o) * l.in, in,
                                                   static_cast<std::size_t>(l.in));
        out[o] = relu ? (v > 0.0 ? v : 0.0) : v;
    }
}

} // namespace

Workspace::Workspace(const ModelSpec& spec)
{
    spec.validate();
    int c = spec.channels, h = spec.height, w = spec.width;
    for (int oc : spec.conv_channels) {
        const std::size_t full = static_cast<std::size_t>(oc) * h * w;
        conv_out.emplace_back(full);
        conv_grad.emplace_back(full);
        h /= 2;
        w /= 2;
        const std::size_t pooled = static_cast<std::size_t>(oc) * h * w;
        pool_out.emplace_back(pooled);
        pool_grad.emplace_back(pooled);
        pool_argmax.emplace_back(pooled);
        c = oc;
    }
    (void)c;
    for (int d : spec.dense) {
        dense_out.emplace_back(static_cast<std::size_t>(d));
        dense_grad.emplace_back(static_cast<std::size_t>(d));
    }
    probs.resize(spec.output_size());
}

std::span<const double> forward(const Model& model, std::span<const double> input, Workspace& ws)
{
    const ModelSpec& spec = model.spec();
    if (input.size() != spec.input_size())
        throw ConsistencyError("forward: input has " + std::to_string(input.size()) + " values, model expects " +
                               std::to_string(spec.input_size()));
    const simd::KernelTable& k = simd::active();
    const double* p = model.params().data();

    const double* x = input.data();
    const auto& conv = model.conv_layers();
    for (std::size_t i = 0; i < conv.size(); ++i) {
        conv_forward(conv[i], p, x, ws.conv_out[i].data(), k);
        pool_forward(conv[i].out_c, conv[i].h, conv[i].w, ws.conv_out[i].data(), ws.pool_out[i].data(),
                     ws.pool_argmax[i].data());
        x = ws.pool_out[i].data();
    }
    if (conv.empty())
        x = input.data();

    const auto& dense = model.dense_layers();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        dense_forward(dense[i], p, x, ws.dense_out[i].data(), i + 1 < dense.size(), k);
        x = ws.dense_out[i].data();
    }
    block_softmax(ws.dense_out.back(), ws.probs);
    return ws.probs;
}

std::vector<double> forward(const Model& model, std::span<const double> input)
{
    Workspace ws(model.spec());
    const auto out = forward(model, input, ws);
    return {out.begin(), out.end()};
}

std::vector<double> forward(const Model& model, const RasterImage& image)
{
    const Tensor t = to_tensor(image);
    return forward(model, t.data);
}

double accumulate_gradient(const Model& model, std::span<const double> input, std::span<const double> target,
                           Workspace& ws, std::span<double> grad)
{
    if (grad.size() != model.params().size())
        throw ConsistencyError("gradient buffer size differs from parameter count");
    if (target.size() != model.spec().output_size())
        throw ConsistencyError("target length differs from model output");
    const auto probs = forward(model, input, ws);
    const double loss = cross_entropy(probs, target);

    const simd::KernelTable& k = simd::active();
    const double* p = model.params().data();
    double* g = grad.data();

    const auto& dense = model.dense_layers();
    const auto& conv = model.conv_layers();
    softmax_ce_gradient(probs, target, ws.dense_grad.back());

    for (std::size_t i = dense.size(); i-- > 0;) {
        const DenseLayout& l = dense[i];
        double* go = ws.dense_grad[i].data();
        // Hidden dense outputs went through relu.
        if (i + 1 < dense.size())
            for (int o = 0; o < l.out; ++o)
                if (!(ws.dense_out[i][o] > 0.0))
                    go[o] = 0.0;
        const double* x = i > 0 ? ws.dense_out[i - 1].data()
                                : (conv.empty() ? input.data() : ws.pool_out.back().data());
        double* gx = i > 0 ? ws.dense_grad[i - 1].data() : (conv.empty() ? nullptr : ws.pool_grad.back().data());
        if (gx)
            std::fill(gx, gx + l.in, 0.0);
        for (int o = 0; o < l.out; ++o) {
            const std::size_t row = l.weight + static_cast<std::size_t>(o) * l.in;
            g[l.bias + o] += go[o];
            k.axpy(go[o], x, g + row, static_cast<std::size_t>(l.in));
            if (gx)
                k.axpy(go[o], p + row, gx, static_cast<std::size_t>(l.in));
        }
    }

    for (std::size_t i = conv.size(); i-- > 0;) {
        const ConvLayout& l = conv[i];
        // Route pooled gradients back to the selected positions.
        auto& gc = ws.conv_grad[i];
        std::fill(gc.begin(), gc.end(), 0.0);
        const auto& arg = ws.pool_argmax[i];
        const auto& gp = ws.pool_grad[i];
        for (std::size_t j = 0; j < gp.size(); ++j)
            gc[arg[j]] += gp[j];
        const double* in = i > 0 ? ws.pool_out[i - 1].data() : input.data();
        double* gin = i > 0 ? ws.pool_grad[i - 1].data() : nullptr;
        conv_backward(l, p, in, ws.conv_out[i].data(), gc.data(), g, gin, k);
    }
    return loss;
}

} // namespace skyloss::nn
