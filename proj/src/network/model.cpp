// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/errors.hpp"
#include "skyloss/network.hpp"
#include "skyloss/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skyloss::nn {

Tensor::Tensor(std::vector<std::size_t> shape_)
    : shape(std::move(shape_)),
      data(std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>()), 0.0)
{
}

Tensor to_tensor(const RasterImage& image)
{
    Tensor t({static_cast<std::size_t>(image.channels), static_cast<std::size_t>(image.height),
              static_cast<std::size_t>(image.width)});
    std::copy(image.data.begin(), image.data.end(), t.data.begin());
    return t;
}

ModelSpec ModelSpec::make_default(int channels, int height, int width, int k)
{
    ModelSpec s;
    s.channels = channels;
    s.height = height;
    s.width = width;
    s.k = k;
    s.dense = {256, k * kBins};
    return s;
}

void ModelSpec::validate() const
{
    if (channels < 1 || height < 1 || width < 1)
        throw ConfigError("model input dimensions must be positive");
    if (k < 1)
        throw ConfigError("model needs at least one altitude block");
    const int pool = 1 << conv_channels.size();
    if (height % pool != 0 || width % pool != 0)
        throw ConfigError("input " + std::to_string(height) + "x" + std::to_string(width) + " is not divisible by " +
                          std::to_string(pool) + " for " + std::to_string(conv_channels.size()) + " pooling stages");
    for (int c : conv_channels)
        if (c < 1)
            throw ConfigError("conv channel counts must be positive");
    if (dense.empty())
        throw ConfigError("model needs at least the output dense layer");
    for (int d : dense)
        if (d < 1)
            throw ConfigError("dense widths must be positive");
    if (static_cast<std::size_t>(dense.back()) != output_size())
        throw ConfigError("final dense width " + std::to_string(dense.back()) + " must equal 26 * k = " +
                          std::to_string(output_size()));
}

std::size_t ModelSpec::param_count() const
{
    std::size_t n = 0;
    int in_c = channels;
    for (int c : conv_channels) {
        n += static_cast<std::size_t>(c) * in_c * 9 + c;
        in_c = c;
    }
    const int pool = 1 << conv_channels.size();
    std::size_t in = static_cast<std::size_t>(in_c) * (height / pool) * (width / pool);
    for (int d : dense) {
        n += static_cast<std::size_t>(d) * in + d;
        in = static_cast<std::size_t>(d);
    }
    return n;
}

std::vector<std::string> ModelSpec::shape_trace() const
{
    validate();
    auto chw = [](int c, int h, int w) {
        return std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w);
    };
    std::vector<std::string> trace;
    int c = channels, h = height, w = width;
    for (std::size_t i = 0; i < conv_channels.size(); ++i) {
        const std::string id = std::to_string(i + 1);
        trace.push_back("conv" + id + " " + chw(c, h, w) + " -> " + chw(conv_channels[i], h, w));
        c = conv_channels[i];
        trace.push_back("pool" + id + " " + chw(c, h, w) + " -> " + chw(c, h / 2, w / 2));
        h /= 2;
        w /= 2;
    }
    int in = c * h * w;
    trace.push_back("flatten " + chw(c, h, w) + " -> " + std::to_string(in));
    for (std::size_t i = 0; i < dense.size(); ++i) {
        trace.push_back("dense" + std::to_string(i + 1) + " " + std::to_string(in) + " -> " +
                        std::to_string(dense[i]));
        in = dense[i];
    }
    trace.push_back("block-softmax " + std::to_string(in) + " -> " + std::to_string(k) + "x" + std::to_string(kBins));
    return trace;
}

Model::Model(ModelSpec spec, std::vector<double> params) : spec_(std::move(spec)), params_(std::move(params))
{
    spec_.validate();
    if (params_.size() != spec_.param_count())
        throw ConsistencyError("model expects " + std::to_string(spec_.param_count()) + " parameters, got " +
                               std::to_string(params_.size()));
    std::size_t off = 0;
    int in_c = spec_.channels, h = spec_.height, w = spec_.width;
    for (int c : spec_.conv_channels) {
        ConvLayout l{in_c, c, h, w, off, off + static_cast<std::size_t>(c) * in_c * 9};
        off = l.bias + c;
        conv_.push_back(l);
        in_c = c;
        h /= 2;
        w /= 2;
    }
    int in = in_c * h * w;
    for (int d : spec_.dense) {
        DenseLayout l{in, d, off, off + static_cast<std::size_t>(d) * in};
        off = l.bias + d;
        dense_.push_back(l);
        in = d;
    }
}

Model init_params(const ModelSpec& spec, std::uint64_t seed)
{
    spec.validate();
    std::vector<double> params(spec.param_count(), 0.0);
    Model shape(spec, params);
    Rng rng(seed);
    auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i)
            params[offset + i] = rng.uniform(-limit, limit);
    };
    for (const auto& l : shape.conv_layers())
        fill(l.weight, static_cast<std::size_t>(l.out_c) * l.in_c * 9, static_cast<std::size_t>(l.in_c) * 9);
    for (const auto& l : shape.dense_layers())
        fill(l.weight, static_cast<std::size_t>(l.out) * l.in, static_cast<std::size_t>(l.in));
    return Model(spec, std::move(params));
}

void block_softmax(std::span<const double> logits, std::span<double> probs)
{
    if (logits.size() % kBins != 0 || probs.size() != logits.size())
        throw ConsistencyError("block_softmax: length must be a multiple of 26");
    for (std::size_t b = 0; b < logits.size(); b += kBins) {
        const auto z = logits.subspan(b, kBins);
        const double m = *std::max_element(z.begin(), z.end());
        double s = 0.0;
        for (int i = 0; i < kBins; ++i) {
            probs[b + i] = std::exp(z[i] - m);
            s += probs[b + i];
        }
        for (int i = 0; i < kBins; ++i)
            probs[b + i] /= s;
    }
}

double cross_entropy(std::span<const double> pred, std::span<const double> target)
{
    if (pred.size() != target.size() || pred.size() % kBins != 0)
        throw ConsistencyError("cross_entropy: prediction and target shapes differ");
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (target[i] < 0.0)
            throw ConsistencyError("cross_entropy: negative target mass");
        if (target[i] > 0.0)
            loss -= target[i] * std::log(pred[i] + kLogGuard);
    }
    return loss;
}

double batch_loss(std::span<const std::vector<double>> preds, std::span<const std::vector<double>> targets)
{
    if (preds.size() != targets.size() || preds.empty())
        throw ConsistencyError("batch_loss: batch sizes differ or are empty");
    double s = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        s += cross_entropy(preds[i], targets[i]);
    return s / static_cast<double>(preds.size());
}

void softmax_ce_gradient(std::span<const double> probs, std::span<const double> target, std::span<double> grad)
{
    // L = -sum_i t_i log(p_i + eps); dL/dz_j = p_j S - t_j p_j / (p_j + eps),
    // S = sum_i t_i p_i / (p_i + eps). Reduces to p - t for normalized t and eps -> 0.
    for (std::size_t b = 0; b < probs.size(); b += kBins) {
        double s = 0.0;
        for (int i = 0; i < kBins; ++i)
            s += target[b + i] * probs[b + i] / (probs[b + i] + kLogGuard);
        for (int i = 0; i < kBins; ++i) {
            const double p = probs[b + i];
            grad[b + i] = p * s - target[b + i] * p / (p + kLogGuard);
        }
    }
}

} // namespace skyloss::nn
