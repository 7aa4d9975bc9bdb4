// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"
#include "skyloss/network.hpp"
#include "skyloss/parallel.hpp"
#include "skyloss/rng.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace skyloss::nn {

void TrainConfig::validate() const
{
    if (!(learning_rate >= 0.0))
        throw ConfigError("train.learning_rate must be non-negative");
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw ConfigError("train.momentum must lie in [0, 1)");
    if (batch_size < 1)
        throw ConfigError("train.batch_size must be at least 1");
    if (epochs < 0)
        throw ConfigError("train.epochs must be non-negative");
}

namespace {

// Per-sample gradients land in their own buffers and are summed in index
// order, so the result does not depend on the number of worker threads.
class BatchGradient {
public:
    BatchGradient(const ModelSpec& spec, std::size_t max_batch) : slots_(max_batch)
    {
        for (auto& s : slots_) {
            s.ws = std::make_unique<Workspace>(spec);
            s.grad.assign(spec.param_count(), 0.0);
        }
    }

    // Writes the batch-mean gradient into `out`; returns the per-sample losses.
    std::vector<double> run(const Model& model, std::span<const double* const> inputs,
                            std::span<const double* const> targets, std::span<double> out)
    {
        const std::size_t n = inputs.size();
        const std::size_t in_size = model.spec().input_size();
        const std::size_t out_size = model.spec().output_size();
        std::vector<double> losses(n, 0.0);
        parallel_for(n, [&](std::size_t i) {
            Slot& s = slots_[i];
            std::fill(s.grad.begin(), s.grad.end(), 0.0);
            losses[i] = accumulate_gradient(model, {inputs[i], in_size}, {targets[i], out_size}, *s.ws, s.grad);
        });
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < out.size(); ++j)
                out[j] += slots_[i].grad[j];
        const double scale = 1.0 / static_cast<double>(n);
        for (double& v : out)
            v *= scale;
        return losses;
    }

private:
    struct Slot {
        std::unique_ptr<Workspace> ws;
        std::vector<double> grad;
    };
    std::vector<Slot> slots_;
};

} // namespace

double batch_gradient(const Model& model, std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets, std::span<double> grad)
{
    if (inputs.size() != targets.size() || inputs.empty())
        throw ConsistencyError("batch_gradient: batch sizes differ or are empty");
    std::vector<const double*> in_ptr, tg_ptr;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].size() != model.spec().input_size() || targets[i].size() != model.spec().output_size())
            throw ConsistencyError("batch_gradient: sample shape mismatch");
        in_ptr.push_back(inputs[i].data());
        tg_ptr.push_back(targets[i].data());
    }
    BatchGradient bg(model.spec(), inputs.size());
    const auto losses = bg.run(model, in_ptr, tg_ptr, grad);
    return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
}

std::vector<double> evaluate_mse(const Model& model, std::span<const Sample> samples)
{
    const int k = model.spec().k;
    std::vector<double> mse(static_cast<std::size_t>(k), 0.0);
    if (samples.empty())
        return mse;
    std::vector<std::vector<double>> preds(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) { preds[i] = forward(model, samples[i].input); });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].target.size() != model.spec().output_size())
            throw ConsistencyError("evaluate_mse: target length differs from model output");
        for (int b = 0; b < k; ++b)
            for (int j = 0; j < kBins; ++j) {
                const std::size_t idx = static_cast<std::size_t>(b) * kBins + j;
                const double d = samples[i].target[idx] - preds[i][idx];
                mse[b] += d * d;
            }
    }
    for (double& v : mse)
        v /= static_cast<double>(samples.size() * kBins);
    return mse;
}

TrainResult train(Model model, std::span<const Sample> train_set, std::span<const Sample> test_set,
                  const TrainConfig& config, const EpochCallback& on_epoch)
{
    config.validate();
    if (train_set.empty())
        throw ConfigError("training set is empty");
    const ModelSpec& spec = model.spec();
    for (const auto& s : train_set)
        if (s.input.size() != spec.input_size() || s.target.size() != spec.output_size())
            throw ConsistencyError("training sample shape does not match the model");

    const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), train_set.size());
    BatchGradient bg(spec, batch);
    std::vector<double> grad(spec.param_count(), 0.0);
    std::vector<double> velocity(spec.param_count(), 0.0);
    std::vector<std::size_t> order(train_set.size());

    TrainResult result{std::move(model), {}};
    Model& m = result.model;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(split_seed(config.seed, static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            std::vector<const double*> in_ptr, tg_ptr;
            for (std::size_t i = start; i < end; ++i) {
                in_ptr.push_back(train_set[order[i]].input.data());
                tg_ptr.push_back(train_set[order[i]].target.data());
            }
            const auto losses = bg.run(m, in_ptr, tg_ptr, grad);
            for (double l : losses) {
                if (!std::isfinite(l))
                    throw TrainingError("training loss is not finite", epoch);
                loss_sum += l;
            }
            auto params = m.params();
            for (std::size_t j = 0; j < params.size(); ++j) {
                velocity[j] = config.momentum * velocity[j] - config.learning_rate * grad[j];
                params[j] += velocity[j];
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(order.size());
        if (!test_set.empty())
            rec.test_mse = evaluate_mse(m, test_set);
        result.history.push_back(rec);
        if (on_epoch)
            on_epoch(rec);
    }
    return result;
}

std::string history_csv(std::span<const EpochRecord> history, std::span<const double> altitudes)
{
    std::ostringstream out;
    out << "epoch,train_loss";
    for (double a : altitudes)
        out << ",test_mse_" << io::shortest(a) << "m";
    out << '\n';
    for (const auto& r : history) {
        out << r.epoch << ',' << io::significant(r.train_loss, 17);
        for (std::size_t b = 0; b < altitudes.size(); ++b) {
            out << ',';
            if (b < r.test_mse.size())
                out << io::significant(r.test_mse[b], 17);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace skyloss::nn
