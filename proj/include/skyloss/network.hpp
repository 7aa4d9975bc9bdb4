// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------
//
// Small convolutional regressor from a C x H x W image to K path-loss
// distributions (26 bins each). Layers: [conv3x3 pad1 -> relu -> maxpool2]
// per conv block, flatten, dense layers with relu between them, and a final
// dense layer of 26K logits normalized by an independent softmax per
// altitude block. Everything is 64-bit.

#pragma once

#include "skyloss/histogram.hpp"
#include "skyloss/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace skyloss::nn {

inline constexpr double kLogGuard = 1e-12;

struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape_);
    std::size_t size() const noexcept { return data.size(); }
};

Tensor to_tensor(const RasterImage& image);

struct ModelSpec {
    int channels = 3;
    int height = 64;
    int width = 64;
    std::vector<int> conv_channels{8, 16, 32, 32};
    std::vector<int> dense{256, 4 * kBins}; // last entry must be 26 * k
    int k = 4;

    // Default architecture for the given input and altitude count.
    static ModelSpec make_default(int channels, int height, int width, int k);

    void validate() const;
    std::size_t output_size() const noexcept { return static_cast<std::size_t>(k) * kBins; }
    std::size_t input_size() const noexcept { return static_cast<std::size_t>(channels) * height * width; }
    std::size_t param_count() const;

    // Layer-by-layer shape trace, e.g. "conv1 3x64x64 -> 8x64x64".
    std::vector<std::string> shape_trace() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ConvLayout {
    int in_c, out_c, h, w;        // input channels, output channels, spatial size before pooling
    std::size_t weight, bias;     // offsets into the parameter vector; weights [out][in][3][3]

    friend bool operator==(const ConvLayout&, const ConvLayout&) = default;
};

struct DenseLayout {
    int in, out;
    std::size_t weight, bias; // weights [out][in]

    friend bool operator==(const DenseLayout&, const DenseLayout&) = default;
};

class Model {
public:
    Model(ModelSpec spec, std::vector<double> params);

    const ModelSpec& spec() const noexcept { return spec_; }
    std::span<const double> params() const noexcept { return params_; }
    std::span<double> params() noexcept { return params_; }
    const std::vector<ConvLayout>& conv_layers() const noexcept { return conv_; }
    const std::vector<DenseLayout>& dense_layers() const noexcept { return dense_; }

    friend bool operator==(const Model&, const Model&) = default;

private:
    ModelSpec spec_;
    std::vector<double> params_;
    std::vector<ConvLayout> conv_;
    std::vector<DenseLayout> dense_;
};

// He-uniform fan-in initialization of weights, zero biases.
Model init_params(const ModelSpec& spec, std::uint64_t seed);

// Independent softmax over each 26-logit block.
void block_softmax(std::span<const double> logits, std::span<double> probs);

// Sum over blocks and bins of -t log(p + 1e-12) for one sample. Throws
// ConsistencyError on length mismatch or negative target mass.
double cross_entropy(std::span<const double> pred, std::span<const double> target);

// Mean of cross_entropy over a batch.
double batch_loss(std::span<const std::vector<double>> preds, std::span<const std::vector<double>> targets);

// d cross_entropy / d logits for the guarded loss, given softmax output p.
void softmax_ce_gradient(std::span<const double> probs, std::span<const double> target, std::span<double> grad);

// Per-sample scratch space, reused across calls.
class Workspace {
public:
    explicit Workspace(const ModelSpec& spec);

private:
    friend std::span<const double> forward(const Model&, std::span<const double>, Workspace&);
    friend double accumulate_gradient(const Model&, std::span<const double>, std::span<const double>, Workspace&,
                                      std::span<double>);

    std::vector<std::vector<double>> conv_out;           // post-relu, per block
    std::vector<std::vector<std::uint32_t>> pool_argmax; // flat index into conv_out
    std::vector<std::vector<double>> pool_out;
    std::vector<std::vector<double>> dense_out; // post-relu for hidden layers, logits for the last
    std::vector<double> probs;
    std::vector<std::vector<double>> conv_grad, pool_grad, dense_grad;
};

// Probabilities, 26K values; valid until the next call with `ws`.
std::span<const double> forward(const Model& model, std::span<const double> input, Workspace& ws);
std::vector<double> forward(const Model& model, std::span<const double> input);
std::vector<double> forward(const Model& model, const RasterImage& image);

// Forward + backward for one sample. Adds d loss / d params into `grad`
// (size param_count) and returns the loss.
double accumulate_gradient(const Model& model, std::span<const double> input, std::span<const double> target,
                           Workspace& ws, std::span<double> grad);

// Gradient of the batch-mean loss; returns the mean loss.
double batch_gradient(const Model& model, std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets, std::span<double> grad);

struct TrainConfig {
    double learning_rate = 1e-4;
    double momentum = 0.7;
    int batch_size = 8;
    int epochs = 50;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Sample {
    std::vector<double> input;  // C*H*W
    std::vector<double> target; // 26K
};

struct EpochRecord {
    int epoch = 0;                 // 1-based
    double train_loss = 0.0;       // mean per-sample loss over the epoch
    std::vector<double> test_mse;  // per altitude; empty without a test set
};

struct TrainResult {
    Model model;
    std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch SGD with classical momentum: v <- mu v - lr grad, theta <- theta + v.
// The sample order is reshuffled each epoch from (seed, epoch). Throws
// TrainingError when the loss stops being finite.
TrainResult train(Model model, std::span<const Sample> train_set, std::span<const Sample> test_set,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

// Per-altitude MSE of the model over `samples`.
std::vector<double> evaluate_mse(const Model& model, std::span<const Sample> samples);

struct Checkpoint {
    Model model;
    std::uint64_t seed = 0;
    int epoch = 0;
    std::vector<double> altitudes;
};

// One JSON header line {format, spec, seed, epoch, altitudes, param_count},
// a newline, then the parameters as little-endian doubles in layer order.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string history_csv(std::span<const EpochRecord> history, std::span<const double> altitudes);

} // namespace skyloss::nn
