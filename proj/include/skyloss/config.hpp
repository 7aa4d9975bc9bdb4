// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include "skyloss/baselines.hpp"
#include "skyloss/dataset.hpp"
#include "skyloss/network.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace skyloss {

// Everything a pipeline run can be configured with. Files are flat JSON
// objects with dotted keys, e.g. {"scene.cell_size": 100, "train.epochs": 20};
// list-valued keys take a JSON array or a comma-separated string.
struct RunConfig {
    DatasetConfig dataset;
    std::vector<int> conv_channels{8, 16, 32, 32};
    std::vector<int> dense_hidden{256};
    nn::TrainConfig train;
    std::vector<double> thresholds{116.0, 119.0, 122.0, 125.0, 128.0};
    HataEnv hata_env = HataEnv::urban_small;
    unsigned threads = 0;

    nn::ModelSpec model_spec(int channels, int height, int width, int k) const;
    void validate() const;
};

// Every accepted key, in documentation order.
const std::vector<std::string_view>& config_keys();

// Applies a JSON document onto `config`. Unknown keys and ill-typed values
// throw ConfigError.
void apply_config_json(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

} // namespace skyloss
