// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/config.hpp"

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <string>

namespace skyloss {

using nlohmann::json;

namespace {

double as_double(const json& v, const std::string& key)
{
    if (!v.is_number())
        throw ConfigError(key + ": expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& key)
{
    if (!v.is_number_integer())
        throw ConfigError(key + ": expected an integer");
    return v.get<int>();
}

std::uint64_t as_seed(const json& v, const std::string& key)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError(key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<double> as_list(const json& v, const std::string& key)
{
    if (v.is_string())
        return io::parse_number_list(v.get<std::string>(), key);
    if (!v.is_array())
        throw ConfigError(key + ": expected an array or a comma-separated string");
    std::vector<double> out;
    for (const auto& x : v)
        out.push_back(as_double(x, key));
    return out;
}

std::vector<int> as_int_list(const json& v, const std::string& key)
{
    std::vector<int> out;
    for (double d : as_list(v, key)) {
        if (d != static_cast<int>(d))
            throw ConfigError(key + ": expected integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;

const std::vector<std::pair<std::string_view, Setter>>& setters()
{
    static const std::vector<std::pair<std::string_view, Setter>> table = {
        {"scene.extent", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.scene.extent = as_double(v, k); }},
        {"scene.cell_size", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.scene.cell_size = as_double(v, k); }},
        {"scene.footprint_min", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.scene.footprint_min = as_double(v, k); }},
        {"scene.footprint_max", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.scene.footprint_max = as_double(v, k); }},
        {"scene.h_max", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.scene.h_max = as_double(v, k); }},
        {"scene.p_building_min", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.p_building_min = as_double(v, k); }},
        {"scene.p_building_max", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.p_building_max = as_double(v, k); }},
        {"scene.gamma_min", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.gamma_min = as_double(v, k); }},
        {"scene.gamma_max", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.gamma_max = as_double(v, k); }},
        {"grid.n", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.grid_n = as_int(v, k); }},
        {"grid.rx_height", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.rx_height = as_double(v, k); }},
        {"tx.frequency_hz", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.tx.frequency = as_double(v, k); }},
        {"tx.power_dbm", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.tx.tx_power_dbm = as_double(v, k); }},
        {"tx.sensitivity_dbm", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.tx.rx_sensitivity_dbm = as_double(v, k); }},
        {"tx.altitudes", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.altitudes = as_list(v, k); }},
        {"nlos.eta_los", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.nlos.eta_los = as_double(v, k); }},
        {"nlos.eta_per_blockage", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.nlos.eta_per_blockage = as_double(v, k); }},
        {"nlos.eta_cap", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.nlos.eta_cap = as_double(v, k); }},
        {"raster.channels", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.raster_channels = as_int(v, k); }},
        {"raster.height", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.raster_height = as_int(v, k); }},
        {"raster.width", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.raster_width = as_int(v, k); }},
        {"dataset.regions", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.n_regions = as_int(v, k); }},
        {"dataset.seed", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.master_seed = as_seed(v, k); }},
        {"dataset.train_fraction", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.train_fraction = as_double(v, k); }},
        {"dataset.split_seed", [](RunConfig& c, const json& v, const std::string& k) { c.dataset.split_seed = as_seed(v, k); }},
        {"network.conv_channels", [](RunConfig& c, const json& v, const std::string& k) { c.conv_channels = as_int_list(v, k); }},
        {"network.dense_hidden", [](RunConfig& c, const json& v, const std::string& k) { c.dense_hidden = as_int_list(v, k); }},
        {"train.learning_rate", [](RunConfig& c, const json& v, const std::string& k) { c.train.learning_rate = as_double(v, k); }},
        {"train.momentum", [](RunConfig& c, const json& v, const std::string& k) { c.train.momentum = as_double(v, k); }},
        {"train.batch_size", [](RunConfig& c, const json& v, const std::string& k) { c.train.batch_size = as_int(v, k); }},
        {"train.epochs", [](RunConfig& c, const json& v, const std::string& k) { c.train.epochs = as_int(v, k); }},
        {"train.seed", [](RunConfig& c, const json& v, const std::string& k) { c.train.seed = as_seed(v, k); }},
        {"coverage.thresholds", [](RunConfig& c, const json& v, const std::string& k) { c.thresholds = as_list(v, k); }},
        {"baseline.hata_env", [](RunConfig& c, const json& v, const std::string& k) {
             if (!v.is_string())
                 throw ConfigError(k + ": expected a string");
             c.hata_env = parse_hata_env(v.get<std::string>());
         }},
        {"threads", [](RunConfig& c, const json& v, const std::string& k) {
             const int n = as_int(v, k);
             if (n < 0)
                 throw ConfigError(k + ": must be non-negative");
             c.threads = static_cast<unsigned>(n);
         }},
    };
    return table;
}

} // namespace

nn::ModelSpec RunConfig::model_spec(int channels, int height, int width, int k) const
{
    nn::ModelSpec s;
    s.channels = channels;
    s.height = height;
    s.width = width;
    s.k = k;
    s.conv_channels = conv_channels;
    s.dense = dense_hidden;
    s.dense.push_back(k * kBins);
    return s;
}

void RunConfig::validate() const
{
    dataset.validate();
    train.validate();
    if (thresholds.empty())
        throw ConfigError("coverage.thresholds must not be empty");
    model_spec(dataset.raster_channels, dataset.raster_height, dataset.raster_width,
               static_cast<int>(dataset.altitudes.size()))
        .validate();
}

const std::vector<std::string_view>& config_keys()
{
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> k;
        for (const auto& [name, _] : setters())
            k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_config_json(RunConfig& config, std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        const auto& table = setters();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (it == table.end())
            throw ConfigError("unknown config key '" + key + "'");
        try {
            it->second(config, value, key);
        } catch (const json::exception& e) {
            throw ConfigError(key + ": " + e.what());
        }
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path)
{
    apply_config_json(config, io::read_text(path));
}

} // namespace skyloss
