// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"
#include "skyloss/network.hpp"

#include <json.hpp>

#include <algorithm>

namespace skyloss::nn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "skyloss-checkpoint-v1";

json spec_to_json(const ModelSpec& s)
{
    return {{"channels", s.channels}, {"height", s.height},  {"width", s.width},
            {"conv_channels", s.conv_channels}, {"dense", s.dense}, {"k", s.k}};
}

ModelSpec spec_from_json(const json& j)
{
    ModelSpec s;
    s.channels = j.at("channels").get<int>();
    s.height = j.at("height").get<int>();
    s.width = j.at("width").get<int>();
    s.conv_channels = j.at("conv_channels").get<std::vector<int>>();
    s.dense = j.at("dense").get<std::vector<int>>();
    s.k = j.at("k").get<int>();
    return s;
}

} // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt)
{
    const json header = {{"format", kFormat},
                         {"spec", spec_to_json(ckpt.model.spec())},
                         {"seed", ckpt.seed},
                         {"epoch", ckpt.epoch},
                         {"altitudes", ckpt.altitudes},
                         {"param_count", ckpt.model.params().size()}};
    const std::string text = header.dump() + "\n";
    std::vector<std::uint8_t> out(text.begin(), text.end());
    out.reserve(out.size() + 8 * ckpt.model.params().size());
    for (double v : ckpt.model.params())
        io::put_f64(out, v);
    return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes)
{
    const auto nl = std::find(bytes.begin(), bytes.end(), std::uint8_t{'\n'});
    if (nl == bytes.end())
        throw IoError("checkpoint header is not terminated");
    json header;
    try {
        header = json::parse(bytes.begin(), nl);
        if (header.at("format").get<std::string>() != kFormat)
            throw IoError("unsupported checkpoint format");
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed checkpoint header: ") + e.what());
    }
    const ModelSpec spec = spec_from_json(header.at("spec"));
    spec.validate();
    const std::size_t count = header.at("param_count").get<std::size_t>();
    const std::size_t offset = static_cast<std::size_t>(nl - bytes.begin()) + 1;
    if (count != spec.param_count() || bytes.size() - offset != 8 * count)
        throw IoError("checkpoint parameter block has the wrong size");
    std::vector<double> params(count);
    for (std::size_t i = 0; i < count; ++i)
        params[i] = io::get_f64(bytes.data() + offset + 8 * i);

    Checkpoint ckpt{Model(spec, std::move(params)), header.at("seed").get<std::uint64_t>(),
                    header.at("epoch").get<int>(), header.at("altitudes").get<std::vector<double>>()};
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path)
{
    io::write_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_bytes(path)); }

} // namespace skyloss::nn
