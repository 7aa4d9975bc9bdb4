// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skyloss::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Shortest decimal that parses back to the same double.
std::string shortest(double v);
// printf-style fixed / significant-digit formatting.
std::string fixed(double v, int decimals);
std::string significant(double v, int digits);

// Little-endian packing helpers.
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);
void put_f64(std::vector<std::uint8_t>& out, double v);
std::uint16_t get_u16(const std::uint8_t* p);
float get_f32(const std::uint8_t* p);
double get_f64(const std::uint8_t* p);

// Comma-separated numbers, e.g. "40,80,120". Throws ConfigError naming `what`.
std::vector<double> parse_number_list(std::string_view text, std::string_view what);

} // namespace skyloss::io
