#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <CLI/CLI11.hpp>

#include "camp/serialization.hpp"

namespace camp::cli {

/// Reads a flat `key = value` file ('#' starts a comment) and turns each
/// entry into a `--key=value` argument. Keys are lowercased and '.' / '_'
/// become '-', so `camp.K = 3` reads as `--camp-k=3`.
std::vector<std::string> config_file_args(const std::filesystem::path& path);

/// Long option name a config key maps to, without the leading dashes.
std::string option_name(std::string key);

/// Every option of `command` with its effective value (given or default),
/// in declaration order. Help, config and thread options are left out.
Json resolved_config(const CLI::App& command);

}  // namespace camp::cli
