#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "camp/errors.hpp"
#include "camp/format.hpp"

namespace camp::cli {

std::string option_name(std::string key) {
  for (auto& c : key) {
    if (c == '.' || c == '_') {
      c = '-';
    } else {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return key;
}

std::vector<std::string> config_file_args(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::vector<std::string> args;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    const auto text = trim(std::string_view(line).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(number) + ": empty key");
    args.push_back("--" + option_name(std::string(key)) + "=" + std::string(value));
  }
  return args;
}

Json resolved_config(const CLI::App& command) {
  Json out = Json::object();
  for (const CLI::Option* opt : command.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "threads") continue;
    if (opt->get_type_size() == 0) {
      out[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    if (opt->count() > 0) {
      const auto& results = opt->results();
      std::string joined;
      for (std::size_t k = 0; k < results.size(); ++k) {
        if (k > 0) joined += ',';
        joined += results[k];
      }
      // Only the last occurrence counts for single-valued options.
      out[name] = opt->get_expected_max() <= 1 && !results.empty() ? results.back() : joined;
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

}  // namespace camp::cli
