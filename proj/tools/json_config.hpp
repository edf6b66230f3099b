#pragma once

// JSON configuration files for the CLI. Top-level keys set global options;
// an object keyed by a subcommand name sets that subcommand's options. Values
// become option defaults, so anything given on the command line wins.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace discnls::cli {

using nlohmann::json;

class ConfigFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value of `--config` in argv, if any ("--config path" or "--config=path").
inline std::optional<std::string> find_config_path(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

inline std::string scalar_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigFileError("config key '" + where + "': expected a scalar or an array of scalars");
}

inline void apply_object(CLI::App& app, const json& obj, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    const std::string where = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      CLI::App* sub = nullptr;
      try {
        sub = app.get_subcommand(key);
      } catch (const CLI::OptionNotFound&) {
        throw ConfigFileError("config key '" + where + "': no such subcommand");
      }
      apply_object(*sub, value, where);
      continue;
    }
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr) throw ConfigFileError("config key '" + where + "': no such option");
    std::string text;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) text += ',';
        text += scalar_text(value[i], where);
      }
    } else {
      text = scalar_text(value, where);
    }
    try {
      if (opt->get_expected_max() == 0) {
        // Flag: only "true" switches it on.
        if (text == "true") opt->default_str("true");
        opt->default_val(text == "true");
      } else {
        opt->default_val(text);
      }
    } catch (const CLI::Error& e) {
      throw ConfigFileError("config key '" + where + "': " + e.what());
    }
  }
}

/// Parse `path` and install its values as option defaults on `app`.
/// Parse errors carry nlohmann's line/column position.
inline json apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigFileError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigFileError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigFileError("config file '" + path + "': top level must be an object");
  apply_object(app, doc, "");
  return doc;
}

}  // namespace discnls::cli
