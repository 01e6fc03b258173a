#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>

#include "eitqhe/csv.hpp"
#include "eitqhe/error.hpp"

namespace cli {

using eitqhe::Error;
using eitqhe::ErrorKind;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20240817;

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// key=value lines; blank lines and '#' comments are skipped.
inline std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = eitqhe::csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::UsageError, fmt::format("{}:{}: expected key=value", path, lineno));
    }
    out.emplace_back(eitqhe::csv::trim(text.substr(0, eq)), eitqhe::csv::trim(text.substr(eq + 1)));
  }
  return out;
}

/// Splices `--config FILE` entries in front of the subcommand's own flags so
/// that flags given on the command line take precedence.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty() || args.size() < 2) return args;
  std::vector<std::string> injected;
  for (const auto& [k, v] : read_key_values(path)) injected.push_back(fmt::format("--{}={}", k, v));
  args.insert(args.begin() + 2, injected.begin(), injected.end());
  return args;
}

/// Resolved option values of one subcommand, sorted by name.
inline std::map<std::string, std::string> resolved_options(const CLI::App& sub) {
  static const std::vector<std::string> skip{"help", "config", "force", "meta"};
  std::map<std::string, std::string> out;
  for (const auto* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    out[name] = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
  }
  return out;
}

inline std::string config_hash(const std::string& command, const std::map<std::string, std::string>& opts) {
  std::string canon = command + '\n';
  for (const auto& [k, v] : opts) canon += k + '=' + v + '\n';
  return fmt::format("{:016x}", fnv1a64(canon));
}

inline void write_meta(const std::string& path, const std::string& command,
                       const std::map<std::string, std::string>& opts) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  const auto seed = opts.find("seed");
  out << fmt::format("command={}\n", command);
  out << fmt::format("config_hash=fnv1a64:{}\n", config_hash(command, opts));
  out << fmt::format("seed={}\n", seed == opts.end() ? "none" : seed->second);
  out << fmt::format("version={}\n", kVersion);
  out << fmt::format("fmt={}.{}.{}\n", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100);
  out << fmt::format("eigen={}.{}.{}\n", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  out << fmt::format("cli11={}\n", CLI11_VERSION);
  out << fmt::format("compiler={}\n", __VERSION__);
  for (const auto& [k, v] : opts) out << fmt::format("option.{}={}\n", k, v);
}

inline bool same_file(const std::string& a, const std::string& b) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

/// Refuses to write an output over one of the inputs unless forced.
inline void guard_outputs(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs, bool force) {
  if (force) return;
  for (const auto& o : outputs) {
    for (const auto& i : inputs) {
      if (!o.empty() && !i.empty() && same_file(o, i)) {
        throw Error(ErrorKind::UsageError, fmt::format("output {} would overwrite input {} (use --force)", o, i));
      }
    }
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const auto& f : eitqhe::csv::split(text)) {
    const auto item = eitqhe::csv::trim(f);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(item, &used));
      } else if constexpr (std::is_same_v<T, std::size_t>) {
        out.push_back(static_cast<std::size_t>(std::stoull(item, &used)));
      } else if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item, &used));
      } else {
        out.push_back(item);
        used = item.size();
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::UsageError, fmt::format("bad {} list entry '{}'", what, item));
    }
  }
  if (out.empty()) throw Error(ErrorKind::UsageError, fmt::format("empty {} list", what));
  return out;
}

/// "Z:A,Z:A"
inline std::vector<std::pair<int, int>> parse_atoms(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  for (const auto& item : parse_list<std::string>(text, "atom")) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(item);
      std::size_t u1 = 0, u2 = 0;
      const int z = std::stoi(item.substr(0, colon), &u1);
      const int a = std::stoi(item.substr(colon + 1), &u2);
      if (u1 != colon || u2 != item.size() - colon - 1) throw std::invalid_argument(item);
      out.emplace_back(z, a);
    } catch (const std::exception&) {
      throw Error(ErrorKind::UsageError, fmt::format("atom '{}' is not Z:A", item));
    }
  }
  return out;
}

}  // namespace cli
