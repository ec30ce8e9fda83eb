#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apdens/io.hpp"
#include "apdens/solver.hpp"

namespace apdens {

struct BadConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
  return std::string(s.substr(begin, end - begin));
}

inline double parse_double(const std::string& key, const std::string& value) {
  if (value == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double out = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw BadConfig("config key '" + key + "': bad number '" + value + "'");
  }
}

inline std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw BadConfig("config key '" + key + "': bad integer '" + value + "'");
  }
  return out;
}

inline std::vector<ParameterPool::Pair> parse_pool(const std::string& key,
                                                   const std::string& value) {
  std::vector<ParameterPool::Pair> pairs;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw BadConfig("config key '" + key + "': expected cr:f pairs, got '" + item + "'");
    }
    ParameterPool::Pair pair;
    pair.cr = parse_double(key, trim(item.substr(0, colon)));
    pair.f = parse_double(key, trim(item.substr(colon + 1)));
    pairs.push_back(pair);
  }
  if (pairs.empty()) throw BadConfig("config key '" + key + "': empty pool");
  return pairs;
}

}  // namespace detail

/// Parses flat `key = value` text (# starts a comment) into an ordered map.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw BadConfig("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw BadConfig("config line " + std::to_string(line_no) + ": empty key");
    }
    entries[key] = value;
  }
  return entries;
}

/// Applies parsed entries onto a config. Unknown keys are rejected by name.
inline SolverConfig apply_config_entries(SolverConfig cfg,
                                         const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) {
    if (key == "np_max") {
      cfg.np_max = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "np_min") {
      cfg.np_min = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "k") {
      cfg.k = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "min_subpop") {
      cfg.min_subpop = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "s_size") {
      cfg.s_size = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "cc") {
      cfg.cc = detail::parse_double(key, value);
    } else if (key == "p_frac") {
      cfg.p_frac = detail::parse_double(key, value);
    } else if (key == "delta") {
      cfg.delta = detail::parse_double(key, value);
    } else if (key == "fes_max") {
      cfg.fes_max = static_cast<std::uint64_t>(detail::parse_int(key, value));
    } else if (key == "cht") {
      if (value == "sf") {
        cfg.comparator.kind = Cht::SF;
      } else if (value == "ec") {
        cfg.comparator.kind = Cht::EC;
      } else if (value == "sp") {
        cfg.comparator.kind = Cht::SP;
      } else {
        throw BadConfig("config key 'cht': expected sf|ec|sp, got '" + value + "'");
      }
    } else if (key == "epsilon") {
      cfg.comparator.epsilon = detail::parse_double(key, value);
    } else if (key == "variant") {
      if (value == "auto") {
        cfg.variant = Variant::Auto;
      } else if (value == "ns") {
        cfg.variant = Variant::NS;
      } else if (value == "ns-l") {
        cfg.variant = Variant::NSL;
      } else {
        throw BadConfig("config key 'variant': expected auto|ns|ns-l, got '" + value + "'");
      }
    } else if (key == "pool") {
      cfg.pool = detail::parse_pool(key, value);
    } else if (key == "lp") {
      cfg.lp = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
    } else if (key == "trace_every") {
      cfg.trace_every = static_cast<int>(detail::parse_int(key, value));
    } else {
      throw BadConfig("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

inline SolverConfig load_config_file(const std::string& path, SolverConfig base = {}) {
  std::ifstream file(path);
  if (!file) throw BadConfig("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return apply_config_entries(base, parse_config_text(buffer.str()));
}

/// The effective configuration in the same flat format parse accepts;
/// parse(dump(cfg)) reproduces cfg exactly.
inline std::string dump_config(const SolverConfig& cfg) {
  std::string out;
  const auto add = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  add("np_max", std::to_string(cfg.np_max));
  add("np_min", std::to_string(cfg.np_min));
  add("k", std::to_string(cfg.k));
  add("min_subpop", std::to_string(cfg.min_subpop));
  add("s_size", std::to_string(cfg.s_size));
  add("cc", format_double(cfg.cc));
  add("p_frac", format_double(cfg.p_frac));
  add("delta", format_double(cfg.delta));
  add("fes_max", std::to_string(cfg.fes_max));
  add("cht", cfg.comparator.kind == Cht::SF ? "sf" : (cfg.comparator.kind == Cht::EC ? "ec" : "sp"));
  add("epsilon", cfg.comparator.epsilon == std::numeric_limits<double>::infinity()
                     ? "inf"
                     : format_double(cfg.comparator.epsilon));
  add("variant",
      cfg.variant == Variant::Auto ? "auto" : (cfg.variant == Variant::NS ? "ns" : "ns-l"));
  std::string pool;
  for (const auto& pair : cfg.pool) {
    if (!pool.empty()) pool += ',';
    pool += format_double(pair.cr) + ":" + format_double(pair.f);
  }
  add("pool", pool);
  add("lp", std::to_string(cfg.lp));
  add("seed", std::to_string(cfg.seed));
  add("trace_every", std::to_string(cfg.trace_every));
  return out;
}

}  // namespace apdens
