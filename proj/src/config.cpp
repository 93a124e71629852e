#include "neckflex/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "neckflex/errors.hpp"

namespace neckflex {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ParseError(what); }

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) bad("unknown key '" + where + "." + key + "'");
  }
}

double num(const json& obj, const std::string& where, const std::string& key,
           double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) bad("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& where, const std::string& key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad("'" + where + "." + key + "' must be an integer");
  return v.get<int>();
}

Vec2 lever(const json& obj, const std::string& where, const std::string& key,
           Vec2 fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad("'" + where + "." + key + "' must be [x, z]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

// gap accepts a number or the string "inf" for the free-plate regime.
double gap_value(const json& obj, double fallback) {
  if (!obj.contains("gap_m")) return fallback;
  const auto& v = obj.at("gap_m");
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    bad("'bar_array.gap_m' string form must be \"inf\"");
  }
  if (!v.is_number()) bad("'bar_array.gap_m' must be a number or \"inf\"");
  return v.get<double>();
}

}  // namespace

void ToolkitConfig::validate() const {
  bar_array.validate();
  statics.validate();
  envelope.validate();
  segmentation.validate();
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());

  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }

  ToolkitConfig cfg;
  check_keys(root, "config",
             {"bar_array", "statics", "envelope", "segmentation"});

  if (root.contains("bar_array")) {
    const auto& b = root.at("bar_array");
    check_keys(b, "bar_array",
               {"bar_diameter_m", "free_length_m", "youngs_modulus_pa",
                "bar_count", "coupled_count", "triad_separation_m", "gap_m"});
    auto& s = cfg.bar_array;
    s.bar_diameter = num(b, "bar_array", "bar_diameter_m", s.bar_diameter);
    s.free_length = num(b, "bar_array", "free_length_m", s.free_length);
    s.youngs_modulus = num(b, "bar_array", "youngs_modulus_pa", s.youngs_modulus);
    s.bar_count = integer(b, "bar_array", "bar_count", s.bar_count);
    s.coupled_count = integer(b, "bar_array", "coupled_count", s.coupled_count);
    s.triad_separation =
        num(b, "bar_array", "triad_separation_m", s.triad_separation);
    s.gap = gap_value(b, s.gap);
  }

  if (root.contains("statics")) {
    const auto& b = root.at("statics");
    check_keys(b, "statics", {"head_weight_n", "com_lever_m", "base_lever_m"});
    auto& s = cfg.statics;
    s.head_weight = num(b, "statics", "head_weight_n", s.head_weight);
    s.com_lever = lever(b, "statics", "com_lever_m", s.com_lever);
    s.base_lever = lever(b, "statics", "base_lever_m", s.base_lever);
  }

  if (root.contains("envelope")) {
    const auto& b = root.at("envelope");
    check_keys(b, "envelope",
               {"sample_rate_hz", "filter_order", "band_low_hz", "band_high_hz",
                "window_s"});
    auto& s = cfg.envelope;
    s.sample_rate = num(b, "envelope", "sample_rate_hz", s.sample_rate);
    s.filter_order = integer(b, "envelope", "filter_order", s.filter_order);
    s.band_low = num(b, "envelope", "band_low_hz", s.band_low);
    s.band_high = num(b, "envelope", "band_high_hz", s.band_high);
    s.window = num(b, "envelope", "window_s", s.window);
  }

  if (root.contains("segmentation")) {
    const auto& b = root.at("segmentation");
    check_keys(b, "segmentation",
               {"hold_band_deg", "neutral_band_deg", "hold_min_s", "hold_max_s",
                "max_unmatched"});
    auto& s = cfg.segmentation;
    s.hold_band_deg = num(b, "segmentation", "hold_band_deg", s.hold_band_deg);
    s.neutral_band_deg =
        num(b, "segmentation", "neutral_band_deg", s.neutral_band_deg);
    s.hold_min = num(b, "segmentation", "hold_min_s", s.hold_min);
    s.hold_max = num(b, "segmentation", "hold_max_s", s.hold_max);
    s.max_unmatched = num(b, "segmentation", "max_unmatched", s.max_unmatched);
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError("invalid config " + path.string() + ": " + e.what());
  }
  return cfg;
}

void save_config(const std::filesystem::path& path, const ToolkitConfig& config) {
  json root;
  const auto& b = config.bar_array;
  root["bar_array"] = {
      {"bar_diameter_m", b.bar_diameter},
      {"free_length_m", b.free_length},
      {"youngs_modulus_pa", b.youngs_modulus},
      {"bar_count", b.bar_count},
      {"coupled_count", b.coupled_count},
      {"triad_separation_m", b.triad_separation},
  };
  if (std::isinf(b.gap)) {
    root["bar_array"]["gap_m"] = "inf";
  } else {
    root["bar_array"]["gap_m"] = b.gap;
  }
  const auto& s = config.statics;
  root["statics"] = {
      {"head_weight_n", s.head_weight},
      {"com_lever_m", {s.com_lever.x, s.com_lever.z}},
      {"base_lever_m", {s.base_lever.x, s.base_lever.z}},
  };
  const auto& e = config.envelope;
  root["envelope"] = {
      {"sample_rate_hz", e.sample_rate},   {"filter_order", e.filter_order},
      {"band_low_hz", e.band_low},         {"band_high_hz", e.band_high},
      {"window_s", e.window},
  };
  const auto& g = config.segmentation;
  root["segmentation"] = {
      {"hold_band_deg", g.hold_band_deg}, {"neutral_band_deg", g.neutral_band_deg},
      {"hold_min_s", g.hold_min},         {"hold_max_s", g.hold_max},
      {"max_unmatched", g.max_unmatched},
  };

  std::ofstream out(path);
  if (!out) bad("cannot write " + path.string());
  out << root.dump(2) << '\n';
}

}  // namespace neckflex
