#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "pulsesync/analytic.hpp"
#include "pulsesync/baseline.hpp"
#include "pulsesync/eventsim.hpp"

namespace pulsesync {

struct BaselineSection {
  double delta = 0.1;
  std::optional<double> gap_s;  // defaults to one beacon time
  std::uint64_t trials = 10000;
  double retry_prob = 0.0;
};

struct SimSection {
  std::uint64_t superframes = 1000;
  std::uint64_t seed = 1;
  std::optional<double> t_min_s;
  std::optional<double> t_max_s;
};

// A fully resolved scenario document: every key present, defaults applied.
struct ScenarioConfig {
  Scenario scenario;
  BaselineSection baseline;
  SimSection sim;

  nlohmann::json to_json() const;
  // FNV-1a 64 of the canonical JSON text, as 16 hex digits.
  std::string hash() const;

  DutyCycleConfig duty_cycle() const;
  SimOptions sim_options() const;
  // Heart period range used for worst-case comparisons: [t_min, t_max], or
  // the fixed superframe.
  std::pair<double, double> period_range() const;
};

ScenarioConfig scenario_from_json(const nlohmann::json& doc);
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig parse_scenario(const std::filesystem::path& path);

}  // namespace pulsesync
