#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pulsesync/scenario_file.hpp"
#include "pulsesync/table.hpp"

namespace pulsesync {

struct RangeSpec {
  double from = 0.0;
  double to = 0.0;
  int points = 1;
  bool log = false;
};

// Evenly spaced (or geometric, for log) values from..to inclusive.
std::vector<double> make_grid(const RangeSpec& range);

ResultTable cmd_analyze(const ScenarioConfig& config);
ResultTable cmd_sweep(const ScenarioConfig& config, SweepAxis axis, const RangeSpec& range);

struct SimulateOutput {
  ResultTable table;
  SimTrace trace;
};
SimulateOutput cmd_simulate(const ScenarioConfig& config);

// Without a range, evaluates the single duty-cycle ratio from the scenario.
ResultTable cmd_baseline(const ScenarioConfig& config, const std::optional<RangeSpec>& deltas = std::nullopt);

// Without a range, searches delta over a log grid from 0.5% to 50%.
ResultTable cmd_compare(const ScenarioConfig& config, const std::optional<RangeSpec>& deltas = std::nullopt);

RangeSpec default_compare_deltas();

// Plot used when a command is asked for SVG output.
PlotSpec default_plot(const std::string& command, const ResultTable& table);

}  // namespace pulsesync
