// pulsesync command-line front end.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pulsesync/commands.hpp"
#include "pulsesync/errors.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitModel = 3;

struct CommonFlags {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

struct RangeFlags {
  std::optional<double> from;
  std::optional<double> to;
  int points = 20;
  bool log = false;

  std::optional<pulsesync::RangeSpec> spec() const {
    if (!from && !to) return std::nullopt;
    if (!from || !to) throw pulsesync::ValidationError("--from and --to must be given together");
    return pulsesync::RangeSpec{*from, *to, points, log};
  }
};

std::string env_name(const std::string& flag) {
  std::string name = "PULSESYNC_";
  for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file (built-in defaults when omitted)")
      ->envname(env_name("scenario"));
  cmd->add_option("--out", f.out, "Output file (stdout when omitted)")->envname(env_name("out"));
  cmd->add_option("--seed", f.seed, "RNG seed, overrides sim.seed")->envname(env_name("seed"));
  cmd->add_option("--format", f.format, "csv or svg")
      ->envname(env_name("format"))
      ->check(CLI::IsMember({"csv", "svg"}));
}

void add_range(CLI::App* cmd, RangeFlags& r, const std::string& what) {
  cmd->add_option("--from", r.from, "First " + what)->envname(env_name("from"));
  cmd->add_option("--to", r.to, "Last " + what)->envname(env_name("to"));
  cmd->add_option("--points", r.points, "Number of grid points")->envname(env_name("points"));
  cmd->add_flag("--log", r.log, "Geometric spacing")->envname(env_name("log"));
}

pulsesync::ScenarioConfig load(const CommonFlags& f) {
  pulsesync::ScenarioConfig cfg =
      f.scenario.empty() ? pulsesync::parse_scenario_text("{}") : pulsesync::parse_scenario(f.scenario);
  if (f.seed) cfg.sim.seed = *f.seed;
  return cfg;
}

void emit(const std::string& command, const pulsesync::ResultTable& table, const CommonFlags& f) {
  if (f.format == "svg")
    pulsesync::write_output(f.out, pulsesync::to_svg(table, pulsesync::default_plot(command, table)));
  else
    pulsesync::write_output(f.out, pulsesync::to_csv(table));
  if (table.columns.back() == "saturated")
    for (const auto& row : table.rows)
      if (row.back() != 0.0) {
        std::cerr << "warning: some points saturated (channel availability clamped to 0)\n";
        break;
      }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heartbeat-synchronized body area network timing, availability and power toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pulsesync::kToolVersion);

  CommonFlags common;
  RangeFlags range;

  auto* analyze = app.add_subcommand("analyze", "Closed-form metrics for one operating point");
  add_common(analyze, common);

  auto* sweep = app.add_subcommand("sweep", "Closed-form metrics over one swept parameter");
  add_common(sweep, common);
  std::string axis;
  sweep->add_option("--axis", axis, "superframe, latency, n_leaves, distance, f_osc, drift_ppm or sigma")
      ->envname(env_name("axis"))
      ->required();
  add_range(sweep, range, "axis value");

  auto* simulate = app.add_subcommand("simulate", "Stochastic event simulation of drifting node clocks");
  add_common(simulate, common);
  std::string trace_path;
  std::optional<std::uint64_t> superframes;
  simulate->add_option("--trace", trace_path, "Write the event trace to this file")->envname(env_name("trace"));
  simulate->add_option("--superframes", superframes, "Overrides sim.superframes")->envname(env_name("superframes"));

  std::optional<std::uint64_t> trials;
  auto* baseline = app.add_subcommand("baseline", "Monte Carlo duty-cycled wake-up receiver baseline");
  add_common(baseline, common);
  add_range(baseline, range, "duty-cycle ratio");
  baseline->add_option("--trials", trials, "Overrides baseline.trials")->envname(env_name("trials"));

  auto* compare = app.add_subcommand("compare", "Heartbeat scheme against the best duty-cycled baseline");
  add_common(compare, common);
  add_range(compare, range, "duty-cycle ratio");
  compare->add_option("--trials", trials, "Overrides baseline.trials")->envname(env_name("trials"));

  auto* plot = app.add_subcommand("plot", "Render a CSV result table as SVG");
  std::string plot_in, plot_out;
  pulsesync::PlotSpec spec;
  std::string err_lo, err_hi;
  plot->add_option("--in", plot_in, "CSV table")->envname(env_name("in"))->required();
  plot->add_option("--out", plot_out, "SVG file (stdout when omitted)")->envname(env_name("out"));
  plot->add_option("--x", spec.x, "x column")->required();
  plot->add_option("--y", spec.y, "y columns")->delimiter(',')->required();
  plot->add_option("--err-lo", err_lo, "Lower error-bar column for the first y series");
  plot->add_option("--err-hi", err_hi, "Upper error-bar column for the first y series");
  plot->add_flag("--log", spec.log_x, "Logarithmic x axis");
  plot->add_flag("--log-y", spec.log_y, "Logarithmic y axis");
  plot->add_option("--title", spec.title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (analyze->parsed()) {
      emit("analyze", pulsesync::cmd_analyze(load(common)), common);
    } else if (sweep->parsed()) {
      const auto r = range.spec();
      if (!r) throw pulsesync::ValidationError("sweep needs --from and --to");
      emit("sweep", pulsesync::cmd_sweep(load(common), pulsesync::parse_axis(axis), *r), common);
    } else if (simulate->parsed()) {
      auto cfg = load(common);
      if (superframes) cfg.sim.superframes = *superframes;
      const auto out = pulsesync::cmd_simulate(cfg);
      if (!trace_path.empty()) pulsesync::write_output(trace_path, out.trace.to_string());
      emit("simulate", out.table, common);
    } else if (baseline->parsed()) {
      auto cfg = load(common);
      if (trials) cfg.baseline.trials = *trials;
      emit("baseline", pulsesync::cmd_baseline(cfg, range.spec()), common);
    } else if (compare->parsed()) {
      auto cfg = load(common);
      if (trials) cfg.baseline.trials = *trials;
      emit("compare", pulsesync::cmd_compare(cfg, range.spec()), common);
    } else if (plot->parsed()) {
      std::ifstream in(plot_in, std::ios::binary);
      if (!in) throw pulsesync::ValidationError("cannot read '" + plot_in + "'");
      const pulsesync::ResultTable table = pulsesync::read_csv(in);
      if (!err_lo.empty()) spec.err_lo = err_lo;
      if (!err_hi.empty()) spec.err_hi = err_hi;
      pulsesync::write_output(plot_out, pulsesync::to_svg(table, spec));
    }
  } catch (const pulsesync::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModel;
  }
  return 0;
}
