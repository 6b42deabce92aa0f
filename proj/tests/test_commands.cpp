#include <sstream>

#include "doctest.h"
#include "pulsesync/commands.hpp"
#include "pulsesync/errors.hpp"

using namespace pulsesync;

namespace {

ScenarioConfig config(const std::string& text = "{}") { return parse_scenario_text(text); }

double cell(const ResultTable& t, const std::string& column, std::size_t row = 0) {
  return t.rows.at(row).at(t.column_index(column));
}

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("grids") {
  CHECK(make_grid({1, 3, 3, false}) == std::vector<double>{1, 2, 3});
  const auto g = make_grid({1e2, 1e4, 3, true});
  CHECK(g[1] == doctest::Approx(1e3));
  CHECK(g.front() == 1e2);
  CHECK(g.back() == 1e4);
  CHECK(make_grid({5, 9, 1, false}) == std::vector<double>{5});
  CHECK_THROWS_AS(make_grid({0, 1, 3, true}), ValidationError);
  CHECK_THROWS_AS(make_grid({0, 1, 0, false}), ValidationError);
}

TEST_CASE("analyze matches the corresponding sweep row") {
  const ScenarioConfig c = config();
  const ResultTable a = cmd_analyze(c);
  CHECK(cell(a, "ca_real") == doctest::Approx(0.9211127706994557).epsilon(1e-12));
  CHECK(cell(a, "extra_latency_s") == 0.0);
  const ResultTable s = cmd_sweep(c, SweepAxis::latency, {0.05, 0.2, 2, false});
  REQUIRE(s.rows.size() == 2);
  for (const auto& col : a.columns) CHECK(cell(a, col) == cell(s, col, 0));
  CHECK(cell(s, "ca_real", 1) == doctest::Approx(0.9715026140244499).epsilon(1e-12));
  CHECK(a.provenance.at(2).first == "scenario");
  CHECK(a.provenance.at(2).second == c.hash());
}

TEST_CASE("oscillator sweep carries the inaccuracy breakdown") {
  const ResultTable t = cmd_sweep(config(), SweepAxis::f_osc, {1e3, 1e5, 3, true});
  CHECK(cell(t, "f_osc", 1) == doctest::Approx(1e4));
  CHECK(cell(t, "timer_inaccuracy_s", 1) == doctest::Approx(857.7708764e-6).epsilon(1e-9));
}

TEST_CASE("simulate") {
  ScenarioConfig c = config(R"({"sim":{"superframes":50}})");
  const SimulateOutput out = cmd_simulate(c);
  CHECK(cell(out.table, "punctures_total") == 800);
  CHECK(cell(out.table, "ca_real") <= cell(out.table, "ca_empirical"));
  CHECK(!out.trace.events.empty());
}

TEST_CASE("baseline") {
  const ScenarioConfig c = config(R"({"baseline":{"trials":2000}})");
  const ResultTable single = cmd_baseline(c);
  CHECK(single.rows.size() == 1);
  CHECK(cell(single, "delta") == 0.1);
  const ResultTable swept = cmd_baseline(c, RangeSpec{0.01, 0.5, 8, true});
  CHECK(swept.rows.size() == 8);
  for (std::size_t i = 0; i < swept.rows.size(); ++i) {
    CHECK(cell(swept, "p_min_w", i) <= cell(swept, "p_mean_w", i));
    CHECK(cell(swept, "p_mean_w", i) <= cell(swept, "p_max_w", i));
  }
  CHECK_THROWS_AS(cmd_baseline(c, RangeSpec{0.1, 2.0, 3, false}), ValidationError);
}

TEST_CASE("compare") {
  const ResultTable t50 = cmd_compare(config(R"({"baseline":{"trials":5000}})"));
  const ResultTable t200 = cmd_compare(config(R"({"baseline":{"trials":5000},"system":{"latency_s":0.2}})"));
  CHECK(cell(t50, "saving") > 0.0);
  CHECK(cell(t200, "saving") > cell(t50, "saving"));
  CHECK(cell(t50, "extra_latency_hb_s") == 0.0);
  CHECK(cell(t50, "delta_opt") < 0.1);

  // Only the always-on baseline: the heartbeat scheme wins by a wide margin.
  const ResultTable worst = cmd_compare(config(R"({"baseline":{"trials":100}})"), RangeSpec{1, 1, 1, false});
  const double p_dc = 10e-6 + 10e-6 * 160e-6 / 0.05 + 20e-6 * 0.01 + 2 * 100e-9;
  CHECK(cell(worst, "p_dc_min_w") == doctest::Approx(p_dc));
  CHECK(cell(worst, "saving") == doctest::Approx(1.0 - 1.2888722930054429e-06 / p_dc));

  // A heart-period range makes the heartbeat side take its worst case.
  const ResultTable ranged = cmd_compare(config(R"({"baseline":{"trials":100},"sim":{"t_min_s":0.6,"t_max_s":1.2}})"));
  CHECK(cell(ranged, "p_hb_real_w") > cell(t50, "p_hb_real_w"));
}

TEST_CASE("outputs are reproducible") {
  const ScenarioConfig c = config(R"({"baseline":{"trials":500},"sim":{"superframes":20}})");
  CHECK(to_csv(cmd_baseline(c, RangeSpec{0.01, 0.5, 5, true})) == to_csv(cmd_baseline(c, RangeSpec{0.01, 0.5, 5, true})));
  CHECK(to_csv(cmd_simulate(c).table) == to_csv(cmd_simulate(c).table));
  const ResultTable t = cmd_baseline(c, RangeSpec{0.01, 0.5, 5, true});
  CHECK(to_svg(t, default_plot("baseline", t)) == to_svg(t, default_plot("baseline", t)));
}

}  // TEST_SUITE
