#include "pulsesync/scenario_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "pulsesync/errors.hpp"

namespace pulsesync {

using nlohmann::json;

namespace {

// Reads one section of the document, remembering which keys were consumed so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (doc.contains(name_)) {
      node_ = &doc.at(name_);
      if (!node_->is_object()) fail(name_, "must be an object");
    }
  }

  double number(const std::string& key, double fallback, const std::function<bool(double)>& ok, const char* rule) {
    used_.insert(key);
    if (!node_ || !node_->contains(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_number()) fail(path(key), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || !ok(x)) fail(path(key), rule);
    return x;
  }

  std::optional<double> optional_number(const std::string& key, const std::function<bool(double)>& ok,
                                        const char* rule) {
    used_.insert(key);
    if (!node_ || !node_->contains(key) || node_->at(key).is_null()) return std::nullopt;
    return number(key, 0.0, ok, rule);
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback, std::uint64_t min_value) {
    used_.insert(key);
    if (!node_ || !node_->contains(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(path(key), "must be a non-negative integer");
    const auto x = v.get<std::uint64_t>();
    if (x < min_value) fail(path(key), ("must be >= " + std::to_string(min_value)).c_str());
    return x;
  }

  bool flag(const std::string& key, bool fallback) {
    used_.insert(key);
    if (!node_ || !node_->contains(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_boolean()) fail(path(key), "must be true or false");
    return v.get<bool>();
  }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items())
      if (!used_.count(key)) fail(path(key), "unknown key");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& rule) {
    throw ValidationError(where + ": " + rule);
  }

 private:
  std::string path(const std::string& key) const { return name_ + "." + key; }

  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> used_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto non_negative = [](double x) { return x >= 0.0; };

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("scenario document must be a JSON object");
  static const std::set<std::string> kSections{"oscillator", "channel", "link", "power", "system",
                                               "baseline",   "sim",     "leaves"};
  for (const auto& [key, value] : doc.items())
    if (!kSections.count(key)) Section::fail(key, "unknown section");

  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;

  Section osc(doc, "oscillator");
  const double f = osc.number("f_osc_hz", 10e3, positive, "must be > 0");
  const double sigma = osc.number("sigma_s", 1e-6, non_negative, "must be >= 0");
  const double drift = osc.number("drift_ppm", 500.0, non_negative, "must be >= 0");
  const bool ideal = osc.flag("ideal_counter", false);
  osc.reject_unknown();
  s.osc = OscillatorSpec(f, sigma, drift, ideal);

  Section ch(doc, "channel");
  const double d = ch.number("distance_m", 0.15, non_negative, "must be >= 0");
  const double v = ch.number("v_hb_mps", BodyChannel::kDefaultSpeed, positive, "must be > 0");
  ch.reject_unknown();
  s.channel = BodyChannel(d, v);

  Section link(doc, "link");
  s.link.data_rate = link.number("data_rate_bps", 100e3, positive, "must be > 0");
  s.link.data_gen = link.number("data_gen_bps", 1e3, non_negative, "must be >= 0");
  s.link.wb_bits = link.number("wb_bits", 16, [](double x) { return x >= 1.0; }, "must be >= 1");
  link.reject_unknown();
  if (s.link.data_gen > s.link.data_rate) Section::fail("link.data_gen_bps", "must not exceed link.data_rate_bps");

  Section power(doc, "power");
  s.power.p_hbd = power.number("p_hbd_w", 100e-9, non_negative, "must be >= 0");
  s.power.p_timer = power.number("p_timer_w", 100e-9, non_negative, "must be >= 0");
  s.power.e_tx = power.number("e_tx_j_per_bit", 100e-12, non_negative, "must be >= 0");
  s.power.e_rx = power.number("e_rx_j_per_bit", 100e-12, non_negative, "must be >= 0");
  power.reject_unknown();

  Section sys(doc, "system");
  s.n_leaves = static_cast<int>(sys.count("n_leaves", 1, 0));
  s.superframe = sys.number("superframe_s", 0.8, positive, "must be > 0");
  s.latency = sys.number("latency_s", 0.05, positive, "must be > 0");
  s.include_listen_window = sys.flag("include_listen_window", false);
  s.listen_window = sys.number("listen_window_s", 1e-3, non_negative, "must be >= 0");
  sys.reject_unknown();
  if (s.latency > s.superframe) Section::fail("system.latency_s", "must not exceed system.superframe_s");
  if (s.listen_window > s.superframe) Section::fail("system.listen_window_s", "must not exceed system.superframe_s");

  if (doc.contains("leaves")) {
    const json& leaves = doc.at("leaves");
    if (!leaves.is_array()) Section::fail("leaves", "must be an array");
    if (leaves.size() > static_cast<std::size_t>(s.n_leaves)) Section::fail("leaves", "more entries than system.n_leaves");
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      json wrapper = {{"leaves[" + std::to_string(i) + "]", leaves[i]}};
      Section leaf(wrapper, "leaves[" + std::to_string(i) + "]");
      LeafOverride o;
      o.distance_m = leaf.optional_number("distance_m", non_negative, "must be >= 0");
      o.latency_s = leaf.optional_number(
          "latency_s", [&](double x) { return x > 0.0 && x <= s.superframe; }, "must be in (0, system.superframe_s]");
      o.data_gen_bps = leaf.optional_number(
          "data_gen_bps", [&](double x) { return x >= 0.0 && x <= s.link.data_rate; },
          "must be in [0, link.data_rate_bps]");
      leaf.reject_unknown();
      s.leaves.push_back(o);
    }
  }

  Section base(doc, "baseline");
  cfg.baseline.delta = base.number("delta", 0.1, [](double x) { return x > 0.0 && x <= 1.0; }, "must be in (0, 1]");
  cfg.baseline.gap_s = base.optional_number("gap_s", non_negative, "must be >= 0");
  cfg.baseline.trials = base.count("trials", 10000, 1);
  cfg.baseline.retry_prob =
      base.number("retry_prob", 0.0, [](double x) { return x >= 0.0 && x < 1.0; }, "must be in [0, 1)");
  base.reject_unknown();

  Section sim(doc, "sim");
  cfg.sim.superframes = sim.count("superframes", 1000, 1);
  cfg.sim.seed = sim.count("seed", 1, 0);
  cfg.sim.t_min_s = sim.optional_number("t_min_s", positive, "must be > 0");
  cfg.sim.t_max_s = sim.optional_number("t_max_s", positive, "must be > 0");
  sim.reject_unknown();
  if (cfg.sim.t_min_s.has_value() != cfg.sim.t_max_s.has_value())
    Section::fail("sim", "t_min_s and t_max_s must be given together");
  if (cfg.sim.t_min_s && *cfg.sim.t_min_s > *cfg.sim.t_max_s) Section::fail("sim.t_min_s", "must not exceed sim.t_max_s");
  if (cfg.sim.t_max_s && s.latency > *cfg.sim.t_min_s)
    Section::fail("sim.t_min_s", "must be >= system.latency_s so a puncture fits");

  s.validate();
  return cfg;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed scenario document: ") + e.what());
  }
  return scenario_from_json(doc);
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario_text(buf.str());
}

json ScenarioConfig::to_json() const {
  const Scenario& s = scenario;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json doc = {
      {"oscillator",
       {{"f_osc_hz", s.osc.f_osc()},
        {"sigma_s", s.osc.sigma()},
        {"drift_ppm", s.osc.drift_ppm()},
        {"ideal_counter", s.osc.ideal_counter()}}},
      {"channel", {{"distance_m", s.channel.distance()}, {"v_hb_mps", s.channel.v_hb()}}},
      {"link", {{"data_rate_bps", s.link.data_rate}, {"data_gen_bps", s.link.data_gen}, {"wb_bits", s.link.wb_bits}}},
      {"power",
       {{"p_hbd_w", s.power.p_hbd},
        {"p_timer_w", s.power.p_timer},
        {"e_tx_j_per_bit", s.power.e_tx},
        {"e_rx_j_per_bit", s.power.e_rx}}},
      {"system",
       {{"n_leaves", s.n_leaves},
        {"superframe_s", s.superframe},
        {"latency_s", s.latency},
        {"include_listen_window", s.include_listen_window},
        {"listen_window_s", s.listen_window}}},
      {"baseline",
       {{"delta", baseline.delta},
        {"gap_s", opt(baseline.gap_s)},
        {"trials", baseline.trials},
        {"retry_prob", baseline.retry_prob}}},
      {"sim",
       {{"superframes", sim.superframes},
        {"seed", sim.seed},
        {"t_min_s", opt(sim.t_min_s)},
        {"t_max_s", opt(sim.t_max_s)}}},
  };
  if (!s.leaves.empty()) {
    json leaves = json::array();
    for (const auto& o : s.leaves)
      leaves.push_back({{"distance_m", opt(o.distance_m)},
                        {"latency_s", opt(o.latency_s)},
                        {"data_gen_bps", opt(o.data_gen_bps)}});
    doc["leaves"] = leaves;
  }
  return doc;
}

std::string ScenarioConfig::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DutyCycleConfig ScenarioConfig::duty_cycle() const {
  DutyCycleConfig c;
  c.delta = baseline.delta;
  c.gap = baseline.gap_s;
  c.link = scenario.link;
  c.power = scenario.power;
  c.t_lat = scenario.latency;
  c.n_leaves = scenario.n_leaves;
  c.retry_prob = baseline.retry_prob;
  return c;
}

SimOptions ScenarioConfig::sim_options() const {
  SimOptions o;
  o.n_superframes = sim.superframes;
  o.seed = sim.seed;
  o.t_min = sim.t_min_s;
  o.t_max = sim.t_max_s;
  return o;
}

std::pair<double, double> ScenarioConfig::period_range() const {
  if (sim.t_min_s) return {*sim.t_min_s, *sim.t_max_s};
  return {scenario.superframe, scenario.superframe};
}

}  // namespace pulsesync
