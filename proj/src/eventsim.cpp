#include "pulsesync/eventsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>
#include <variant>

#include "pulsesync/errors.hpp"
#include "pulsesync/format.hpp"
#include "pulsesync/rng.hpp"

namespace pulsesync {

// ---------------------------------------------------------------------------
// NodeClock

NodeClock::NodeClock(int id, const OscillatorSpec& osc, double realized_drift_ppm, std::uint64_t seed)
    : id_(id), osc_(osc), realized_drift_ppm_(realized_drift_ppm), rng_(seed) {
  if (std::abs(realized_drift_ppm) > osc.drift_ppm())
    throw ValidationError("realized drift exceeds the oscillator drift bound");
}

void NodeClock::reset(double true_time, double skew) {
  last_reset_ = true_time;
  skew_ = skew;
  accumulated_ = 0.0;
  cycles_ = 0;
  last_elapsed_ = 0.0;
}

ClockReading NodeClock::advance(double nominal_elapsed) {
  if (!(nominal_elapsed >= 0.0)) throw ValidationError("clock elapsed time must be >= 0");
  if (nominal_elapsed < last_elapsed_) throw ValidationError("clock queried backwards since its last reset");
  const double f = osc_.f_osc();
  const long long n = std::llround(f * nominal_elapsed);
  const long long new_cycles = std::max(0LL, n - cycles_);
  // One normal draw per query regardless of sigma, so runs that differ only
  // in sigma consume identical random streams.
  const double z = normal_(rng_);
  accumulated_ += osc_.sigma() * std::sqrt(static_cast<double>(new_cycles)) * z;
  cycles_ = std::max(cycles_, n);
  last_elapsed_ = nominal_elapsed;

  ClockReading r;
  r.jitter = accumulated_;
  r.raw = nominal_elapsed * (1.0 + realized_drift_ppm_ * 1e-6) + accumulated_;
  r.quantized = std::floor(r.raw * f + 1e-9) / f;
  return r;
}

double NodeClock::fire_time(double nominal_elapsed) {
  const ClockReading r = advance(nominal_elapsed);
  return last_reset_ + nominal_elapsed - (r.quantized - nominal_elapsed);
}

// ---------------------------------------------------------------------------
// Event vocabulary and trace I/O

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kKindNames{{
    {EventKind::heartbeat, "heartbeat"},
    {EventKind::timer_tick, "timer_tick"},
    {EventKind::tx_start, "tx_start"},
    {EventKind::tx_end, "tx_end"},
    {EventKind::rx_open, "rx_open"},
    {EventKind::rx_close, "rx_close"},
    {EventKind::hit, "hit"},
    {EventKind::miss, "miss"},
}};

constexpr std::string_view kTraceHeader = "kind,true_time,node,superframe,puncture";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string_view event_kind_name(EventKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

EventKind parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw ModelError("unknown trace event kind '" + std::string(name) + "'");
}

double SimTrace::total_time() const {
  double t = 0.0;
  for (double p : periods) t += p;
  return t;
}

void SimTrace::write(std::ostream& out) const {
  out << "# pulsesync trace v1\n";
  for (std::size_t k = 0; k < periods.size(); ++k) out << "# period," << k << ',' << format_double(periods[k]) << '\n';
  out << kTraceHeader << '\n';
  for (const auto& e : events)
    out << event_kind_name(e.kind) << ',' << format_double(e.true_time) << ',' << e.node << ',' << e.superframe << ','
        << e.puncture << '\n';
}

std::string SimTrace::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

SimTrace SimTrace::read(std::istream& in) {
  SimTrace trace;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# period,", 0) == 0) {
      const auto f = split(line, ',');
      if (f.size() != 3) throw ModelError("malformed trace period line: " + line);
      if (parse_integer(f[1]) != static_cast<long long>(trace.periods.size()))
        throw ModelError("trace periods out of order");
      trace.periods.push_back(parse_double(f[2]));
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_seen) {
      if (line != kTraceHeader) throw ModelError("trace header missing");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 5) throw ModelError("malformed trace record: " + line);
    SimEvent e;
    e.kind = parse_event_kind(f[0]);
    e.true_time = parse_double(f[1]);
    e.node = static_cast<int>(parse_integer(f[2]));
    e.superframe = parse_integer(f[3]);
    e.puncture = static_cast<int>(parse_integer(f[4]));
    trace.events.push_back(e);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Trace accounting, shared by the live run and by recomputation

namespace {

using PunctureKey = std::tuple<std::int64_t, int, int>;  // superframe, leaf, puncture

struct Interval {
  std::optional<double> begin;
  std::optional<double> end;

  bool complete() const { return begin && end; }
  double length() const { return *end - *begin; }
};

struct PunctureRecord {
  Interval tx;
  Interval rx;
  std::optional<bool> hit;
};

class MetricsAccumulator {
 public:
  void add(const SimEvent& e) {
    if (e.true_time < last_time_) throw ModelError("malformed trace: event times decrease");
    last_time_ = e.true_time;
    if (e.kind == EventKind::heartbeat || e.kind == EventKind::timer_tick) return;
    if (e.kind != EventKind::rx_open && e.kind != EventKind::rx_close && e.puncture == 0)
      throw ModelError("malformed trace: listening window carries a transmission event");
    PunctureRecord& r = records_[{e.superframe, e.node, e.puncture}];
    switch (e.kind) {
      case EventKind::tx_start: set(r.tx.begin, e, "tx_start"); break;
      case EventKind::tx_end:
        if (!r.tx.begin) throw ModelError("malformed trace: tx_end without tx_start");
        set(r.tx.end, e, "tx_end");
        break;
      case EventKind::rx_open: set(r.rx.begin, e, "rx_open"); break;
      case EventKind::rx_close:
        if (!r.rx.begin) throw ModelError("malformed trace: rx_close without rx_open");
        set(r.rx.end, e, "rx_close");
        break;
      case EventKind::hit:
      case EventKind::miss:
        if (r.hit) throw ModelError("malformed trace: puncture resolved twice");
        r.hit = e.kind == EventKind::hit;
        break;
      default: break;
    }
  }

  EmpiricalMetrics finish(const Scenario& s, double total_time) const {
    if (!(total_time > 0.0)) throw ModelError("malformed trace: no superframes recorded");
    EmpiricalMetrics m;
    m.total_time = total_time;
    double wait_sum = 0.0;
    for (const auto& [key, r] : records_) {
      if ((r.tx.begin && !r.tx.end) || (r.rx.begin && !r.rx.end))
        throw ModelError("malformed trace: unterminated interval");
      const bool listening = std::get<2>(key) == 0;
      if (r.tx.complete()) m.tx_time += r.tx.length();
      if (r.rx.complete()) m.rx_time += r.rx.length();
      if (listening) continue;
      m.occupied_time += union_length(r.tx, r.rx);
      if (r.hit) {
        ++m.punctures_total;
        if (*r.hit) ++m.punctures_hit;
        const double tx_len = r.tx.complete() ? r.tx.length() : 0.0;
        const double rx_len = r.rx.complete() ? r.rx.length() : 0.0;
        wait_sum += std::max(0.0, rx_len - tx_len);
      }
    }
    m.hit_rate = m.punctures_total == 0 ? 1.0
                                        : static_cast<double>(m.punctures_hit) / static_cast<double>(m.punctures_total);
    m.mean_rx_wait = m.punctures_total == 0 ? 0.0 : wait_sum / static_cast<double>(m.punctures_total);
    m.ca_empirical = std::clamp(1.0 - m.occupied_time / total_time, 0.0, 1.0);
    const double nodes = static_cast<double>(s.n_leaves) + 1.0;
    m.energy = nodes * (s.power.p_hbd + s.power.p_timer) * total_time + s.power.p_tx(s.link) * m.tx_time +
               s.power.p_rx(s.link) * m.rx_time;
    m.p_empirical = m.energy / total_time;
    return m;
  }

 private:
  static void set(std::optional<double>& slot, const SimEvent& e, const char* what) {
    if (slot) throw ModelError(std::string("malformed trace: duplicate ") + what);
    slot = e.true_time;
  }

  static double union_length(const Interval& a, const Interval& b) {
    const bool ha = a.complete();
    const bool hb = b.complete();
    if (ha && hb) {
      const double overlap = std::max(0.0, std::min(*a.end, *b.end) - std::max(*a.begin, *b.begin));
      return a.length() + b.length() - overlap;
    }
    if (ha) return a.length();
    if (hb) return b.length();
    return 0.0;
  }

  double last_time_ = -INFINITY;
  std::map<PunctureKey, PunctureRecord> records_;
};

}  // namespace

EmpiricalMetrics empirical_metrics(const SimTrace& trace, const Scenario& scenario) {
  MetricsAccumulator acc;
  for (const auto& e : trace.events) acc.add(e);
  return acc.finish(scenario, trace.total_time());
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

struct HeartbeatArrival { std::int64_t k; };
struct Detection { int node; std::int64_t k; };
struct LeafFire { int leaf; std::int64_t k; int j; };
struct TxEnd { int leaf; std::int64_t k; int j; };
struct RxOpen { int leaf; std::int64_t k; int j; };
struct RxDeadline { int leaf; std::int64_t k; int j; };
struct ListenClose { int leaf; std::int64_t k; };

using Action = std::variant<HeartbeatArrival, Detection, LeafFire, TxEnd, RxOpen, RxDeadline, ListenClose>;

// Transmission edges within this distance of a window edge count as inside;
// absorbs rounding between independently accumulated absolute times.
constexpr double kEdgeResolution = 1e-12;

// Ties at equal time: windows open first and deadlines expire last, so
// window edges are inclusive.
int rank(const Action& a) {
  if (std::holds_alternative<RxOpen>(a)) return 0;
  if (std::holds_alternative<RxDeadline>(a)) return 2;
  return 1;
}

struct Pending {
  double time;
  int rank;
  std::uint64_t seq;
  Action action;
};

struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.seq > b.seq;
  }
};

struct LeafPlan {
  LeafProfile profile;
  PunctureSchedule schedule;
  std::vector<double> fire_at;  // nominal elapsed of each puncture (t_j + serialization offset)
  std::vector<double> margin;   // M_S(t_j)
};

struct WindowState {
  double open = 0.0;
  double close = 0.0;
  std::optional<double> tx_start;
  bool tx_done = false;
  bool window_open = false;
  bool resolved = false;
};

class Simulator {
 public:
  Simulator(const Scenario& s, const SimOptions& o) : s_(s), o_(o) {
    s_.validate();
    if (o.n_superframes < 1) throw ValidationError("simulation needs at least one superframe");
    if (o.t_min.has_value() != o.t_max.has_value())
      throw ValidationError("heart-rate range needs both t_min and t_max");
    if (o.t_min && !(*o.t_min > 0.0 && *o.t_min <= *o.t_max))
      throw ValidationError("heart-rate range must satisfy 0 < t_min <= t_max");
    const double base = o.t_max.value_or(s.superframe);
    heart_rng_.seed(sub_seed(o.seed, 0));

    for (int leaf = 0; leaf < s.n_leaves; ++leaf) {
      LeafPlan plan{s.leaf(leaf), {}, {}, {}};
      plan.schedule = build_schedule(base, plan.profile.latency, plan.profile.data_gen, s.link.data_rate);
      plans_.push_back(std::move(plan));
    }
    for (int leaf = 0; leaf < s.n_leaves; ++leaf) {
      LeafPlan& plan = plans_[static_cast<std::size_t>(leaf)];
      for (double t : plan.schedule.instants) {
        double offset = 0.0;
        for (int prior = 0; prior < leaf; ++prior) {
          const LeafPlan& p = plans_[static_cast<std::size_t>(prior)];
          offset += p.schedule.tx_per_puncture + 2.0 * sync_margin(s.osc, p.profile.channel, t).m_s;
        }
        plan.fire_at.push_back(t + offset);
        plan.margin.push_back(sync_margin(s.osc, plan.profile.channel, t).m_s);
      }
    }
    for (int node = 0; node <= s.n_leaves; ++node) {
      std::mt19937_64 aux(sub_seed(o.seed, 2 * static_cast<std::uint64_t>(node) + 2));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double drift = (2.0 * unit(aux) - 1.0) * s.osc.drift_ppm();
      clocks_.emplace_back(node, s.osc, drift, sub_seed(o.seed, 2 * static_cast<std::uint64_t>(node) + 1));
      aux_.push_back(aux);
    }
  }

  SimResult run() {
    schedule(0.0, HeartbeatArrival{0});
    while (!queue_.empty()) {
      const Pending p = queue_.top();
      queue_.pop();
      now_ = p.time;
      std::visit([this](const auto& a) { handle(a); }, p.action);
    }
    SimResult result;
    result.metrics = acc_.finish(s_, trace_.total_time());
    result.trace = std::move(trace_);
    return result;
  }

 private:
  void schedule(double time, Action a) { queue_.push(Pending{time, rank(a), seq_++, a}); }

  void emit(EventKind kind, int node, std::int64_t k, int j) {
    const SimEvent e{kind, now_, node, k, j};
    acc_.add(e);
    trace_.events.push_back(e);
  }

  double skew_bound(int node) const {
    const BodyChannel& ch = node == 0 ? s_.channel : plans_[static_cast<std::size_t>(node - 1)].profile.channel;
    return heartbeat_skew(ch);
  }

  void handle(const HeartbeatArrival& a) {
    double period = s_.superframe;
    if (o_.t_min) period = *o_.t_min + (*o_.t_max - *o_.t_min) * std::uniform_real_distribution<double>(0.0, 1.0)(heart_rng_);
    periods_.push_back(period);
    beats_.push_back(now_);
    trace_.periods.push_back(period);
    for (int node = 0; node <= s_.n_leaves; ++node) {
      const double skew = std::uniform_real_distribution<double>(0.0, 1.0)(aux_[static_cast<std::size_t>(node)]) *
                          skew_bound(node);
      schedule(now_ + skew, Detection{node, a.k});
    }
    if (static_cast<std::uint64_t>(a.k + 1) < o_.n_superframes) schedule(now_ + period, HeartbeatArrival{a.k + 1});
  }

  bool in_superframe(const LeafPlan& plan, std::int64_t k, int j) const {
    return plan.schedule.instants[static_cast<std::size_t>(j)] <= periods_[static_cast<std::size_t>(k)];
  }

  void handle(const Detection& d) {
    NodeClock& clock = clocks_[static_cast<std::size_t>(d.node)];
    emit(EventKind::heartbeat, d.node, d.k, -1);
    clock.reset(now_, now_ - heartbeat_time(d.k));
    if (d.node == 0) {
      plan_hub_windows(clock, d.k);
      return;
    }
    const int leaf = d.node - 1;
    const LeafPlan& plan = plans_[static_cast<std::size_t>(leaf)];
    if (s_.include_listen_window && s_.listen_window > 0.0) {
      emit(EventKind::rx_open, d.node, d.k, 0);
      schedule(now_ + s_.listen_window, ListenClose{leaf, d.k});
    }
    for (int j = 0; j < plan.schedule.n_p; ++j) {
      if (!in_superframe(plan, d.k, j)) break;
      schedule(clock.fire_time(plan.fire_at[static_cast<std::size_t>(j)]), LeafFire{leaf, d.k, j});
    }
  }

  double heartbeat_time(std::int64_t k) const { return beats_[static_cast<std::size_t>(k)]; }

  void plan_hub_windows(NodeClock& hub, std::int64_t k) {
    struct Query {
      double elapsed;
      int leaf;
      int j;
      double width;
    };
    std::vector<Query> queries;
    for (int leaf = 0; leaf < s_.n_leaves; ++leaf) {
      const LeafPlan& plan = plans_[static_cast<std::size_t>(leaf)];
      for (int j = 0; j < plan.schedule.n_p; ++j) {
        if (!in_superframe(plan, k, j)) break;
        const double target = plan.fire_at[static_cast<std::size_t>(j)];
        const double m = plan.margin[static_cast<std::size_t>(j)];
        const double open_at = std::max(0.0, target - m);
        queries.push_back({open_at, leaf, j, target + plan.schedule.tx_per_puncture + m - open_at});
      }
    }
    std::stable_sort(queries.begin(), queries.end(),
                     [](const Query& a, const Query& b) { return a.elapsed < b.elapsed; });
    for (const auto& q : queries) {
      const double open = hub.fire_time(q.elapsed);
      WindowState& w = windows_[{k, q.leaf, q.j}];
      w.open = open;
      w.close = open + q.width;
      schedule(open, RxOpen{q.leaf, k, q.j});
    }
  }

  void handle(const LeafFire& f) {
    const int node = f.leaf + 1;
    emit(EventKind::timer_tick, node, f.k, f.j + 1);
    emit(EventKind::tx_start, node, f.k, f.j + 1);
    windows_[{f.k, f.leaf, f.j}].tx_start = now_;
    schedule(now_ + plans_[static_cast<std::size_t>(f.leaf)].schedule.tx_per_puncture, TxEnd{f.leaf, f.k, f.j});
  }

  void handle(const TxEnd& t) {
    const int node = t.leaf + 1;
    emit(EventKind::tx_end, node, t.k, t.j + 1);
    const auto it = windows_.find({t.k, t.leaf, t.j});
    WindowState& w = it->second;
    w.tx_done = true;
    if (!w.resolved && w.window_open && *w.tx_start >= w.open - kEdgeResolution && now_ <= w.close + kEdgeResolution) {
      emit(EventKind::hit, node, t.k, t.j + 1);
      emit(EventKind::rx_close, node, t.k, t.j + 1);
      w.resolved = true;
    }
    if (w.resolved) windows_.erase(it);
  }

  void handle(const RxOpen& r) {
    const int node = r.leaf + 1;
    emit(EventKind::timer_tick, 0, r.k, r.j + 1);
    emit(EventKind::rx_open, node, r.k, r.j + 1);
    WindowState& w = windows_[{r.k, r.leaf, r.j}];
    w.window_open = true;
    schedule(w.close + kEdgeResolution, RxDeadline{r.leaf, r.k, r.j});
  }

  void handle(const RxDeadline& r) {
    const auto it = windows_.find({r.k, r.leaf, r.j});
    if (it == windows_.end() || it->second.resolved) return;
    const int node = r.leaf + 1;
    emit(EventKind::miss, node, r.k, r.j + 1);
    emit(EventKind::rx_close, node, r.k, r.j + 1);
    it->second.resolved = true;
    it->second.window_open = false;
    // Keep the state until tx_end if the leaf is still transmitting.
    if (it->second.tx_done) windows_.erase(it);
  }

  void handle(const ListenClose& l) { emit(EventKind::rx_close, l.leaf + 1, l.k, 0); }

  Scenario s_;
  SimOptions o_;
  std::mt19937_64 heart_rng_;
  std::vector<LeafPlan> plans_;
  std::vector<NodeClock> clocks_;
  std::vector<std::mt19937_64> aux_;
  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  std::vector<double> periods_;
  std::vector<double> beats_;
  std::map<PunctureKey, WindowState> windows_;
  MetricsAccumulator acc_;
  SimTrace trace_;
};

}  // namespace

SimResult run_simulation(const Scenario& scenario, const SimOptions& options) {
  return Simulator(scenario, options).run();
}

SimResult run_simulation(const Scenario& scenario, std::uint64_t n_superframes, std::uint64_t seed) {
  SimOptions o;
  o.n_superframes = n_superframes;
  o.seed = seed;
  return run_simulation(scenario, o);
}

}  // namespace pulsesync
