#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "pulsesync/errors.hpp"
#include "pulsesync/table.hpp"

namespace pulsesync {

namespace {

constexpr double kWidth = 760, kHeight = 480;
constexpr double kLeft = 90, kRight = 190, kTop = 50, kBottom = 60;
constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double pixel_lo = 0.0, pixel_hi = 1.0;

  double map(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    return pixel_lo + (x - a) / (b - a) * (pixel_hi - pixel_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1.0) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
      }
      if (out.size() < 2) out = {lo, hi};
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
      out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    return out;
  }
};

Axis make_axis(std::vector<double> values, bool log, double p_lo, double p_hi, bool pad) {
  Axis a;
  a.log = log;
  a.pixel_lo = p_lo;
  a.pixel_hi = p_hi;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v) || (log && v <= 0.0)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  if (hi == lo) {
    const double d = log ? 0.0 : (lo == 0.0 ? 1.0 : std::abs(lo) * 0.1);
    lo = log ? lo / 2.0 : lo - d;
    hi = log ? hi * 2.0 : hi + d;
  }
  if (pad) {
    if (log) {
      lo /= 1.1;
      hi *= 1.1;
    } else {
      const double d = (hi - lo) * 0.05;
      lo -= d;
      hi += d;
    }
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

void write_svg(const ResultTable& table, const PlotSpec& spec, std::ostream& out) {
  table.validate();
  if (spec.y.empty()) throw ValidationError("plot needs at least one y column");
  const std::vector<double> xs = table.column(spec.x);
  std::vector<std::vector<double>> ys;
  for (const auto& name : spec.y) ys.push_back(table.column(name));
  std::vector<double> lo_bar, hi_bar;
  if (spec.err_lo) lo_bar = table.column(*spec.err_lo);
  if (spec.err_hi) hi_bar = table.column(*spec.err_hi);

  std::vector<double> all_y;
  for (const auto& s : ys) all_y.insert(all_y.end(), s.begin(), s.end());
  all_y.insert(all_y.end(), lo_bar.begin(), lo_bar.end());
  all_y.insert(all_y.end(), hi_bar.begin(), hi_bar.end());
  const Axis ax = make_axis(xs, spec.log_x, kLeft, kWidth - kRight, false);
  const Axis ay = make_axis(all_y, spec.log_y, kHeight - kBottom, kTop, true);
  auto usable = [](const Axis& a, double v) { return std::isfinite(v) && (!a.log || v > 0.0); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<metadata>" << escape(kToolVersion) << "</metadata>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(spec.title) << "</text>\n";

  // Frame, grid and ticks.
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
      << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double px = ax.map(t);
    out << "<line x1=\"" << num(px, 7) << "\" y1=\"" << kTop << "\" x2=\"" << num(px, 7) << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << num(px, 7) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
        << num(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << num(py, 7) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
        << num(py, 7) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py + 4, 7) << "\" text-anchor=\"end\">" << num(t)
        << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
      << escape(spec.x) << (spec.log_x ? " (log)" : "") << "</text>\n";

  for (std::size_t s = 0; s < ys.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!usable(ax, xs[i]) || !usable(ay, ys[s][i])) continue;
      out << (first ? "" : " ") << num(ax.map(xs[i]), 7) << ',' << num(ay.map(ys[s][i]), 7);
      first = false;
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!usable(ax, xs[i]) || !usable(ay, ys[s][i])) continue;
      out << "<circle cx=\"" << num(ax.map(xs[i]), 7) << "\" cy=\"" << num(ay.map(ys[s][i]), 7)
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    if (s == 0 && (spec.err_lo || spec.err_hi)) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lo = spec.err_lo ? lo_bar[i] : ys[s][i];
        const double hi = spec.err_hi ? hi_bar[i] : ys[s][i];
        if (!usable(ax, xs[i]) || !usable(ay, lo) || !usable(ay, hi)) continue;
        const double px = ax.map(xs[i]);
        out << "<path d=\"M" << num(px, 7) << ',' << num(ay.map(lo), 7) << " V" << num(ay.map(hi), 7) << " M"
            << num(px - 3, 7) << ',' << num(ay.map(lo), 7) << " h6 M" << num(px - 3, 7) << ',' << num(ay.map(hi), 7)
            << " h6\" stroke=\"" << color << "\" fill=\"none\"/>\n";
      }
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 32
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly << "\">" << escape(spec.y[s]) << "</text>\n";
  }
  out << "</svg>\n";
}

std::string to_svg(const ResultTable& table, const PlotSpec& spec) {
  std::ostringstream os;
  write_svg(table, spec, os);
  return os.str();
}

}  // namespace pulsesync
