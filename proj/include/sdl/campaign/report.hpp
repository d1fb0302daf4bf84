#ifndef SDL_CAMPAIGN_REPORT_HPP
#define SDL_CAMPAIGN_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sdl/campaign/metrics.hpp"
#include "sdl/campaign/runner.hpp"
#include "sdl/error.hpp"

namespace sdl::campaign {

namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Linear map from data range to pixel range.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;

  double operator()(double v) const {
    const double span = hi - lo;
    return px_lo + (span > 0 ? (v - lo) / span : 0.5) * (px_hi - px_lo);
  }
};

inline Axis padded(double lo, double hi, double px_lo, double px_hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, px_lo, px_hi};
}

// Perceptually ordered palette from dark purple to yellow.
inline std::string color(double t) {
  static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

inline std::string header(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string text(double x, double y, const std::string& s, const std::string& extra = "") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" " + extra + ">" + s + "</text>\n";
}

inline std::string line(double x1, double y1, double x2, double y2, const std::string& style) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" " +
         style + "/>\n";
}

inline std::string frame(const Axis& x, const Axis& y, const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<rect x=\"" + num(x.px_lo) + "\" y=\"" + num(y.px_hi) + "\" width=\"" + num(x.px_hi - x.px_lo) +
       "\" height=\"" + num(y.px_lo - y.px_hi) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x.lo + (x.hi - x.lo) * k / 4.0;
    const double yv = y.lo + (y.hi - y.lo) * k / 4.0;
    s += text(x(xv), y.px_lo + 16, num(xv), "text-anchor=\"middle\"");
    s += text(x.px_lo - 6, y(yv) + 4, num(yv), "text-anchor=\"end\"");
  }
  s += text((x.px_lo + x.px_hi) / 2, y.px_lo + 34, xlabel, "text-anchor=\"middle\"");
  s += text(x.px_lo - 52, (y.px_lo + y.px_hi) / 2, ylabel,
            "text-anchor=\"middle\" transform=\"rotate(-90 " + num(x.px_lo - 52) + " " +
                num((y.px_lo + y.px_hi) / 2) + ")\"");
  return s;
}

}  // namespace svg

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string samples_csv(const std::vector<SampleRecord>& records) {
  std::ostringstream o;
  o << "sample_id,batch,param_set,replicate,concentration,spin_speed,spin_acceleration,spin_time,"
       "optical_density,defect_bright,defect_dark,defect_total,temperature,humidity\n";
  for (const auto& r : records) {
    o << r.sample_id << ',' << r.batch_index << ',' << r.param_set_index << ',' << r.replicate_index << ','
      << fmt(r.params.concentration) << ',' << fmt(r.params.spin_speed) << ',' << fmt(r.params.spin_acceleration)
      << ',' << fmt(r.params.spin_time) << ',' << fmt(r.objectives.optical_density) << ','
      << fmt(r.objectives.defect_bright) << ',' << fmt(r.objectives.defect_dark) << ','
      << fmt(r.objectives.defect_total()) << ',' << fmt(r.ambient.temperature) << ',' << fmt(r.ambient.humidity)
      << '\n';
  }
  return o.str();
}

inline std::string objectives_svg(const std::vector<SampleRecord>& records) {
  const int w = 760, h = 560;
  double od_hi = 0, def_hi = 0;
  std::int64_t id_hi = 0;
  for (const auto& r : records) {
    od_hi = std::max(od_hi, r.objectives.optical_density);
    def_hi = std::max(def_hi, r.objectives.defect_total());
    id_hi = std::max(id_hi, r.sample_id);
  }
  const auto x = svg::padded(0, static_cast<double>(id_hi), 80, w - 20);
  const auto y1 = svg::padded(0, od_hi, 240, 20);
  const auto y2 = svg::padded(0, def_hi, 500, 290);
  std::string s = svg::header(w, h);
  s += svg::frame(x, y1, "", "optical density");
  s += svg::frame(x, y2, "sample id", "defect density (%)");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].batch_index == records[i - 1].batch_index) continue;
    const double xb = x(static_cast<double>(records[i].sample_id) - 0.5);
    s += svg::line(xb, y1.px_hi, xb, y1.px_lo, "stroke=\"#999\" stroke-dasharray=\"4 3\"");
    s += svg::line(xb, y2.px_hi, xb, y2.px_lo, "stroke=\"#999\" stroke-dasharray=\"4 3\"");
  }
  for (const auto& r : records) {
    const double xi = x(static_cast<double>(r.sample_id));
    s += "<circle cx=\"" + svg::num(xi) + "\" cy=\"" + svg::num(y1(r.objectives.optical_density)) +
         "\" r=\"2.5\" fill=\"#1f5fa8\"/>\n";
    s += "<circle cx=\"" + svg::num(xi) + "\" cy=\"" + svg::num(y2(r.objectives.defect_total())) +
         "\" r=\"2.5\" fill=\"#b8322a\"/>\n";
  }
  return s + "</svg>\n";
}

inline std::string hv_svg(const HypervolumeTrace& t, const std::vector<PairSummary>& pairs) {
  const int w = 760, h = 360;
  double hi = 0;
  for (double v : t.per_pair) hi = std::max(hi, v);
  const auto x = svg::padded(0, static_cast<double>(std::max<std::size_t>(1, t.per_pair.size())), 80, w - 20);
  const auto y = svg::padded(0, hi, h - 50, 20);
  std::string s = svg::header(w, h);
  s += svg::frame(x, y, "parameter set (sample pair)", "hypervolume");
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].batch_index == pairs[i - 1].batch_index) continue;
    const double xb = x(static_cast<double>(i));
    s += svg::line(xb, y.px_hi, xb, y.px_lo, "stroke=\"#999\" stroke-dasharray=\"4 3\"");
  }
  std::string pts;
  for (std::size_t i = 0; i < t.per_pair.size(); ++i) {
    pts += svg::num(x(static_cast<double>(i))) + "," + svg::num(y(i ? t.per_pair[i - 1] : 0.0)) + " ";
    pts += svg::num(x(static_cast<double>(i + 1))) + "," + svg::num(y(t.per_pair[i])) + " ";
  }
  s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\"/>\n";
  return s + "</svg>\n";
}

// Cumulative (OD, total defect) fronts after each batch, with 1- and 2-spread
// replicate ellipses around every pair midpoint.
inline std::string pareto_svg(const std::vector<PairSummary>& pairs, const std::vector<int>& batches) {
  const int w = 760, h = 560;
  double od_hi = 0, def_hi = 0;
  for (const auto& p : pairs) {
    od_hi = std::max(od_hi, p.midpoint.optical_density + 2 * p.spread.optical_density);
    def_hi = std::max(def_hi, p.midpoint.defect_total() + 2 * p.total_defect_spread);
  }
  const auto x = svg::padded(0, def_hi, 80, w - 140);
  const auto y = svg::padded(0, od_hi, h - 50, 20);
  std::string s = svg::header(w, h);
  s += svg::frame(x, y, "defect density (%)", "optical density");
  const int last = batches.empty() ? 0 : batches.back();
  for (const auto& p : pairs) {
    const std::string c = svg::color(last > 0 ? static_cast<double>(p.batch_index) / last : 0.0);
    const double cx = x(p.midpoint.defect_total()), cy = y(p.midpoint.optical_density);
    for (int k = 1; k <= 2; ++k) {
      const double rx = std::abs(x(k * p.total_defect_spread) - x(0));
      const double ry = std::abs(y(k * p.spread.optical_density) - y(0));
      s += "<ellipse cx=\"" + svg::num(cx) + "\" cy=\"" + svg::num(cy) + "\" rx=\"" + svg::num(rx) + "\" ry=\"" +
           svg::num(ry) + "\" fill=\"none\" stroke=\"" + c + "\" stroke-opacity=\"" + (k == 1 ? "0.6" : "0.3") +
           "\"/>\n";
    }
    s += "<circle cx=\"" + svg::num(cx) + "\" cy=\"" + svg::num(cy) + "\" r=\"2.5\" fill=\"" + c + "\"/>\n";
  }
  for (int b : batches) {
    auto front = cumulative_front(pairs, b, ObjectiveMode::two);
    std::sort(front.begin(), front.end(), [&](std::size_t i, std::size_t j) {
      return pairs[i].midpoint.defect_total() < pairs[j].midpoint.defect_total();
    });
    std::string pts;
    for (std::size_t i : front)
      pts += svg::num(x(pairs[i].midpoint.defect_total())) + "," + svg::num(y(pairs[i].midpoint.optical_density)) + " ";
    const std::string c = svg::color(last > 0 ? static_cast<double>(b) / last : 0.0);
    s += "<polyline class=\"front\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + c +
         "\" stroke-width=\"1.5\"/>\n";
    s += svg::text(w - 130, 30 + 16.0 * b, "batch " + std::to_string(b + 1), "fill=\"" + c + "\"");
  }
  return s + "</svg>\n";
}

}  // namespace detail

/// Writes CSV tables and SVG figures for a campaign into out_dir.
/// Everything is rendered in memory first so an error leaves no files.
inline std::vector<std::string> report(const CampaignState& state, const std::string& out_dir) {
  require(!state.records.empty(), "report: campaign has no completed samples");
  const auto& cfg = state.config;
  const auto pairs = summarize_pairs(state.records);
  const auto trace = hypervolume_trace(state.records, cfg.mode, cfg.reference_point());
  const auto means = batch_means(state.records);

  std::vector<int> batches;
  for (const auto& m : means) batches.push_back(m.batch_index);

  std::map<std::string, std::string> files;
  files["samples.csv"] = detail::samples_csv(state.records);
  {
    std::ostringstream o;
    o << "pair_index,batch,param_set,hypervolume\n";
    for (std::size_t i = 0; i < pairs.size(); ++i)
      o << i << ',' << pairs[i].batch_index << ',' << pairs[i].param_set_index << ',' << detail::fmt(trace.per_pair[i])
        << '\n';
    files["hv_trace.csv"] = o.str();
  }
  {
    std::ostringstream o;
    o << "batch,count,mean_optical_density,mean_defect_total,hypervolume\n";
    for (std::size_t i = 0; i < means.size(); ++i)
      o << means[i].batch_index << ',' << means[i].count << ',' << detail::fmt(means[i].optical_density) << ','
        << detail::fmt(means[i].defect_total) << ',' << detail::fmt(trace.per_batch[i]) << '\n';
    files["batch_means.csv"] = o.str();
  }
  {
    std::ostringstream o;
    o << "after_batch,pair_batch,param_set,optical_density,defect_total,optical_density_spread,defect_total_spread\n";
    for (int b : batches)
      for (std::size_t i : cumulative_front(pairs, b, ObjectiveMode::two))
        o << b << ',' << pairs[i].batch_index << ',' << pairs[i].param_set_index << ','
          << detail::fmt(pairs[i].midpoint.optical_density) << ',' << detail::fmt(pairs[i].midpoint.defect_total())
          << ',' << detail::fmt(pairs[i].spread.optical_density) << ',' << detail::fmt(pairs[i].total_defect_spread)
          << '\n';
    files["pareto_by_batch.csv"] = o.str();
  }
  files["objectives.svg"] = detail::objectives_svg(state.records);
  files["hypervolume.svg"] = detail::hv_svg(trace, pairs);
  files["pareto.svg"] = detail::pareto_svg(pairs, batches);

  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory " + out_dir + ": " + ec.message());
  std::vector<std::string> written;
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << body;
    if (!out) throw IoError("failed writing " + (dir / name).string());
    written.push_back((dir / name).string());
  }
  return written;
}

}  // namespace sdl::campaign

#endif
