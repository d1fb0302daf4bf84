// sdlctl: command-line front end for campaigns and standalone analyses.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdl/acquisition/hypervolume.hpp"
#include "sdl/campaign/report.hpp"
#include "sdl/campaign/runner.hpp"
#include "sdl/spectra/colorimetry.hpp"
#include "sdl/spectra/spectrum.hpp"
#include "sdl/vision/defects.hpp"

namespace {

using nlohmann::json;

enum ExitCode { kOk = 0, kOther = 1, kValidation = 2, kNumerical = 3, kIo = 4 };

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') throw sdl::ValidationError("not a number: '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

// Rows of comma-separated numbers; a non-numeric first line is a header.
std::vector<std::vector<double>> read_front_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sdl::IoError("cannot open front: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      rows.push_back(parse_list(line));
    } catch (const sdl::ValidationError&) {
      if (!first) throw;
    }
    first = false;
  }
  return rows;
}

json pair_json(const sdl::campaign::PairSummary& p) {
  return {{"batch_index", p.batch_index},
          {"param_set_index", p.param_set_index},
          {"params", p.params},
          {"midpoint", p.midpoint},
          {"sample_ids", p.sample_ids}};
}

int cmd_run(const std::string& config_path, bool resume) {
  const auto cfg = sdl::campaign::load_config(config_path);
  sdl::campaign::RunOptions opt;
  opt.resume = resume;
  opt.progress = [](const std::string& m) { std::cerr << m << "\n"; };
  const auto state = sdl::campaign::run_campaign(cfg, opt);
  json out{{"run_dir", cfg.run_dir},
           {"records", state.records.size()},
           {"completed_batches", state.completed_batches()},
           {"hypervolume", state.hypervolume},
           {"pareto_sample_ids", state.pareto_ids}};
  if (cfg.replicates == 2 && !state.records.empty()) {
    const auto r = sdl::campaign::reproducibility_stats(state.records);
    out["reproducibility"] = {
        {"optical_density", {{"median", r.optical_density.median}, {"p05", r.optical_density.p05}, {"p95", r.optical_density.p95}}},
        {"defect_total", {{"median", r.defect_total.median}, {"p05", r.defect_total.p05}, {"p95", r.defect_total.p95}}}};
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_suggest(const std::string& state_path, int q) {
  sdl::require(q >= 1, "--q must be >= 1");
  const auto state = sdl::campaign::load_state(state_path);
  const auto sets = sdl::campaign::propose_batch(state.records, state.config, state.completed_batches(), q);
  std::cout << json(sets).dump(2) << "\n";
  return kOk;
}

int cmd_analyze_image(const std::string& path, const std::string& background, int threshold, int median_radius) {
  const auto bg = sdl::vision::background_from_string(background);
  sdl::vision::DefectAnalysisConfig cfg;
  if (threshold >= 0) (bg == sdl::vision::Background::bright ? cfg.bright_threshold : cfg.dark_threshold) = threshold;
  cfg.median_radius = median_radius;
  const auto img = sdl::vision::read_pnm_file(path);
  std::cout << json(sdl::vision::analyze_defects(img, bg, cfg)).dump(2) << "\n";
  return kOk;
}

int cmd_analyze_spectrum(const std::string& path) {
  const auto raw = sdl::spectra::read_spectrum_csv_file(path);
  const auto t = sdl::spectra::transmittance(raw);
  json out{{"optical_density", sdl::spectra::optical_density(sdl::spectra::absorbance(t))},
           {"lab", sdl::spectra::cielab(t)},
           {"tau_v", sdl::spectra::tau_v(t)},
           {"transmittance_clamped", t.clamped}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_pareto(const std::string& state_path) {
  const auto state = sdl::campaign::load_state(state_path);
  sdl::require(!state.records.empty(), "campaign has no completed samples");
  const auto pairs = sdl::campaign::summarize_pairs(state.records);
  int last = 0;
  for (const auto& p : pairs) last = std::max(last, p.batch_index);
  json members = json::array();
  for (std::size_t i : sdl::campaign::cumulative_front(pairs, last, state.config.mode)) members.push_back(pair_json(pairs[i]));
  std::cout << json{{"objective_mode", static_cast<int>(state.config.mode)}, {"front", members}}.dump(2) << "\n";
  return kOk;
}

int cmd_hv(const std::string& front_path, const std::string& ref_text) {
  const auto ref = parse_list(ref_text);
  sdl::require(ref.size() == 2 || ref.size() == 3, "--ref must have 2 or 3 components");
  sdl::acquisition::HypervolumeProblem p;
  p.ref.values = ref;
  for (auto& row : read_front_csv(front_path)) {
    sdl::require(row.size() == ref.size(), "front rows must have as many columns as the reference point");
    p.front.push_back({row});
  }
  std::printf("%.17g\n", sdl::acquisition::hypervolume(p));
  return kOk;
}

int cmd_report(const std::string& state_path, const std::string& out_dir) {
  const auto state = sdl::campaign::load_state(state_path);
  for (const auto& f : sdl::campaign::report(state, out_dir)) std::cout << f << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop multi-objective optimization campaigns on a virtual thin-film lab"};
  app.require_subcommand(1);

  std::string config_path, state_path, input, background, front, ref, out_dir;
  bool resume = false;
  int q = 10, threshold = -1, median_radius = 0;

  auto* run = app.add_subcommand("run-campaign", "Run or resume a campaign");
  run->add_option("--config", config_path, "Campaign config JSON")->required();
  run->add_flag("--resume", resume, "Continue the campaign in the configured run directory");

  auto* suggest = app.add_subcommand("suggest", "Suggest the next batch for a campaign");
  suggest->add_option("--state", state_path, "Campaign log (campaign.jsonl) or run directory")->required();
  suggest->add_option("--q", q, "Batch size");

  auto* img = app.add_subcommand("analyze-image", "Defect fraction of a PGM/PPM image");
  img->add_option("--input", input, "Image file")->required();
  img->add_option("--background", background, "bright or dark")->required();
  img->add_option("--threshold", threshold, "Override the background's default threshold");
  img->add_option("--median-radius", median_radius, "Median filter radius (0 disables)");

  auto* spec = app.add_subcommand("analyze-spectrum", "OD, L*a*b* and tau_v of a raw spectrum CSV");
  spec->add_option("--input", input, "Spectrum CSV")->required();

  auto* par = app.add_subcommand("pareto", "Cumulative Pareto front of a campaign");
  par->add_option("--state", state_path, "Campaign log or run directory")->required();

  auto* hv = app.add_subcommand("hv", "Hypervolume of a front (maximization convention)");
  hv->add_option("--front", front, "CSV of objective rows")->required();
  hv->add_option("--ref", ref, "Reference point, e.g. 0,-2,-2")->required();

  auto* rep = app.add_subcommand("report", "CSV tables and SVG figures for a campaign");
  rep->add_option("--state", state_path, "Campaign log or run directory")->required();
  rep->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(config_path, resume);
    if (*suggest) return cmd_suggest(state_path, q);
    if (*img) return cmd_analyze_image(input, background, threshold, median_radius);
    if (*spec) return cmd_analyze_spectrum(input);
    if (*par) return cmd_pareto(state_path);
    if (*hv) return cmd_hv(front, ref);
    if (*rep) return cmd_report(state_path, out_dir);
  } catch (const sdl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const sdl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const sdl::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}
