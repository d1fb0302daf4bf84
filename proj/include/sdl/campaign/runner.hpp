#ifndef SDL_CAMPAIGN_RUNNER_HPP
#define SDL_CAMPAIGN_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sdl/acquisition/design.hpp"
#include "sdl/acquisition/suggest.hpp"
#include "sdl/campaign/config.hpp"
#include "sdl/campaign/measure.hpp"
#include "sdl/campaign/metrics.hpp"
#include "sdl/domain.hpp"
#include "sdl/error.hpp"
#include "sdl/random.hpp"
#include "sdl/surrogate/gp.hpp"
#include "sdl/virtlab/experiment.hpp"

namespace sdl::campaign {

namespace fs = std::filesystem;

inline constexpr const char* kLogFile = "campaign.jsonl";
inline constexpr const char* kCursorFile = "rng_cursor.json";
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kEventsFile = "events.log";

struct RngCursor {
  int next_batch = 0;
  std::int64_t next_sample_id = 0;
  std::uint64_t master_seed = 0;
};

struct CampaignState {
  CampaignConfig config;
  std::vector<SampleRecord> records;
  std::vector<double> hypervolume;  // per completed batch
  std::vector<BatchMean> means;
  std::vector<std::int64_t> pareto_ids;
  RngCursor cursor;
  std::vector<std::string> events;

  int completed_batches() const { return cursor.next_batch; }
};

inline void refresh_metrics(CampaignState& s) {
  s.hypervolume.clear();
  s.means.clear();
  s.pareto_ids.clear();
  if (s.records.empty()) return;
  s.hypervolume = hypervolume_trace(s.records, s.config.mode, s.config.reference_point()).per_batch;
  s.means = batch_means(s.records);
  s.pareto_ids = pareto_member_ids(s.records, s.config.mode);
}

// ---- persistence -----------------------------------------------------------

inline void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::string record_line(const SampleRecord& r) { return nlohmann::json(r).dump() + "\n"; }

inline void append_records(const fs::path& log, const std::vector<SampleRecord>& batch) {
  std::ofstream out(log, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to " + log.string());
  for (const auto& r : batch) out << record_line(r);
  out.flush();
  if (!out) throw IoError("failed appending to " + log.string());
}

/// Reads a JSON-lines log. A malformed final line (interrupted write) is
/// dropped; malformed lines elsewhere are an error.
inline std::vector<SampleRecord> read_log(const fs::path& log) {
  std::ifstream in(log, std::ios::binary);
  if (!in) throw IoError("cannot open campaign log " + log.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  std::vector<SampleRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(nlohmann::json::parse(lines[i]).get<SampleRecord>());
    } catch (const nlohmann::json::exception& e) {
      if (i + 1 == lines.size()) break;
      throw ValidationError("campaign log: malformed line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

inline nlohmann::json cursor_to_json(const RngCursor& c) {
  return {{"next_batch", c.next_batch}, {"next_sample_id", c.next_sample_id}, {"master_seed", c.master_seed}};
}

inline void write_cursor(const fs::path& dir, const RngCursor& c) {
  write_text_atomic(dir / kCursorFile, cursor_to_json(c).dump(2) + "\n");
}

inline std::string raw_stem(int batch, int set, int rep) {
  return "b" + std::to_string(batch) + "_p" + std::to_string(set) + "_r" + std::to_string(rep);
}

// ---- loop pieces -----------------------------------------------------------

inline std::uint64_t experiment_seed(std::uint64_t master, int batch, int set, int rep) {
  return derive_seed(master, "experiment",
                     {static_cast<std::uint64_t>(batch), static_cast<std::uint64_t>(set), static_cast<std::uint64_t>(rep)});
}

inline virtlab::VirtualLab make_lab(const CampaignConfig& cfg) {
  virtlab::LabConfig lab;
  lab.noise = cfg.noise;
  lab.image.size = cfg.image_size;
  return virtlab::VirtualLab(lab, std::make_shared<virtlab::CalibratedGroundTruth>(cfg.ground_truth, cfg.bounds));
}

/// Training rows for one canonical objective: every replicate, or the
/// replicate mean per parameter set.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> training_data(const std::vector<SampleRecord>& records,
                                                                  const CampaignConfig& cfg) {
  const std::size_t m = objective_count(cfg.mode);
  std::vector<std::pair<ParameterSet, ObjectiveVector>> rows;
  if (cfg.training == TrainingData::replicates) {
    for (const auto& r : records) rows.emplace_back(r.params, r.objectives);
  } else {
    for (const auto& p : summarize_pairs(records)) rows.emplace_back(p.params, p.midpoint);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kParameterCount));
  Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto a = rows[i].first.to_array();
    for (std::size_t k = 0; k < kParameterCount; ++k)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = a[k];
    const auto c = canonicalize(rows[i].second, cfg.mode);
    for (std::size_t j = 0; j < m; ++j) y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[j];
  }
  return {x, y};
}

/// One GP per canonical objective. A numerical failure is retried with
/// escalated starting jitter and a fresh restart seed.
inline std::vector<surrogate::GpModel> fit_models(const std::vector<SampleRecord>& records, const CampaignConfig& cfg,
                                                  int batch, std::vector<std::string>* events = nullptr) {
  const auto [x, y] = training_data(records, cfg);
  std::vector<surrogate::GpModel> models;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    surrogate::GpConfig g = cfg.gp;
    for (int attempt = 0;; ++attempt) {
      try {
        const auto seed = derive_seed(cfg.master_seed, "gp",
                                      {static_cast<std::uint64_t>(batch), static_cast<std::uint64_t>(j),
                                       static_cast<std::uint64_t>(attempt)});
        models.push_back(surrogate::fit(x, y.col(j), surrogate::to_intervals(cfg.bounds), g, seed));
        break;
      } catch (const NumericalError& e) {
        const std::string msg = "batch " + std::to_string(batch) + " objective " + std::to_string(j) +
                                ": surrogate fit failed (" + e.what() + ")";
        if (g.jitter >= surrogate::kMaxJitter) throw NumericalError(msg + "; jitter exhausted");
        g.jitter = std::min(surrogate::kMaxJitter, g.jitter * 100.0);
        if (events) events->push_back(msg + "; retrying with jitter " + std::to_string(g.jitter));
      }
    }
  }
  return models;
}

/// Parameter sets for batch `batch` given all prior records.
inline std::vector<ParameterSet> propose_batch(const std::vector<SampleRecord>& records, const CampaignConfig& cfg,
                                               int batch, int q, std::vector<std::string>* events = nullptr) {
  if (batch == 0 || records.empty())
    return acquisition::initial_design(cfg.bounds, q, derive_seed(cfg.master_seed, "design", {static_cast<std::uint64_t>(batch)}));
  const auto models = fit_models(records, cfg, batch, events);
  std::vector<const surrogate::GpModel*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);
  acquisition::AcquisitionConfig a = cfg.acquisition;
  a.q = q;
  a.seed = derive_seed(cfg.master_seed, "acquisition", {static_cast<std::uint64_t>(batch)});
  return acquisition::suggest_batch(ptrs, cfg.bounds, cfg.reference_point(), a);
}

struct RunOptions {
  bool resume = false;
  std::optional<int> stop_after_batch;  // stop once this many batches are complete
  std::function<void(const std::string&)> progress;
};

namespace detail {

inline CampaignState load_for_resume(const CampaignConfig& cfg, const fs::path& dir) {
  CampaignState s;
  s.config = cfg;
  s.cursor.master_seed = cfg.master_seed;
  const fs::path snapshot = dir / kConfigFile;
  if (fs::exists(snapshot)) {
    std::ifstream in(snapshot);
    nlohmann::json saved;
    try {
      in >> saved;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("resume: malformed config snapshot: ") + e.what());
    }
    if (saved != to_json(cfg)) throw ValidationError("resume: config differs from the snapshot in " + dir.string());
  }
  if (!fs::exists(dir / kLogFile)) return s;
  auto records = read_log(dir / kLogFile);
  const std::size_t per_batch = static_cast<std::size_t>(cfg.sets_per_iteration) * static_cast<std::size_t>(cfg.replicates);
  const std::size_t complete = records.size() / per_batch;
  records.resize(complete * per_batch);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::size_t b = i / per_batch;
    if (r.batch_index != static_cast<int>(b) || r.sample_id != static_cast<std::int64_t>(i))
      throw ValidationError("resume: log is not a contiguous sequence of batches");
  }
  s.records = std::move(records);
  s.cursor = {static_cast<int>(complete), static_cast<std::int64_t>(s.records.size()), cfg.master_seed};
  // Drop a partially written batch from the log itself.
  std::string text;
  for (const auto& r : s.records) text += record_line(r);
  write_text_atomic(dir / kLogFile, text);
  return s;
}

}  // namespace detail

/// Closed-loop campaign. Batch 0 is a Latin-hypercube design; later batches
/// come from GP surrogates and batch NEHVI. Every replicate is synthesized by
/// the virtual lab and analyzed from its raw measurements.
inline CampaignState run_campaign(const CampaignConfig& cfg, const RunOptions& opt = {}) {
  cfg.validate();
  const fs::path dir(cfg.run_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());

  CampaignState s;
  if (opt.resume) {
    s = detail::load_for_resume(cfg, dir);
  } else {
    if (fs::exists(dir / kLogFile) && fs::file_size(dir / kLogFile) > 0)
      throw ValidationError("run directory already holds a campaign log; pass resume to continue it");
    s.config = cfg;
    s.cursor.master_seed = cfg.master_seed;
    write_text_atomic(dir / kLogFile, "");
  }
  write_text_atomic(dir / kConfigFile, to_json(cfg).dump(2) + "\n");
  write_cursor(dir, s.cursor);

  const fs::path raw_dir = dir / "raw";
  if (cfg.persist_raw) {
    fs::create_directories(raw_dir, ec);
    if (ec) throw IoError("cannot create " + raw_dir.string());
  }
  const auto lab = make_lab(cfg);

  for (int b = s.cursor.next_batch; b < cfg.iterations; ++b) {
    if (opt.stop_after_batch && b >= *opt.stop_after_batch) break;
    const std::size_t events_before = s.events.size();
    const auto sets = propose_batch(s.records, cfg, b, cfg.sets_per_iteration, &s.events);

    std::vector<SampleRecord> batch;
    for (int p = 0; p < cfg.sets_per_iteration; ++p) {
      for (int r = 0; r < cfg.replicates; ++r) {
        const auto out = lab.run(sets[static_cast<std::size_t>(p)], experiment_seed(cfg.master_seed, b, p, r));
        SampleRecord rec;
        rec.sample_id = s.cursor.next_sample_id + static_cast<std::int64_t>(batch.size());
        rec.batch_index = b;
        rec.param_set_index = p;
        rec.replicate_index = r;
        rec.params = sets[static_cast<std::size_t>(p)];
        rec.ambient = out.ambient;
        rec.objectives = analyze_measurement(out.spectrum, out.bright, out.dark, cfg.analysis);
        if (cfg.persist_raw) {
          const std::string stem = raw_stem(b, p, r);
          rec.provenance.spectrum = "raw/" + stem + ".spectrum.csv";
          rec.provenance.bright_image = "raw/" + stem + ".bright.pgm";
          rec.provenance.dark_image = "raw/" + stem + ".dark.pgm";
          spectra::write_spectrum_csv_file((dir / rec.provenance.spectrum).string(), out.spectrum);
          vision::write_pgm_file((dir / rec.provenance.bright_image).string(), out.bright);
          vision::write_pgm_file((dir / rec.provenance.dark_image).string(), out.dark);
        }
        batch.push_back(rec);
      }
    }
    append_records(dir / kLogFile, batch);
    s.records.insert(s.records.end(), batch.begin(), batch.end());
    s.cursor.next_batch = b + 1;
    s.cursor.next_sample_id += static_cast<std::int64_t>(batch.size());
    write_cursor(dir, s.cursor);
    if (s.events.size() > events_before) {
      std::ofstream ev(dir / kEventsFile, std::ios::app);
      for (std::size_t i = events_before; i < s.events.size(); ++i) ev << s.events[i] << "\n";
    }
    if (opt.progress) opt.progress("batch " + std::to_string(b + 1) + "/" + std::to_string(cfg.iterations) + " done");
  }
  refresh_metrics(s);
  return s;
}

/// Loads a campaign from its run directory (log path or directory).
inline CampaignState load_state(const std::string& log_or_dir) {
  fs::path p(log_or_dir);
  const fs::path dir = fs::is_directory(p) ? p : p.parent_path();
  const fs::path log = fs::is_directory(p) ? p / kLogFile : p;
  const fs::path snapshot = dir / kConfigFile;
  if (!fs::exists(snapshot)) throw IoError("missing config snapshot " + snapshot.string());
  CampaignState s;
  s.config = load_config(snapshot.string());
  s.records = read_log(log);
  const std::size_t per_batch =
      static_cast<std::size_t>(s.config.sets_per_iteration) * static_cast<std::size_t>(s.config.replicates);
  s.records.resize(s.records.size() / per_batch * per_batch);
  s.cursor = {static_cast<int>(s.records.size() / per_batch), static_cast<std::int64_t>(s.records.size()),
              s.config.master_seed};
  refresh_metrics(s);
  return s;
}

/// Replays the analysis from persisted raw files.
inline ObjectiveVector replay_record(const SampleRecord& r, const std::string& run_dir,
                                     const vision::DefectAnalysisConfig& cfg) {
  require(!r.provenance.spectrum.empty(), "replay: record has no persisted raw data");
  const fs::path dir(run_dir);
  const auto spectrum = spectra::read_spectrum_csv_file((dir / r.provenance.spectrum).string());
  auto load_gray = [&](const std::string& rel) {
    const auto img = vision::read_pnm_file((dir / rel).string());
    if (const auto* g = std::get_if<vision::GrayImage>(&img)) return *g;
    return vision::to_gray(std::get<vision::RgbImage>(img));
  };
  return analyze_measurement(spectrum, load_gray(r.provenance.bright_image), load_gray(r.provenance.dark_image), cfg);
}

}  // namespace sdl::campaign

#endif
