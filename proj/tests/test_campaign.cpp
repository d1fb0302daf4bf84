#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdl/campaign/report.hpp"
#include "sdl/campaign/runner.hpp"

using namespace sdl;
using namespace sdl::campaign;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::path(::testing::TempDir()) / ("sdl_campaign_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

CampaignConfig fast_config(const std::string& name, int iterations = 3) {
  CampaignConfig c;
  c.iterations = iterations;
  c.sets_per_iteration = 4;
  c.replicates = 2;
  c.image_size = 96;
  c.master_seed = 7;
  c.gp.restarts = 2;
  c.gp.max_iterations = 40;
  c.acquisition.mc_samples = 32;
  c.acquisition.candidate_pool = 128;
  c.acquisition.refine_top = 2;
  c.acquisition.refine_iters = 12;
  c.run_dir = fresh_dir(name).string();
  return c;
}

SampleRecord rec(int batch, int set, int rep, ObjectiveVector o) {
  SampleRecord r;
  r.batch_index = batch;
  r.param_set_index = set;
  r.replicate_index = rep;
  r.objectives = o;
  return r;
}

}  // namespace

TEST(Campaign, DefaultShapeGivesTwoHundredRecords) {
  auto cfg = fast_config("shape", 10);
  cfg.sets_per_iteration = 10;
  cfg.persist_raw = false;
  const auto s = run_campaign(cfg);
  ASSERT_EQ(s.records.size(), 200u);
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    const auto& r = s.records[i];
    EXPECT_EQ(r.sample_id, static_cast<std::int64_t>(i));
    EXPECT_EQ(r.batch_index, static_cast<int>(i / 20));
    EXPECT_EQ(r.param_set_index, static_cast<int>(i % 20 / 2));
    EXPECT_EQ(r.replicate_index, static_cast<int>(i % 2));
    EXPECT_TRUE(cfg.bounds.contains(r.params));
    if (r.replicate_index == 1) EXPECT_EQ(r.params, s.records[i - 1].params);
  }
  ASSERT_EQ(s.hypervolume.size(), 10u);
  for (std::size_t b = 1; b < s.hypervolume.size(); ++b) EXPECT_GE(s.hypervolume[b], s.hypervolume[b - 1]);
  EXPECT_EQ(line_count(fs::path(cfg.run_dir) / "campaign.jsonl"), 200u);
  EXPECT_FALSE(s.pareto_ids.empty());
}

TEST(Campaign, SingleIterationIsTheInitialDesign) {
  const auto cfg = fast_config("single", 1);
  const auto s = run_campaign(cfg);
  ASSERT_EQ(s.records.size(), 8u);
  const auto design = acquisition::initial_design(cfg.bounds, 4, derive_seed(cfg.master_seed, "design", {0}));
  for (const auto& r : s.records) EXPECT_EQ(r.params, design[static_cast<std::size_t>(r.param_set_index)]);
}

TEST(Campaign, RerunsAreByteIdentical) {
  auto a = fast_config("rerun_a");
  auto b = fast_config("rerun_b");
  run_campaign(a);
  run_campaign(b);
  EXPECT_EQ(slurp(fs::path(a.run_dir) / "campaign.jsonl"), slurp(fs::path(b.run_dir) / "campaign.jsonl"));
  EXPECT_EQ(slurp(fs::path(a.run_dir) / "raw" / "b2_p3_r1.bright.pgm"),
            slurp(fs::path(b.run_dir) / "raw" / "b2_p3_r1.bright.pgm"));
  auto c = fast_config("rerun_c");
  c.master_seed = 8;
  run_campaign(c);
  EXPECT_NE(slurp(fs::path(a.run_dir) / "campaign.jsonl"), slurp(fs::path(c.run_dir) / "campaign.jsonl"));
}

TEST(Campaign, ResumeMatchesUninterruptedRun) {
  const auto full = fast_config("resume_full");
  run_campaign(full);

  auto part = fast_config("resume_part");
  part.run_dir = fresh_dir("resume_part").string();
  RunOptions stop;
  stop.stop_after_batch = 1;
  run_campaign(part, stop);
  EXPECT_EQ(line_count(fs::path(part.run_dir) / "campaign.jsonl"), 8u);

  // Simulate a crash in the middle of batch 1: a few records and a torn line.
  {
    std::ofstream log(fs::path(part.run_dir) / "campaign.jsonl", std::ios::app);
    log << record_line(rec(1, 0, 0, {1.0, 0.1, 0.1})) << "{\"sample_id\": 9, \"batch";
  }
  RunOptions resume;
  resume.resume = true;
  const auto s = run_campaign(part, resume);
  EXPECT_EQ(s.records.size(), 24u);

  // The run directories differ, so compare records without the snapshot.
  const auto a = read_log(fs::path(full.run_dir) / "campaign.jsonl");
  const auto b = read_log(fs::path(part.run_dir) / "campaign.jsonl");
  EXPECT_EQ(a, b);
}

TEST(Campaign, ResumeRejectsChangedConfig) {
  auto cfg = fast_config("resume_changed", 1);
  run_campaign(cfg);
  cfg.iterations = 2;
  cfg.master_seed = 99;
  RunOptions resume;
  resume.resume = true;
  EXPECT_THROW(run_campaign(cfg, resume), ValidationError);
  cfg.master_seed = 7;
  cfg.iterations = 1;
  EXPECT_THROW(run_campaign(cfg), ValidationError);  // existing log without resume
}

TEST(Campaign, ReplayFromRawFilesReproducesObjectives) {
  const auto cfg = fast_config("replay", 2);
  const auto s = run_campaign(cfg);
  for (const auto& r : s.records) EXPECT_EQ(replay_record(r, cfg.run_dir, cfg.analysis), r.objectives);
}

TEST(Campaign, LoadStateMatchesRunState) {
  const auto cfg = fast_config("load", 2);
  const auto s = run_campaign(cfg);
  const auto loaded = load_state(cfg.run_dir);
  EXPECT_EQ(loaded.records, s.records);
  EXPECT_EQ(loaded.hypervolume, s.hypervolume);
  EXPECT_EQ(loaded.pareto_ids, s.pareto_ids);
  EXPECT_EQ(loaded.completed_batches(), 2);
  const auto again = load_state((fs::path(cfg.run_dir) / "campaign.jsonl").string());
  EXPECT_EQ(again.records, s.records);
  EXPECT_THROW(load_state("/nonexistent/run"), IoError);
}

TEST(Campaign, MeansTrainingModeAndTwoObjectiveModeRun) {
  auto cfg = fast_config("modes", 2);
  cfg.training = TrainingData::means;
  cfg.mode = ObjectiveMode::two;
  const auto s = run_campaign(cfg);
  EXPECT_EQ(s.records.size(), 16u);
  EXPECT_EQ(cfg.reference_point().size(), 2u);
}

TEST(Campaign, SuggestFromStateIsDeterministic) {
  const auto cfg = fast_config("suggest", 1);
  const auto s = run_campaign(cfg);
  const auto a = propose_batch(s.records, cfg, 1, 3);
  const auto b = propose_batch(s.records, cfg, 1, 3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a, b);
  for (const auto& p : a) EXPECT_TRUE(cfg.bounds.contains(p));
}

TEST(Metrics, ReproducibilityArithmetic) {
  std::vector<SampleRecord> r{
      rec(0, 0, 0, {1.0, 0.10, 0.10}), rec(0, 0, 1, {1.2, 0.20, 0.10}),
      rec(0, 1, 0, {0.5, 0.30, 0.00}), rec(0, 1, 1, {0.5, 0.10, 0.00}),
      rec(1, 0, 0, {0.9, 0.00, 0.40}), rec(1, 0, 1, {0.8, 0.00, 0.20}),
  };
  const auto s = reproducibility_stats(r);
  EXPECT_EQ(s.optical_density.count, 3u);
  EXPECT_NEAR(s.optical_density.median, 0.05, 1e-12);  // {0.1, 0, 0.05}
  EXPECT_NEAR(s.defect_total.median, 0.1, 1e-12);      // {0.05, 0.1, 0.1}
  EXPECT_NEAR(s.optical_density.p95, 0.05 + 0.9 * 0.05, 1e-12);
  EXPECT_NEAR(s.defect_bright.median, 0.05, 1e-12);
  r.pop_back();
  EXPECT_THROW(reproducibility_stats(r), ValidationError);
}

TEST(Metrics, PercentileInterpolatesLinearly) {
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({5}, 0.95), 5.0);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.05), 0.5);
}

TEST(Metrics, PairSummariesAndHypervolumeTrace) {
  std::vector<SampleRecord> r{
      rec(0, 0, 0, {1.0, 0.1, 0.1}), rec(0, 0, 1, {1.2, 0.3, 0.1}),
      rec(1, 0, 0, {0.2, 0.5, 0.5}), rec(1, 0, 1, {0.4, 0.5, 0.5}),
  };
  const auto pairs = summarize_pairs(r);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_NEAR(pairs[0].midpoint.optical_density, 1.1, 1e-12);
  EXPECT_NEAR(pairs[0].spread.optical_density, 0.1, 1e-12);
  EXPECT_NEAR(pairs[0].total_defect_spread, 0.1, 1e-12);
  const auto t = hypervolume_trace(r, ObjectiveMode::two, ReferencePoint{{0.0, -2.0}});
  ASSERT_EQ(t.per_batch.size(), 2u);
  EXPECT_NEAR(t.per_batch[0], 1.1 * (2.0 - 0.3), 1e-12);
  EXPECT_EQ(t.per_batch[1], t.per_batch[0]);  // dominated pair adds nothing
}

TEST(Report, WritesTablesAndFigures) {
  const auto cfg = fast_config("report", 3);
  const auto s = run_campaign(cfg);
  const fs::path out = fresh_dir("report_out");
  const auto files = report(s, out.string());
  EXPECT_EQ(files.size(), 7u);
  EXPECT_EQ(line_count(out / "samples.csv"), 1u + 24u);
  EXPECT_EQ(line_count(out / "hv_trace.csv"), 1u + 12u);
  EXPECT_EQ(line_count(out / "batch_means.csv"), 1u + 3u);
  for (const char* svg : {"objectives.svg", "hypervolume.svg", "pareto.svg"}) {
    const auto body = slurp(out / svg);
    EXPECT_EQ(body.rfind("<svg", 0), 0u) << svg;
    EXPECT_NE(body.find("</svg>"), std::string::npos) << svg;
  }
  const auto pareto = slurp(out / "pareto.svg");
  std::size_t fronts = 0;
  for (auto pos = pareto.find("class=\"front\""); pos != std::string::npos; pos = pareto.find("class=\"front\"", pos + 1))
    ++fronts;
  EXPECT_EQ(fronts, 3u);
}

TEST(Report, EmptyStateIsAnError) {
  CampaignState empty;
  EXPECT_THROW(report(empty, fresh_dir("report_empty").string()), ValidationError);
}

TEST(Config, JsonRoundTrip) {
  CampaignConfig c;
  c.mode = ObjectiveMode::two;
  c.iterations = 4;
  c.reference = ReferencePoint{{0.1, -3.0}};
  c.gp.fixed_noise = 0.01;
  c.acquisition.tau = 2e-3;
  c.noise.sigma_od_base = 0.02;
  c.analysis.crop = vision::Rect{1, 2, 30, 40};
  c.analysis.median_radius = 1;
  c.training = TrainingData::means;
  c.master_seed = 123456789012345ULL;
  c.run_dir = "somewhere";
  c.persist_raw = false;
  const auto j = to_json(c);
  const auto back = config_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back), j);
}

TEST(Config, Validation) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"objective_mode", 4}}), ValidationError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"iterations", 0}}), ValidationError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"reference_point", {0.0, -2.0}}}), ValidationError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"iterations", "ten"}}), ValidationError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"training_data", "medians"}}), ValidationError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
  const auto d = config_from_json(nlohmann::json::object());
  EXPECT_EQ(d.iterations, 10);
  EXPECT_EQ(d.sets_per_iteration, 10);
  EXPECT_EQ(d.replicates, 2);
  EXPECT_EQ(d.reference_point().values, (std::vector<double>{0.0, -2.0, -2.0}));
}
