#ifndef SDL_CAMPAIGN_CONFIG_HPP
#define SDL_CAMPAIGN_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "sdl/acquisition/nehvi.hpp"
#include "sdl/domain.hpp"
#include "sdl/error.hpp"
#include "sdl/surrogate/gp.hpp"
#include "sdl/virtlab/ground_truth.hpp"
#include "sdl/virtlab/noise.hpp"
#include "sdl/vision/defects.hpp"

namespace sdl::campaign {

enum class TrainingData { replicates, means };

struct CampaignConfig {
  ParameterBounds bounds;
  ObjectiveMode mode = ObjectiveMode::three;
  int iterations = 10;
  int sets_per_iteration = 10;
  int replicates = 2;
  std::optional<ReferencePoint> reference;  // default depends on mode
  surrogate::GpConfig gp;
  acquisition::AcquisitionConfig acquisition;
  virtlab::NoiseModel noise;
  virtlab::GroundTruthParams ground_truth;
  vision::DefectAnalysisConfig analysis;
  int image_size = 1024;
  std::uint64_t master_seed = 0;
  std::string run_dir = "run";
  TrainingData training = TrainingData::replicates;
  bool persist_raw = true;

  ReferencePoint reference_point() const { return reference ? *reference : ReferencePoint::default_for(mode); }

  void validate() const {
    bounds.validate();
    require(iterations >= 1 && sets_per_iteration >= 1 && replicates >= 1,
            "config: iterations, sets_per_iteration and replicates must be >= 1");
    const auto ref = reference_point();
    require(ref.size() == objective_count(mode), "config: reference point length must match objective mode");
    for (double v : ref.values) require(std::isfinite(v), "config: reference point must be finite");
    gp.validate();
    acquisition.validate();
    noise.validate();
    ground_truth.validate();
    analysis.validate();
    require(image_size >= 8, "config: image_size must be >= 8");
    require(!run_dir.empty(), "config: run_dir must not be empty");
  }
};

inline std::string to_string(TrainingData t) { return t == TrainingData::replicates ? "replicates" : "means"; }

inline TrainingData training_from_string(const std::string& s) {
  if (s == "replicates") return TrainingData::replicates;
  if (s == "means") return TrainingData::means;
  throw ValidationError("config: training_data must be 'replicates' or 'means'");
}

inline nlohmann::json gp_config_to_json(const surrogate::GpConfig& g) {
  nlohmann::json j{{"restarts", g.restarts},
                   {"lengthscale_bounds", g.lengthscale_bounds},
                   {"signal_variance_bounds", g.signal_variance_bounds},
                   {"noise_bounds", g.noise_bounds},
                   {"jitter", g.jitter},
                   {"max_iterations", g.max_iterations}};
  j["fixed_noise"] = g.fixed_noise ? nlohmann::json(*g.fixed_noise) : nlohmann::json(nullptr);
  return j;
}

inline surrogate::GpConfig gp_config_from_json(const nlohmann::json& j) {
  surrogate::GpConfig g;
  g.restarts = j.value("restarts", g.restarts);
  if (j.contains("lengthscale_bounds")) g.lengthscale_bounds = j.at("lengthscale_bounds").get<Interval>();
  if (j.contains("signal_variance_bounds")) g.signal_variance_bounds = j.at("signal_variance_bounds").get<Interval>();
  if (j.contains("noise_bounds")) g.noise_bounds = j.at("noise_bounds").get<Interval>();
  g.jitter = j.value("jitter", g.jitter);
  g.max_iterations = j.value("max_iterations", g.max_iterations);
  if (j.contains("fixed_noise") && !j.at("fixed_noise").is_null()) g.fixed_noise = j.at("fixed_noise").get<double>();
  return g;
}

inline nlohmann::json acquisition_to_json(const acquisition::AcquisitionConfig& a) {
  return {{"mc_samples", a.mc_samples},     {"candidate_pool", a.candidate_pool}, {"refine_top", a.refine_top},
          {"refine_iters", a.refine_iters}, {"tau", a.tau},                       {"min_distance", a.min_distance}};
}

inline acquisition::AcquisitionConfig acquisition_from_json(const nlohmann::json& j) {
  acquisition::AcquisitionConfig a;
  a.mc_samples = j.value("mc_samples", a.mc_samples);
  a.candidate_pool = j.value("candidate_pool", a.candidate_pool);
  a.refine_top = j.value("refine_top", a.refine_top);
  a.refine_iters = j.value("refine_iters", a.refine_iters);
  a.tau = j.value("tau", a.tau);
  a.min_distance = j.value("min_distance", a.min_distance);
  return a;
}

inline nlohmann::json analysis_to_json(const vision::DefectAnalysisConfig& c) {
  nlohmann::json j{{"bright_threshold", c.bright_threshold},
                   {"dark_threshold", c.dark_threshold},
                   {"median_radius", c.median_radius}};
  if (c.crop) {
    j["crop"] = {{"x", c.crop->x}, {"y", c.crop->y}, {"w", c.crop->w}, {"h", c.crop->h}};
  } else {
    j["crop"] = nullptr;
  }
  return j;
}

inline vision::DefectAnalysisConfig analysis_from_json(const nlohmann::json& j) {
  vision::DefectAnalysisConfig c;
  c.bright_threshold = j.value("bright_threshold", c.bright_threshold);
  c.dark_threshold = j.value("dark_threshold", c.dark_threshold);
  c.median_radius = j.value("median_radius", c.median_radius);
  if (j.contains("crop") && !j.at("crop").is_null()) {
    const auto& r = j.at("crop");
    c.crop = vision::Rect{r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(), r.at("h").get<int>()};
  }
  return c;
}

inline nlohmann::json to_json(const CampaignConfig& c) {
  nlohmann::json j;
  j["bounds"] = c.bounds;
  j["objective_mode"] = static_cast<int>(c.mode);
  j["iterations"] = c.iterations;
  j["sets_per_iteration"] = c.sets_per_iteration;
  j["replicates"] = c.replicates;
  j["reference_point"] = c.reference_point().values;
  j["gp"] = gp_config_to_json(c.gp);
  j["acquisition"] = acquisition_to_json(c.acquisition);
  j["noise"] = c.noise;
  j["ground_truth"] = c.ground_truth;
  j["analysis"] = analysis_to_json(c.analysis);
  j["image_size"] = c.image_size;
  j["master_seed"] = c.master_seed;
  j["run_dir"] = c.run_dir;
  j["training_data"] = to_string(c.training);
  j["persist_raw"] = c.persist_raw;
  return j;
}

/// Parses a config document; absent keys take their defaults.
inline CampaignConfig config_from_json(const nlohmann::json& j) {
  require(j.is_object(), "config: expected a JSON object");
  CampaignConfig c;
  try {
    if (j.contains("bounds")) c.bounds = j.at("bounds").get<ParameterBounds>();
    if (j.contains("objective_mode")) c.mode = objective_mode_from_int(j.at("objective_mode").get<int>());
    c.iterations = j.value("iterations", c.iterations);
    c.sets_per_iteration = j.value("sets_per_iteration", c.sets_per_iteration);
    c.replicates = j.value("replicates", c.replicates);
    if (j.contains("reference_point") && !j.at("reference_point").is_null())
      c.reference = ReferencePoint{j.at("reference_point").get<std::vector<double>>()};
    if (j.contains("gp")) c.gp = gp_config_from_json(j.at("gp"));
    if (j.contains("acquisition")) c.acquisition = acquisition_from_json(j.at("acquisition"));
    if (j.contains("noise")) c.noise = j.at("noise").get<virtlab::NoiseModel>();
    if (j.contains("ground_truth")) c.ground_truth = j.at("ground_truth").get<virtlab::GroundTruthParams>();
    if (j.contains("analysis")) c.analysis = analysis_from_json(j.at("analysis"));
    c.image_size = j.value("image_size", c.image_size);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.run_dir = j.value("run_dir", c.run_dir);
    if (j.contains("training_data")) c.training = training_from_string(j.at("training_data").get<std::string>());
    c.persist_raw = j.value("persist_raw", c.persist_raw);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config: malformed JSON in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace sdl::campaign

#endif
