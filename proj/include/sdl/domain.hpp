#ifndef SDL_DOMAIN_HPP
#define SDL_DOMAIN_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdl/error.hpp"

namespace sdl {

inline constexpr std::size_t kParameterCount = 4;

/// One point of the spin-coating process space.
struct ParameterSet {
  double concentration = 0.0;      // wt%
  double spin_speed = 0.0;         // rpm
  double spin_acceleration = 0.0;  // rpm/s
  double spin_time = 0.0;          // s

  std::array<double, kParameterCount> to_array() const {
    return {concentration, spin_speed, spin_acceleration, spin_time};
  }

  static ParameterSet from_array(const std::array<double, kParameterCount>& v) {
    return {v[0], v[1], v[2], v[3]};
  }

  bool operator==(const ParameterSet&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

struct ParameterBounds {
  Interval concentration{2.4, 4.0};
  Interval spin_speed{300.0, 6000.0};
  Interval spin_acceleration{500.0, 5000.0};
  Interval spin_time{5.0, 60.0};

  std::array<Interval, kParameterCount> to_array() const {
    return {concentration, spin_speed, spin_acceleration, spin_time};
  }

  void validate() const {
    for (const auto& iv : to_array()) {
      require(std::isfinite(iv.lo) && std::isfinite(iv.hi), "parameter bounds must be finite");
      require(iv.lo > 0.0, "parameter bounds must be strictly positive");
      require(iv.lo < iv.hi, "parameter bounds must satisfy lo < hi");
    }
  }

  bool contains(const ParameterSet& p) const {
    const auto v = p.to_array();
    const auto b = to_array();
    for (std::size_t i = 0; i < kParameterCount; ++i) {
      if (!std::isfinite(v[i]) || v[i] < b[i].lo || v[i] > b[i].hi) return false;
    }
    return true;
  }

  std::array<double, kParameterCount> normalize(const ParameterSet& p) const {
    const auto v = p.to_array();
    const auto b = to_array();
    std::array<double, kParameterCount> u{};
    for (std::size_t i = 0; i < kParameterCount; ++i) u[i] = (v[i] - b[i].lo) / b[i].width();
    return u;
  }

  ParameterSet denormalize(const std::array<double, kParameterCount>& u) const {
    const auto b = to_array();
    std::array<double, kParameterCount> v{};
    for (std::size_t i = 0; i < kParameterCount; ++i) v[i] = b[i].lo + u[i] * b[i].width();
    return ParameterSet::from_array(v);
  }

  bool operator==(const ParameterBounds&) const = default;
};

/// Measured objectives in their natural units.
struct ObjectiveVector {
  double optical_density = 0.0;  // higher is better
  double defect_bright = 0.0;    // % of active area, lower is better
  double defect_dark = 0.0;      // % of active area, lower is better

  double defect_total() const { return defect_bright + defect_dark; }

  void validate() const {
    require(std::isfinite(optical_density) && optical_density >= 0.0,
            "optical density must be finite and non-negative");
    for (double d : {defect_bright, defect_dark})
      require(std::isfinite(d) && d >= 0.0 && d <= 100.0, "defect percentage must lie in [0, 100]");
  }

  bool operator==(const ObjectiveVector&) const = default;
};

/// 2: (OD, total defect) as plotted; 3: (OD, bright defect, dark defect) as optimized.
enum class ObjectiveMode : int { two = 2, three = 3 };

inline ObjectiveMode objective_mode_from_int(int m) {
  require(m == 2 || m == 3, "objective mode must be 2 or 3");
  return static_cast<ObjectiveMode>(m);
}

inline std::size_t objective_count(ObjectiveMode mode) { return static_cast<std::size_t>(mode); }

/// Objective values in maximization convention (defect channels negated).
struct CanonicalObjectives {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const CanonicalObjectives&) const = default;
};

inline CanonicalObjectives canonicalize(const ObjectiveVector& o, ObjectiveMode mode) {
  if (mode == ObjectiveMode::three) return {{o.optical_density, -o.defect_bright, -o.defect_dark}};
  return {{o.optical_density, -(o.defect_bright + o.defect_dark)}};
}

inline ObjectiveVector to_objective_vector(const CanonicalObjectives& c) {
  require(c.size() == 3, "only the 3-objective view maps back to an ObjectiveVector");
  return {c[0], -c[1], -c[2]};
}

/// Minimal acceptable performance per objective, canonical convention.
struct ReferencePoint {
  std::vector<double> values;

  static ReferencePoint default_for(ObjectiveMode mode) {
    if (mode == ObjectiveMode::three) return {{0.0, -2.0, -2.0}};
    return {{0.0, -2.0}};
  }

  std::size_t size() const { return values.size(); }
};

struct Ambient {
  double temperature = 22.0;  // degC
  double humidity = 45.0;     // %RH

  bool operator==(const Ambient&) const = default;
};

struct Provenance {
  std::string spectrum;
  std::string bright_image;
  std::string dark_image;

  bool operator==(const Provenance&) const = default;
};

struct SampleRecord {
  std::int64_t sample_id = 0;
  int batch_index = 0;
  int param_set_index = 0;
  int replicate_index = 0;
  ParameterSet params;
  Ambient ambient;
  ObjectiveVector objectives;
  Provenance provenance;

  bool operator==(const SampleRecord&) const = default;
};

inline void to_json(nlohmann::json& j, const ParameterSet& p) {
  j = nlohmann::json{{"concentration", p.concentration},
                     {"spin_speed", p.spin_speed},
                     {"spin_acceleration", p.spin_acceleration},
                     {"spin_time", p.spin_time}};
}

inline void from_json(const nlohmann::json& j, ParameterSet& p) {
  j.at("concentration").get_to(p.concentration);
  j.at("spin_speed").get_to(p.spin_speed);
  j.at("spin_acceleration").get_to(p.spin_acceleration);
  j.at("spin_time").get_to(p.spin_time);
}

inline void to_json(nlohmann::json& j, const Interval& iv) { j = nlohmann::json::array({iv.lo, iv.hi}); }

inline void from_json(const nlohmann::json& j, Interval& iv) {
  require(j.is_array() && j.size() == 2, "an interval is a two-element array [lo, hi]");
  iv.lo = j[0].get<double>();
  iv.hi = j[1].get<double>();
}

inline void to_json(nlohmann::json& j, const ParameterBounds& b) {
  j = nlohmann::json{{"concentration", b.concentration},
                     {"spin_speed", b.spin_speed},
                     {"spin_acceleration", b.spin_acceleration},
                     {"spin_time", b.spin_time}};
}

inline void from_json(const nlohmann::json& j, ParameterBounds& b) {
  if (j.contains("concentration")) j.at("concentration").get_to(b.concentration);
  if (j.contains("spin_speed")) j.at("spin_speed").get_to(b.spin_speed);
  if (j.contains("spin_acceleration")) j.at("spin_acceleration").get_to(b.spin_acceleration);
  if (j.contains("spin_time")) j.at("spin_time").get_to(b.spin_time);
}

inline void to_json(nlohmann::json& j, const ObjectiveVector& o) {
  j = nlohmann::json{{"optical_density", o.optical_density},
                     {"defect_bright", o.defect_bright},
                     {"defect_dark", o.defect_dark}};
}

inline void from_json(const nlohmann::json& j, ObjectiveVector& o) {
  j.at("optical_density").get_to(o.optical_density);
  j.at("defect_bright").get_to(o.defect_bright);
  j.at("defect_dark").get_to(o.defect_dark);
}

inline void to_json(nlohmann::json& j, const Ambient& a) {
  j = nlohmann::json{{"temperature", a.temperature}, {"humidity", a.humidity}};
}

inline void from_json(const nlohmann::json& j, Ambient& a) {
  j.at("temperature").get_to(a.temperature);
  j.at("humidity").get_to(a.humidity);
}

inline void to_json(nlohmann::json& j, const Provenance& p) {
  j = nlohmann::json{{"spectrum", p.spectrum}, {"bright_image", p.bright_image}, {"dark_image", p.dark_image}};
}

inline void from_json(const nlohmann::json& j, Provenance& p) {
  j.at("spectrum").get_to(p.spectrum);
  j.at("bright_image").get_to(p.bright_image);
  j.at("dark_image").get_to(p.dark_image);
}

inline void to_json(nlohmann::json& j, const SampleRecord& r) {
  j = nlohmann::json{{"sample_id", r.sample_id},
                     {"batch_index", r.batch_index},
                     {"param_set_index", r.param_set_index},
                     {"replicate_index", r.replicate_index},
                     {"params", r.params},
                     {"ambient", r.ambient},
                     {"objectives", r.objectives},
                     {"provenance", r.provenance}};
}

inline void from_json(const nlohmann::json& j, SampleRecord& r) {
  j.at("sample_id").get_to(r.sample_id);
  j.at("batch_index").get_to(r.batch_index);
  j.at("param_set_index").get_to(r.param_set_index);
  j.at("replicate_index").get_to(r.replicate_index);
  j.at("params").get_to(r.params);
  j.at("ambient").get_to(r.ambient);
  j.at("objectives").get_to(r.objectives);
  j.at("provenance").get_to(r.provenance);
}

}  // namespace sdl

#endif
