#ifndef SDL_VIRTLAB_GROUND_TRUTH_HPP
#define SDL_VIRTLAB_GROUND_TRUTH_HPP

#include <cmath>
#include <memory>

#include <json.hpp>

#include "sdl/domain.hpp"
#include "sdl/error.hpp"

namespace sdl::virtlab {

/// Constants of the hidden process-to-property map. kappa and a_half solve
/// the two OD anchors (1.5 at 3000 rpm/s, 0.6 at 1000 rpm/s; c = 4 wt%,
/// 500 rpm, 10 s) exactly for tau_t = 8 s and od_sat = 6.
struct GroundTruthParams {
  double kappa = 2.3633413990190024;
  double a_half = 10203.979386548934;  // rpm/s
  double tau_t = 8.0;                  // s
  double omega_ref = 500.0;            // rpm
  double od_sat = 6.0;
  double d0 = 0.04;
  double d_c = 0.0875;
  double d_a = 0.0225;
  double d_spike = 1.30;
  double spike_center = 300.0;  // rpm
  double spike_width = 100.0;   // rpm
  double bright_share = 0.6;    // remainder goes to the dark-background channel

  void validate() const {
    for (double v : {kappa, a_half, tau_t, omega_ref, od_sat, d0, d_c, d_a, d_spike, spike_center, spike_width})
      require(std::isfinite(v) && v > 0.0, "ground truth constants must be positive");
    require(bright_share > 0.0 && bright_share < 1.0, "bright_share must lie in (0, 1)");
  }
};

inline void to_json(nlohmann::json& j, const GroundTruthParams& g) {
  j = nlohmann::json{{"kappa", g.kappa},         {"a_half", g.a_half},         {"tau_t", g.tau_t},
                     {"omega_ref", g.omega_ref}, {"od_sat", g.od_sat},         {"d0", g.d0},
                     {"d_c", g.d_c},             {"d_a", g.d_a},               {"d_spike", g.d_spike},
                     {"spike_center", g.spike_center}, {"spike_width", g.spike_width},
                     {"bright_share", g.bright_share}};
}

inline void from_json(const nlohmann::json& j, GroundTruthParams& g) {
  GroundTruthParams d;
  g.kappa = j.value("kappa", d.kappa);
  g.a_half = j.value("a_half", d.a_half);
  g.tau_t = j.value("tau_t", d.tau_t);
  g.omega_ref = j.value("omega_ref", d.omega_ref);
  g.od_sat = j.value("od_sat", d.od_sat);
  g.d0 = j.value("d0", d.d0);
  g.d_c = j.value("d_c", d.d_c);
  g.d_a = j.value("d_a", d.d_a);
  g.d_spike = j.value("d_spike", d.d_spike);
  g.spike_center = j.value("spike_center", d.spike_center);
  g.spike_width = j.value("spike_width", d.spike_width);
  g.bright_share = j.value("bright_share", d.bright_share);
  g.validate();
}

/// Swappable hidden truth.
class GroundTruth {
public:
  virtual ~GroundTruth() = default;
  virtual ObjectiveVector evaluate(const ParameterSet& p) const = 0;
  /// Upper bound used to truncate noisy OD draws.
  virtual double od_ceiling() const = 0;
  virtual const ParameterBounds& bounds() const = 0;
};

class CalibratedGroundTruth final : public GroundTruth {
public:
  explicit CalibratedGroundTruth(GroundTruthParams g = {}, ParameterBounds b = {}) : g_(g), bounds_(b) {
    g_.validate();
    bounds_.validate();
  }

  double optical_density(const ParameterSet& p) const {
    check(p);
    const double raw = g_.kappa * p.concentration * std::sqrt(g_.omega_ref / p.spin_speed) *
                       (1.0 - std::exp(-p.spin_time / g_.tau_t)) *
                       (p.spin_acceleration / (p.spin_acceleration + g_.a_half));
    return g_.od_sat * std::tanh(raw / g_.od_sat);
  }

  double defect_total(const ParameterSet& p) const {
    check(p);
    const double cr = p.concentration / 4.0;
    const double z = (p.spin_speed - g_.spike_center) / g_.spike_width;
    const double ar = p.spin_acceleration / 3000.0;
    return g_.d0 + g_.d_c * cr * cr * (g_.omega_ref / p.spin_speed) + g_.d_a * ar * ar * cr +
           g_.d_spike * std::exp(-z * z) * cr;
  }

  ObjectiveVector evaluate(const ParameterSet& p) const override {
    const double d = defect_total(p);
    return {optical_density(p), g_.bright_share * d, (1.0 - g_.bright_share) * d};
  }

  double od_ceiling() const override { return g_.od_sat; }
  const ParameterBounds& bounds() const override { return bounds_; }
  const GroundTruthParams& params() const { return g_; }

private:
  void check(const ParameterSet& p) const {
    if (!bounds_.contains(p)) throw ValidationError("ground truth: parameters outside the bounds box");
  }

  GroundTruthParams g_;
  ParameterBounds bounds_;
};

inline ObjectiveVector ground_truth(const ParameterSet& p) { return CalibratedGroundTruth{}.evaluate(p); }

}  // namespace sdl::virtlab

#endif
