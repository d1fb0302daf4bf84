#include <gtest/gtest.h>

#include <cmath>

#include "sdl/acquisition/nehvi.hpp"

using namespace sdl;
using namespace sdl::acquisition;
using surrogate::GpModel;
using surrogate::Hyperparameters;

namespace {

Hyperparameters hyper(double l, double s, double n) {
  Hyperparameters h;
  h.lengthscales = Eigen::VectorXd::Constant(1, l);
  h.signal_variance = s;
  h.noise_variance = n;
  return h;
}

double hv2(std::vector<std::array<double, 2>> pts, std::array<double, 2> ref) {
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a[0] > b[0]; });
  double area = 0.0, ybest = ref[1];
  for (auto& p : pts) {
    if (p[0] <= ref[0] || p[1] <= ybest) continue;
    area += (p[0] - ref[0]) * (p[1] - ybest);
    ybest = p[1];
  }
  return area;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); }

// Two observed points with near-zero noise, one objective per model. A
// candidate far from the data has the prior as its predictive distribution.
struct Fixture {
  Eigen::MatrixXd x{3, 1};
  GpModel f1, f2;
  Fixture() {
    x << 0.0, 0.05, 0.1;
    Eigen::VectorXd y1(3), y2(3);
    y1 << 1.0, 3.0, 0.5;
    y2 << -0.5, -1.5, -1.9;
    const std::vector<Interval> b{{0.0, 1.0}};
    f1 = GpModel::condition(x, y1, b, hyper(0.05, 1.0, 1e-10));
    f2 = GpModel::condition(x, y2, b, hyper(0.05, 1.0, 1e-10));
  }
  std::vector<const GpModel*> models() const { return {&f1, &f2}; }
};

}  // namespace

TEST(Nehvi, MatchesQuadratureForIndependentCandidate) {
  Fixture fx;
  AcquisitionConfig cfg;
  cfg.mc_samples = 20000;
  cfg.seed = 9;
  const ReferencePoint ref{{0.0, -2.0}};
  Eigen::MatrixXd cand(1, 1);
  cand << 1.0;
  const auto p1 = fx.f1.predict(cand), p2 = fx.f2.predict(cand);
  const double m1 = p1.mean[0], s1 = std::sqrt(p1.variance[0]);
  const double m2 = p2.mean[0], s2 = std::sqrt(p2.variance[0]);

  // Observed values are the baseline; the third point is dominated.
  const std::vector<std::array<double, 2>> base{{1.0, -0.5}, {3.0, -1.5}, {0.5, -1.9}};
  const double hv0 = hv2(base, {0.0, -2.0});
  const int grid = 600;
  const double span = 7.0;
  const double h = 2 * span / grid;
  double expected = 0.0, mass = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double z1 = -span + (i + 0.5) * h;
    for (int j = 0; j < grid; ++j) {
      const double z2 = -span + (j + 0.5) * h;
      const double w = normal_pdf(z1) * normal_pdf(z2) * h * h;
      auto pts = base;
      pts.push_back({m1 + s1 * z1, m2 + s2 * z2});
      expected += w * (hv2(pts, {0.0, -2.0}) - hv0);
      mass += w;
    }
  }
  expected /= mass;

  const auto est = nehvi_estimate(fx.models(), cand, fx.x, ref, cfg);
  EXPECT_NEAR(est.raw_mean, expected, 4.0 * est.std_error + 1e-4);
  EXPECT_GT(est.value, 0.0);
}

TEST(Nehvi, DominatedCertainCandidateScoresAtMostTau) {
  Fixture fx;
  AcquisitionConfig cfg;
  cfg.mc_samples = 64;
  const ReferencePoint ref{{0.0, -2.0}};
  Eigen::MatrixXd cand(1, 1);
  cand << 0.1;
  const auto est = nehvi_estimate(fx.models(), cand, fx.x, ref, cfg);
  EXPECT_NEAR(est.raw_mean, 0.0, 1e-9);
  EXPECT_LE(est.value, cfg.tau);
}

TEST(Nehvi, DominatedObservationsArePruned) {
  Fixture fx;
  AcquisitionConfig cfg;
  cfg.mc_samples = 64;
  NehviEvaluator ev(fx.models(), fx.x, ReferencePoint{{0.0, -2.0}}, cfg);
  EXPECT_EQ(ev.baseline_size(), 2);
}

TEST(Nehvi, JointBatchValueIsMonotone) {
  Fixture fx;
  AcquisitionConfig cfg;
  cfg.mc_samples = 256;
  const ReferencePoint ref{{0.0, -2.0}};
  Eigen::MatrixXd one(1, 1), two(2, 1);
  one << 0.7;
  two << 0.7, 0.4;
  const auto a = nehvi_estimate(fx.models(), one, fx.x, ref, cfg);
  const auto b = nehvi_estimate(fx.models(), two, fx.x, ref, cfg);
  EXPECT_GE(b.raw_mean, a.raw_mean);
}

TEST(Nehvi, CommonRandomNumbersMakeEvaluationDeterministic) {
  Fixture fx;
  AcquisitionConfig cfg;
  cfg.mc_samples = 64;
  cfg.seed = 3;
  NehviEvaluator ev(fx.models(), fx.x, ReferencePoint{{0.0, -2.0}}, cfg);
  Eigen::MatrixXd xs(3, 1);
  xs << 0.3, 0.6, 0.9;
  const auto many = ev.evaluate_many(xs, 0);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(ev.evaluate(xs.row(i), 0).log_value, many[static_cast<std::size_t>(i)].log_value);
}

TEST(Nehvi, PendingPointReducesItsOwnValue) {
  Fixture fx;
  AcquisitionConfig cfg;
  cfg.mc_samples = 128;
  NehviEvaluator ev(fx.models(), fx.x, ReferencePoint{{0.0, -2.0}}, cfg);
  Eigen::RowVectorXd c(1);
  c << 0.8;
  const double before = ev.evaluate(c, 1).raw_mean;
  ev.add_pending(c, 0);
  const double after = ev.evaluate(c, 1).raw_mean;
  EXPECT_GT(before, 0.0);
  EXPECT_LT(after, before);
}

TEST(Nehvi, LogSmoothingIsStableAcrossScales) {
  const double tau = 1e-3;
  EXPECT_NEAR(detail::log_smoothed(0.0, tau), std::log(tau * std::log(2.0)), 1e-12);
  EXPECT_NEAR(detail::log_smoothed(10.0, tau), std::log(10.0), 1e-9);
  EXPECT_TRUE(std::isfinite(detail::log_smoothed(-10.0, tau)));
  double prev = -INFINITY;
  for (double x = -0.01; x < 0.01; x += 1e-5) {
    const double v = detail::log_smoothed(x, tau);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Nehvi, RejectsBadConfiguration) {
  Fixture fx;
  AcquisitionConfig cfg;
  cfg.mc_samples = 8;
  EXPECT_THROW(NehviEvaluator(fx.models(), fx.x, ReferencePoint{{0.0, -2.0}}, cfg), ValidationError);
  cfg.mc_samples = 32;
  EXPECT_THROW(NehviEvaluator(fx.models(), fx.x, ReferencePoint{{0.0, -2.0, -2.0}}, cfg), ValidationError);
}
