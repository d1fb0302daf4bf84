#ifndef SDL_SURROGATE_LINALG_HPP
#define SDL_SURROGATE_LINALG_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "sdl/error.hpp"

namespace sdl::surrogate {

inline constexpr double kMinJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-4;

struct JitteredCholesky {
  Eigen::MatrixXd lower;  // L with L L^T = A + jitter I
  double jitter = 0.0;
};

/// Cholesky of a symmetric matrix, adding diagonal jitter that grows by x10
/// from `start` up to 1e-4. Throws NumericalError when every level fails.
inline JitteredCholesky cholesky_with_jitter(const Eigen::MatrixXd& a, double start = kMinJitter) {
  const Eigen::Index n = a.rows();
  double jitter = std::max(start, kMinJitter);
  while (jitter <= kMaxJitter * (1.0 + 1e-12)) {
    Eigen::MatrixXd shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd l = llt.matrixL();
      bool finite = l.allFinite();
      for (Eigen::Index i = 0; finite && i < n; ++i) finite = l(i, i) > 0.0;
      if (finite) return {std::move(l), jitter};
    }
    jitter *= 10.0;
  }
  throw NumericalError("Cholesky factorization failed after jitter escalation to " +
                       std::to_string(kMaxJitter));
}

/// Factor R with R R^T = A for a positive semi-definite A. Exactly zero
/// directions stay zero, so a zero covariance yields draws equal to the mean.
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return Eigen::MatrixXd(0, 0);
  const double scale = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd shifted = a;
    shifted.diagonal().array() += jitter * scale;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd d = ldlt.vectorD();
      if (d.minCoeff() >= -1e-8 * scale) {
        d = d.cwiseMax(0.0).cwiseSqrt();
        Eigen::MatrixXd l = ldlt.matrixL();
        Eigen::MatrixXd factor = ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
        if (factor.allFinite()) return factor;
      }
    }
    jitter = jitter == 0.0 ? kMinJitter : jitter * 10.0;
    if (jitter > kMaxJitter * (1.0 + 1e-12))
      throw NumericalError("covariance is not positive semi-definite after jitter escalation");
  }
}

}  // namespace sdl::surrogate

#endif
