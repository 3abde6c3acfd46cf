#pragma once

#include <cstddef>
#include <span>

#include "hyperu/spectral.hpp"

namespace hyperu {

/// Non-owning (kappa, x) view; every fitting routine works on this.
struct SampleView {
  std::span<const double> kappa;
  std::span<const double> x;

  SampleView(std::span<const double> k, std::span<const double> v) : kappa(k), x(v) {}
  SampleView(const SpectralSample& s) : kappa(s.kappa), x(s.x) {}  // NOLINT(implicit)

  std::size_t size() const noexcept { return x.size(); }
};

/// Values of T at or below this are treated as the boundary maximum s = 0.
inline constexpr double kAtomThreshold = 1e-8;

/// Exponential log-likelihood of x_j with means s + t * kappa_j.
/// Throws DomainError if (s, t) lies outside the cone s >= 0, s + t kappa_j > 0.
double loglike(SampleView sample, double s, double t);

struct NullFit {
  double t0_hat;
  double h0;
};

/// Closed-form maximum under s = 0: t0 = mean(x_j / kappa_j).
/// Throws DomainError for empty input, non-positive kappa or x.
NullFit mle_h0(SampleView sample);

/// Profile objective in y = s/t for y >= 0 (t profiled out); y = 0 returns
/// the right limit and y = +inf the flat-spectrum limit.
double profile_loglike(SampleView sample, double y);

/// Right derivative of the profile objective at y = 0. The full-model
/// maximum sits on s = 0 exactly when this is <= 0.
double profile_derivative_at_zero(SampleView sample);

struct FullFit {
  double s_hat;
  double t1_hat;
  double h1;
};

/// Maximum of the log-likelihood over the whole cone. Throws
/// NumericalError if the one-dimensional root search fails.
FullFit mle_full(SampleView sample);

struct FitResult {
  double t0_hat = 0.0;
  double h0 = 0.0;
  double s_hat = 0.0;
  double t1_hat = 0.0;
  double h1 = 0.0;
  /// 2 (h1 - h0), clipped to 0 at or below kAtomThreshold.
  double T = 0.0;
  bool atom = true;
};

FitResult lr_statistic(SampleView sample);

/// Result of a brute-force scan of the profile over the whole cone.
struct ProfileScan {
  double best_value;   ///< best profile value (log-likelihood units) found on the grid
  double best_s;       ///< (s, t) at the best grid point
  double best_t;
  double fitted_value; ///< h1 reported by mle_full
  /// True when the grid found a point beating mle_full by more than 1e-9;
  /// such a sample is a counterexample to the single-maximizer assumption.
  bool counterexample;
};

/// Evaluates the profiled log-likelihood on `points` directions spanning the
/// cone, both the t > 0 half and the t <= 0 half (the y < -max kappa branch),
/// and compares with mle_full.
ProfileScan scan_profile(SampleView sample, std::size_t points = 64);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_lower(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
double regularized_gamma_upper(double a, double x);

}  // namespace hyperu
