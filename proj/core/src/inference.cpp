// Maximum likelihood for independent exponential observations x_j with means
// s + t * kappa_j over the cone {s >= 0, s + t kappa_j > 0}.
//
// For any direction of the mean vector, the scale factor is profiled out in
// closed form (delta = mean(x_j / D_j)), leaving a one-dimensional objective
// P(D) = -sum log D_j - n log sum x_j / D_j. The cone is covered by two charts
// that meet at s = t (with kappa scaled so max kappa = 1):
//   branch A: D_j = y + kappa_j,     y in [0, 1]      (t >= s, y = s/t)
//   branch B: D_j = 1 + w * kappa_j, w in (-1, 1]     (s >= t, w = t/s)
// Branch B with w <= 0 is the t <= 0 part of the cone, i.e. y < -max kappa
// together with the flat spectrum t = 0. The first maximum along the path
// y: 0 -> 1, then w: 1 -> -1 is located as a sign change of dP and refined by
// Brent's root finder to machine precision. The profile is not unimodal on
// the t < 0 part, so that part is also scanned on a fixed grid in w for
// further local maxima; the largest candidate wins.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "hyperu/errors.hpp"
#include "hyperu/inference.hpp"
#include "hyperu/stats.hpp"

namespace hyperu {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_shape(SampleView sample) {
  if (sample.kappa.size() != sample.x.size())
    throw DomainError("kappa and x have different lengths");
  if (sample.size() == 0) throw DomainError("empty spectral sample");
  for (double k : sample.kappa)
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("kappa values must be positive and finite");
}

void require_positive(SampleView sample) {
  require_shape(sample);
  for (double v : sample.x) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "scattering intensities must be positive and finite (got " << v
          << "); zeros indicate an empty pattern or k = 0 leakage";
      throw DomainError(msg.str());
    }
  }
}

// n * sum w_j (u_j - mean u) / sum w_j with u_j = D'_j / D_j, w_j = x_j / D_j:
// the derivative of the profiled objective along a chart, in centred form.
double centred_slope(std::span<const double> x, const std::vector<double>& denom,
                     const std::vector<double>& denom_rate) {
  const std::size_t n = x.size();
  CompensatedSum u_sum;
  for (std::size_t j = 0; j < n; ++j) u_sum.add(denom_rate[j] / denom[j]);
  const double u_bar = u_sum.value() / static_cast<double>(n);
  CompensatedSum num, wsum;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = x[j] / denom[j];
    num.add(w * (denom_rate[j] / denom[j] - u_bar));
    wsum.add(w);
  }
  return static_cast<double>(n) * num.value() / wsum.value();
}

class ProfileCharts {
 public:
  explicit ProfileCharts(SampleView sample) : x_(sample.x) {
    scale_ = *std::max_element(sample.kappa.begin(), sample.kappa.end());
    k_.reserve(sample.size());
    for (double k : sample.kappa) k_.push_back(k / scale_);
    denom_.resize(k_.size());
    rate_.resize(k_.size());
  }

  double scale() const noexcept { return scale_; }

  // Derivative along branch A at y (scaled units).
  double slope_a(double y) {
    for (std::size_t j = 0; j < k_.size(); ++j) {
      denom_[j] = y + k_[j];
      rate_[j] = 1.0;
    }
    return centred_slope(x_, denom_, rate_);
  }

  // Derivative along branch B at w.
  double slope_b(double w) {
    for (std::size_t j = 0; j < k_.size(); ++j) {
      denom_[j] = 1.0 + w * k_[j];
      rate_[j] = k_[j];
    }
    return centred_slope(x_, denom_, rate_);
  }

  // Profiled scale for the mean direction D_j = a + b * k_j.
  double profiled_scale(double a, double b) const {
    CompensatedSum s;
    for (std::size_t j = 0; j < k_.size(); ++j) s.add(x_[j] / (a + b * k_[j]));
    return s.value() / static_cast<double>(k_.size());
  }

 private:
  std::span<const double> x_;
  std::vector<double> k_;
  double scale_;
  std::vector<double> denom_;
  std::vector<double> rate_;
};

// Brent's root finder (bracketing, inverse quadratic interpolation with
// bisection safeguard). Requires fa and fb of opposite sign.
double brent_root(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
  constexpr int kMaxIter = 1000;
  constexpr double kAbsTol = 1e-300;
  if (fa * fb > 0.0) throw NumericalError("root is not bracketed");
  double c = b, fc = fb, d = b - a, e = d;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if (fb * fc > 0.0) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * kAbsTol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if (!std::isfinite(fb)) throw NumericalError("non-finite profile derivative");
  }
  throw NumericalError("profile likelihood root search did not converge");
}

}  // namespace

double loglike(SampleView sample, double s, double t) {
  require_shape(sample);
  if (!(s >= 0.0) || !std::isfinite(s) || !std::isfinite(t))
    throw DomainError("parameter outside the cone: s must be >= 0");
  CompensatedSum acc;
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const double m = s + t * sample.kappa[j];
    if (!(m > 0.0)) throw DomainError("parameter outside the cone: s + t * kappa must be > 0");
    acc.add(-std::log(m) - sample.x[j] / m);
  }
  return acc.value();
}

NullFit mle_h0(SampleView sample) {
  require_positive(sample);
  CompensatedSum s;
  for (std::size_t j = 0; j < sample.size(); ++j) s.add(sample.x[j] / sample.kappa[j]);
  const double t0 = s.value() / static_cast<double>(sample.size());
  return {t0, loglike(sample, 0.0, t0)};
}

double profile_loglike(SampleView sample, double y) {
  require_positive(sample);
  if (!(y >= 0.0)) throw DomainError("profile objective is implemented for y >= 0");
  const double n = static_cast<double>(sample.size());
  CompensatedSum logs, ratio;
  if (std::isinf(y)) {
    for (double v : sample.x) ratio.add(v);
    return -1.0 - n * std::log(ratio.value());
  }
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const double denom = sample.kappa[j] + y;
    logs.add(std::log(denom));
    ratio.add(sample.x[j] / denom);
  }
  return -logs.value() - 1.0 - n * std::log(ratio.value());
}

double profile_derivative_at_zero(SampleView sample) {
  require_positive(sample);
  ProfileCharts charts(sample);
  return charts.slope_a(0.0) / charts.scale();
}

namespace {

// Maximum reached first along the chart path; the atom when dP(0) <= 0.
FullFit first_maximum(SampleView sample, ProfileCharts& charts) {
  const NullFit null_fit = mle_h0(sample);

  const double g0 = charts.slope_a(0.0);
  if (!(g0 > 0.0)) return {0.0, null_fit.t0_hat, null_fit.h0};

  double s_hat, t_hat;
  const double g1 = charts.slope_a(1.0);
  if (g1 < 0.0) {
    const double y = brent_root([&](double v) { return charts.slope_a(v); }, 0.0, 1.0, g0, g1);
    const double delta = charts.profiled_scale(y, 1.0);
    s_hat = delta * y;
    t_hat = delta / charts.scale();
  } else {
    // Slope along w is -slope along y at the junction s = t.
    const double gb_hi = -g1;
    double w;
    if (gb_hi == 0.0) {
      w = 1.0;
    } else {
      double lo = 0.0, g_lo = charts.slope_b(lo);
      for (double gap = 0.5; !(g_lo > 0.0); gap *= 0.125) {
        if (gap < 1e-300) throw NumericalError("could not bracket the profile maximum for t < 0");
        lo = -1.0 + gap;
        g_lo = charts.slope_b(lo);
        if (!std::isfinite(g_lo)) throw NumericalError("non-finite profile derivative");
      }
      w = brent_root([&](double v) { return charts.slope_b(v); }, lo, 1.0, g_lo, gb_hi);
    }
    const double delta = charts.profiled_scale(1.0, w);
    s_hat = delta;
    t_hat = delta * w / charts.scale();
  }
  return {s_hat, t_hat, loglike(sample, s_hat, t_hat)};
}

// Sorted w grid on (-1, 0]: uniform away from -1, geometric towards it where
// maxima with s + t max kappa close to 0 live.
const std::vector<double>& negative_branch_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int i = 30; i >= 1; --i) g.push_back(-1.0 + 0.1 * std::pow(0.25, i - 1));
    for (int i = 1; i <= 24; ++i) g.push_back(-0.9 + 0.9 * i / 24.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }();
  return grid;
}

}  // namespace

FullFit mle_full(SampleView sample) {
  require_positive(sample);
  if (sample.size() < 2) throw DomainError("full-model fit needs at least two observations");
  ProfileCharts charts(sample);
  FullFit best = first_maximum(sample, charts);

  // Local maxima with t < 0: slope_b changes sign from + to - as w increases.
  const auto& grid = negative_branch_grid();
  double w_prev = grid.front(), g_prev = charts.slope_b(w_prev);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double w = grid[i];
    const double g = charts.slope_b(w);
    if (g_prev > 0.0 && g < 0.0 && w <= 0.0) {
      const double root = brent_root([&](double v) { return charts.slope_b(v); }, w_prev, w, g_prev, g);
      const double delta = charts.profiled_scale(1.0, root);
      const double s = delta, t = delta * root / charts.scale();
      double value;
      try {
        value = loglike(sample, s, t);
      } catch (const DomainError&) {
        value = -std::numeric_limits<double>::infinity();
      }
      if (value > best.h1) best = {s, t, value};
    }
    w_prev = w;
    g_prev = g;
  }
  return best;
}

FitResult lr_statistic(SampleView sample) {
  const NullFit null_fit = mle_h0(sample);
  const FullFit full = mle_full(sample);

  FitResult r;
  r.t0_hat = null_fit.t0_hat;
  r.h0 = null_fit.h0;
  r.s_hat = full.s_hat;
  r.t1_hat = full.t1_hat;

  // h1 - h0 accumulated term by term; the two log-likelihoods share most of
  // their magnitude, so differencing the totals would lose digits.
  double gain = 0.0;
  if (full.s_hat > 0.0 || full.t1_hat != null_fit.t0_hat) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < sample.size(); ++j) {
      const double null_mean = null_fit.t0_hat * sample.kappa[j];
      const double mean = full.s_hat + full.t1_hat * sample.kappa[j];
      acc.add(std::log(null_mean / mean) + sample.x[j] / null_mean - sample.x[j] / mean);
    }
    gain = acc.value();
  }
  const double T = 2.0 * gain;
  r.h1 = std::max(full.h1, null_fit.h0);
  if (T <= kAtomThreshold) {
    r.T = 0.0;
    r.atom = true;
  } else {
    r.T = T;
    r.atom = false;
  }
  return r;
}

ProfileScan scan_profile(SampleView sample, std::size_t points) {
  require_positive(sample);
  if (points < 2) throw DomainError("profile scan needs at least two points per branch");
  const FullFit fit = mle_full(sample);
  const double scale = *std::max_element(sample.kappa.begin(), sample.kappa.end());

  ProfileScan scan{-std::numeric_limits<double>::infinity(), 0.0, 0.0, fit.h1, false};
  // Directions (cos th, sin th) in scaled units, th from just above -pi/4
  // (the cone edge s + t max kappa = 0) up to pi/2 (s = 0).
  auto consider = [&](double theta) {
    const double a = std::cos(theta), b = std::sin(theta);
    CompensatedSum inv;
    for (std::size_t j = 0; j < sample.size(); ++j)
      inv.add(sample.x[j] / (a + b * sample.kappa[j] / scale));
    const double delta = inv.value() / static_cast<double>(sample.size());
    const double s = std::max(0.0, delta * a);
    const double t = delta * b / scale;
    double value;
    try {
      value = loglike(sample, s, t);
    } catch (const DomainError&) {
      return;
    }
    if (value > scan.best_value) {
      scan.best_value = value;
      scan.best_s = s;
      scan.best_t = t;
    }
  };
  const double quarter = 0.25 * std::numbers::pi;
  for (std::size_t i = 0; i < points; ++i) {
    consider(-quarter + quarter * static_cast<double>(i + 1) / static_cast<double>(points));
    consider(2.0 * quarter * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  scan.counterexample = scan.best_value > fit.h1 + 1e-9 * std::max(1.0, std::abs(fit.h1));
  return scan;
}

}  // namespace hyperu
