#include "hyperu/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperu/errors.hpp"
#include "hyperu/stats.hpp"

namespace hyperu {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Off-lattice wave vectors bias E|T(k)|^2 near the origin, so they are refused.
void require_lattice_vector(const PointPattern& pattern, const WaveVector& k) {
  if (k.index.size() != static_cast<std::size_t>(pattern.dim()) ||
      k.components.size() != k.index.size())
    throw DomainError("wave vector dimension does not match the pattern");
  if (std::all_of(k.index.begin(), k.index.end(), [](int n) { return n == 0; }))
    throw DomainError("wave vector k = 0 is not admissible");
  const double unit = kTwoPi / pattern.box_length();
  for (std::size_t j = 0; j < k.index.size(); ++j) {
    const double expected = unit * k.index[j];
    if (std::abs(k.components[j] - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      std::ostringstream msg;
      msg << "wave vector component " << k.components[j]
          << " is not on the reciprocal lattice of a box with L = " << pattern.box_length();
      throw DomainError(msg.str());
    }
  }
}

// exp(-2 pi i * f) for a phase given in turns; reducing f first keeps the
// argument of sin/cos in [0, 2 pi).
std::complex<double> unit_phasor(double turns) {
  const double f = turns - std::floor(turns);
  const double angle = kTwoPi * f;
  return {std::cos(angle), -std::sin(angle)};
}

std::complex<double> direct_sum(const PointPattern& pattern, const WaveVector& k) {
  const double L = pattern.box_length();
  CompensatedSum re, im;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const auto p = pattern.point(i);
    double turns = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double t = static_cast<double>(k.index[j]) * p[j] / L;
      turns += t - std::floor(t);
    }
    const auto z = unit_phasor(turns);
    re.add(z.real());
    im.add(z.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace

std::complex<double> tapered_transform(const PointPattern& pattern, const WaveVector& k) {
  require_lattice_vector(pattern, k);
  const double scale = std::pow(pattern.box_length(), -0.5 * pattern.dim());
  return scale * direct_sum(pattern, k);
}

double scattering_intensity(const PointPattern& pattern, const WaveVector& k) {
  require_lattice_vector(pattern, k);
  if (pattern.empty()) throw EmptyPatternError("scattering intensity of an empty pattern");
  return std::norm(direct_sum(pattern, k)) / static_cast<double>(pattern.size());
}

std::vector<std::complex<double>> fourier_sums(const PointPattern& pattern, const WaveGrid& grid) {
  if (grid.dim != pattern.dim()) throw DomainError("wave grid dimension does not match the pattern");
  for (const auto& k : grid.vectors) require_lattice_vector(pattern, k);

  const auto d = static_cast<std::size_t>(pattern.dim());
  const double L = pattern.box_length();
  int reach = 0;
  for (const auto& k : grid.vectors)
    for (int n : k.index) reach = std::max(reach, std::abs(n));
  const auto width = static_cast<std::size_t>(reach) + 1;

  const std::size_t nvec = grid.size();
  std::vector<int> indices;
  indices.reserve(nvec * d);
  for (const auto& k : grid.vectors) indices.insert(indices.end(), k.index.begin(), k.index.end());

  std::vector<CompensatedSum> re(nvec), im(nvec);
  // Per point and axis, exp(-2 pi i n x_a / L) for 0 <= n <= reach as
  // (real, imag) pairs. Powers come from repeated multiplication of the n = 1
  // phasor; the relative error grows like n * eps, far below what the
  // compensated sums resolve.
  std::vector<double> table_re(d * width), table_im(d * width);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const auto p = pattern.point(i);
    for (std::size_t a = 0; a < d; ++a) {
      const auto base = unit_phasor(p[a] / L);
      double* tr = &table_re[a * width];
      double* ti = &table_im[a * width];
      tr[0] = 1.0;
      ti[0] = 0.0;
      for (std::size_t n = 1; n < width; ++n) {
        tr[n] = tr[n - 1] * base.real() - ti[n - 1] * base.imag();
        ti[n] = tr[n - 1] * base.imag() + ti[n - 1] * base.real();
      }
    }
    const int* idx = indices.data();
    for (std::size_t v = 0; v < nvec; ++v, idx += d) {
      double zr = 1.0, zi = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const int n = idx[a];
        const std::size_t m = a * width + static_cast<std::size_t>(n >= 0 ? n : -n);
        const double wr = table_re[m], wi = n >= 0 ? table_im[m] : -table_im[m];
        const double r = zr * wr - zi * wi;
        zi = zr * wi + zi * wr;
        zr = r;
      }
      re[v].add(zr);
      im[v].add(zi);
    }
  }

  std::vector<std::complex<double>> out(nvec);
  for (std::size_t v = 0; v < nvec; ++v) out[v] = {re[v].value(), im[v].value()};
  return out;
}

SpectralSample spectral_sample(const PointPattern& pattern, const WaveGrid& grid) {
  if (pattern.empty()) throw EmptyPatternError("spectral sample of an empty pattern");
  const auto sums = fourier_sums(pattern, grid);
  SpectralSample s;
  s.dim = grid.dim;
  s.box_length = grid.box_length;
  s.cutoff = grid.cutoff;
  s.kappa = grid.kappas();
  s.x.reserve(sums.size());
  const double n = static_cast<double>(pattern.size());
  for (const auto& z : sums) s.x.push_back(std::norm(z) / n);
  return s;
}

double ccdf_at(std::span<const double> sorted, double z) {
  const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), z);
  return static_cast<double>(above) / static_cast<double>(sorted.size());
}

std::vector<CcdfPoint> scaled_ccdf(std::span<const double> samples, std::size_t points) {
  if (samples.empty()) throw DomainError("CCDF of an empty sample");
  const double m = mean(samples);
  if (!(m > 0.0)) throw DomainError("CCDF scaling needs a positive sample mean");
  std::vector<double> scaled(samples.begin(), samples.end());
  for (auto& v : scaled) v /= m;
  std::sort(scaled.begin(), scaled.end());

  std::vector<CcdfPoint> table;
  table.push_back({0.0, ccdf_at(scaled, 0.0)});
  const double lo = 1e-3;
  const double hi = std::max(scaled.back(), 2.0 * lo);
  if (points >= 2) {
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
      const double z = lo * std::exp(step * static_cast<double>(i));
      table.push_back({z, ccdf_at(scaled, z)});
    }
  } else if (points == 1) {
    table.push_back({hi, ccdf_at(scaled, hi)});
  }
  return table;
}

std::vector<std::vector<double>> cross_correlation(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 100) throw DomainError("cross-correlation needs at least 100 replicates");
  const std::size_t n = rows.front().size();
  if (n < 2) throw DomainError("cross-correlation needs at least two wave vectors");
  for (const auto& r : rows)
    if (r.size() != n) throw DomainError("ragged replicate matrix");

  const double reps = static_cast<double>(rows.size());
  std::vector<double> mu(n, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < n; ++j) mu[j] += r[j];
  for (auto& v : mu) v /= reps;

  std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
  for (const auto& r : rows) {
    for (std::size_t a = 0; a < n; ++a) {
      const double da = r[a] - mu[a];
      for (std::size_t b = a; b < n; ++b) cov[a][b] += da * (r[b] - mu[b]);
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    if (!(cov[a][a] > 0.0)) throw DomainError("zero-variance column in cross-correlation");

  std::vector<std::vector<double>> rho(n, std::vector<double>(n, 1.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double r = cov[a][b] / std::sqrt(cov[a][a] * cov[b][b]);
      rho[a][b] = rho[b][a] = std::clamp(r, -1.0, 1.0);
    }
  }
  return rho;
}

}  // namespace hyperu
