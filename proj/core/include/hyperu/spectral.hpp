#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hyperu/core.hpp"

namespace hyperu {

/// Paired (kappa_j, x_j) scattering-intensity observations in grid order.
struct SpectralSample {
  std::vector<double> kappa;
  std::vector<double> x;

  int dim = 0;
  double box_length = 0.0;
  double cutoff = 0.0;
  std::string source;

  std::size_t size() const noexcept { return x.size(); }
};

/// L^{-d/2} * sum_x exp(-i <k, x>) with the cubic (box indicator) taper.
/// Throws DomainError unless k is a nonzero reciprocal-lattice vector of the
/// pattern's box.
std::complex<double> tapered_transform(const PointPattern& pattern, const WaveVector& k);

/// |sum_x exp(-i <k, x>)|^2 / N. Throws EmptyPatternError for N = 0.
double scattering_intensity(const PointPattern& pattern, const WaveVector& k);

/// Unnormalized Fourier sums sum_x exp(-i <k, x>) for every grid vector.
std::vector<std::complex<double>> fourier_sums(const PointPattern& pattern, const WaveGrid& grid);

/// Scattering intensities at every grid vector.
SpectralSample spectral_sample(const PointPattern& pattern, const WaveGrid& grid);

struct CcdfPoint {
  double z;
  double ccdf;
};

/// Complementary ECDF of samples / mean(samples): row z = 0 followed by
/// `points` log-spaced abscissae from 1e-3 up to the largest scaled value.
/// Throws DomainError on empty input or non-positive mean.
std::vector<CcdfPoint> scaled_ccdf(std::span<const double> samples, std::size_t points = 200);

/// Fraction of sorted values strictly greater than z.
double ccdf_at(std::span<const double> sorted, double z);

/// Pearson correlation matrix of the columns of `rows` (replicates x wave
/// vectors). Requires >= 2 columns and >= 100 rows; throws DomainError for a
/// zero-variance column.
std::vector<std::vector<double>> cross_correlation(const std::vector<std::vector<double>>& rows);

}  // namespace hyperu
