#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hyperu {

/// Reduces a coordinate into [0, box_length).
double wrap(double c, double box_length) noexcept;

/// A finite point set on the flat torus [0, L)^d.
///
/// Coordinates are stored flat (point-major) in [0, L)^d. A centred
/// window differs by a constant translation, which only multiplies
/// the Fourier sum by a unit-modulus factor at reciprocal-lattice wave
/// vectors and therefore leaves every scattering intensity unchanged.
class PointPattern {
 public:
  PointPattern(int dim, double box_length);
  /// Throws DomainError if a coordinate lies outside [0, box_length).
  PointPattern(int dim, double box_length, std::vector<double> coords);

  int dim() const noexcept { return dim_; }
  double box_length() const noexcept { return box_length_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> coordinates() const noexcept { return coords_; }

  /// Appends a point after reducing each coordinate modulo the box length.
  void add_wrapped(std::span<const double> p);
  void reserve(std::size_t n) { coords_.reserve(n * static_cast<std::size_t>(dim_)); }

  bool operator==(const PointPattern&) const = default;

 private:
  int dim_;
  double box_length_;
  std::vector<double> coords_;
};

/// k = 2*pi*index/L with kappa = |k|^2.
struct WaveVector {
  std::vector<int> index;
  std::vector<double> components;
  double kappa = 0.0;

  bool operator==(const WaveVector&) const = default;
};

/// Reciprocal-lattice wave vectors 0 < |k| < cutoff, one representative per
/// {k, -k} pair (first nonzero index entry positive), sorted
/// lexicographically by index.
struct WaveGrid {
  int dim = 0;
  double box_length = 0.0;
  double cutoff = 0.0;
  std::vector<WaveVector> vectors;

  std::size_t size() const noexcept { return vectors.size(); }
  std::vector<double> kappas() const;
};

/// Throws DomainError on bad arguments and EmptyGridError if no wave vector
/// satisfies |k| < cutoff.
WaveGrid build_wave_grid(int dim, double box_length, double cutoff);

/// Builds the wave vector for an integer index on a box of side box_length.
WaveVector make_wave_vector(std::span<const int> index, double box_length);

/// Minimal-image difference a - b, in [-L/2, L/2), for a, b in [0, L).
inline double torus_diff(double a, double b, double box_length) noexcept {
  double d = a - b;
  const double half = 0.5 * box_length;
  if (d >= half) {
    d -= box_length;
  } else if (d < -half) {
    d += box_length;
  }
  return d;
}
void torus_diff(std::span<const double> a, std::span<const double> b, double box_length,
                std::span<double> out) noexcept;
double torus_distance2(std::span<const double> a, std::span<const double> b,
                       double box_length) noexcept;

}  // namespace hyperu
