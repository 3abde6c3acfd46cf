#include "hyperu/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperu/errors.hpp"

namespace hyperu {

double wrap(double c, double box_length) noexcept {
  double r = c - box_length * std::floor(c / box_length);
  // floor() can leave r == L for tiny negative c.
  if (r >= box_length || r < 0.0) r = 0.0;
  return r;
}

PointPattern::PointPattern(int dim, double box_length) : dim_(dim), box_length_(box_length) {
  if (dim < 1) throw DomainError("point pattern dimension must be >= 1");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw DomainError("point pattern box length must be positive and finite");
}

PointPattern::PointPattern(int dim, double box_length, std::vector<double> coords)
    : PointPattern(dim, box_length) {
  if (coords.size() % static_cast<std::size_t>(dim) != 0)
    throw DomainError("coordinate count is not a multiple of the dimension");
  for (double c : coords) {
    if (!(c >= 0.0 && c < box_length)) {
      std::ostringstream msg;
      msg << "coordinate " << c << " outside [0, " << box_length << ")";
      throw DomainError(msg.str());
    }
  }
  coords_ = std::move(coords);
}

void PointPattern::add_wrapped(std::span<const double> p) {
  if (p.size() != static_cast<std::size_t>(dim_))
    throw DomainError("point dimension does not match pattern dimension");
  for (double c : p) coords_.push_back(wrap(c, box_length_));
}

std::vector<double> WaveGrid::kappas() const {
  std::vector<double> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(v.kappa);
  return out;
}

WaveVector make_wave_vector(std::span<const int> index, double box_length) {
  WaveVector v;
  v.index.assign(index.begin(), index.end());
  v.components.reserve(index.size());
  const double unit = 2.0 * std::numbers::pi / box_length;
  long long norm2 = 0;
  for (int n : index) {
    v.components.push_back(unit * n);
    norm2 += static_cast<long long>(n) * n;
  }
  v.kappa = unit * unit * static_cast<double>(norm2);
  return v;
}

namespace {

bool in_half_space(std::span<const int> index) {
  for (int n : index) {
    if (n != 0) return n > 0;
  }
  return false;
}

}  // namespace

WaveGrid build_wave_grid(int dim, double box_length, double cutoff) {
  if (dim < 1) throw DomainError("wave grid dimension must be >= 1");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw DomainError("wave grid box length must be positive");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw DomainError("wave grid cutoff must be positive");

  WaveGrid grid{dim, box_length, cutoff, {}};
  const double unit = 2.0 * std::numbers::pi / box_length;
  const double cutoff2 = cutoff * cutoff;
  const int bound = static_cast<int>(std::floor(cutoff / unit)) + 1;

  // Odometer over [-bound, bound]^dim; the last coordinate varies fastest,
  // so emission order is lexicographic.
  std::vector<int> index(static_cast<std::size_t>(dim), -bound);
  while (true) {
    if (in_half_space(index)) {
      long long norm2 = 0;
      for (int n : index) norm2 += static_cast<long long>(n) * n;
      if (unit * unit * static_cast<double>(norm2) < cutoff2)
        grid.vectors.push_back(make_wave_vector(index, box_length));
    }
    int pos = dim - 1;
    while (pos >= 0 && index[static_cast<std::size_t>(pos)] == bound) {
      index[static_cast<std::size_t>(pos)] = -bound;
      --pos;
    }
    if (pos < 0) break;
    ++index[static_cast<std::size_t>(pos)];
  }

  if (grid.vectors.empty()) {
    std::ostringstream msg;
    msg << "no reciprocal-lattice wave vector with |k| < " << cutoff << " for L = " << box_length
        << " (need cutoff > 2*pi/L = " << unit << ")";
    throw EmptyGridError(msg.str());
  }
  return grid;
}

void torus_diff(std::span<const double> a, std::span<const double> b, double box_length,
                std::span<double> out) noexcept {
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = torus_diff(a[j], b[j], box_length);
}

double torus_distance2(std::span<const double> a, std::span<const double> b,
                       double box_length) noexcept {
  double r2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = torus_diff(a[j], b[j], box_length);
    r2 += d * d;
  }
  return r2;
}

}  // namespace hyperu
