// Random sequential adsorption conditioned on a fixed number of spheres.
//
// Insertion runs in two phases: plain uniform trials while the acceptance
// rate is high, then uniform trials restricted to a voxel cover of the
// remaining available space. Voxels are refined by halving and dropped once a
// single existing sphere's exclusion ball contains all of their corners, so
// the union of live voxels always contains the available space and trial
// points stay uniform on it.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hyperu/errors.hpp"
#include "hyperu/random.hpp"
#include "hyperu/simulate.hpp"

namespace hyperu {

namespace {

constexpr std::size_t kPhaseOneMisses = 200;
constexpr std::size_t kAttemptsPerPoint = 10000;
constexpr int kMaxRefinements = 48;

class HardCorePacking {
 public:
  HardCorePacking(int dim, double box_length, double diameter)
      : dim_(static_cast<std::size_t>(dim)), box_(box_length), diameter2_(diameter * diameter) {
    cells_per_side_ = std::max<std::size_t>(1, static_cast<std::size_t>(box_length / diameter));
    cell_size_ = box_length / static_cast<double>(cells_per_side_);
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim_; ++a) total *= cells_per_side_;
    cells_.resize(total);
  }

  std::size_t size() const noexcept { return points_.size() / dim_; }
  const std::vector<double>& points() const noexcept { return points_; }

  bool fits(const double* p) const {
    bool ok = true;
    visit_neighbors(p, [&](std::size_t idx) {
      if (distance2(p, &points_[idx * dim_]) < diameter2_) ok = false;
      return ok;
    });
    return ok;
  }

  void insert(const double* p) {
    const std::size_t idx = size();
    points_.insert(points_.end(), p, p + dim_);
    cells_[cell_of(p)].push_back(idx);
  }

  /// True if one sphere's exclusion ball contains the whole voxel.
  bool covers(const double* lo, double side) const {
    bool covered = false;
    visit_neighbors(lo, [&](std::size_t idx) {
      const double* c = &points_[idx * dim_];
      double far2 = 0.0;
      for (std::size_t a = 0; a < dim_; ++a) {
        const double d0 = torus_diff(lo[a], c[a], box_);
        const double d1 = d0 + side;
        far2 += std::max(d0 * d0, d1 * d1);
      }
      if (far2 < diameter2_) covered = true;
      return !covered;
    });
    return covered;
  }

 private:
  double distance2(const double* a, const double* b) const {
    double r2 = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double d = torus_diff(a[j], b[j], box_);
      r2 += d * d;
    }
    return r2;
  }

  std::size_t coord_cell(double c) const {
    auto i = static_cast<std::size_t>(c / cell_size_);
    return std::min(i, cells_per_side_ - 1);
  }

  std::size_t cell_of(const double* p) const {
    std::size_t id = 0;
    for (std::size_t a = 0; a < dim_; ++a) id = id * cells_per_side_ + coord_cell(p[a]);
    return id;
  }

  // Calls fn(point index) for points in the 3^d cells around p; stops early
  // when fn returns false. Small grids visit each cell once.
  template <typename Fn>
  void visit_neighbors(const double* p, Fn&& fn) const {
    const std::size_t n = cells_per_side_;
    if (n < 3) {
      for (const auto& cell : cells_)
        for (std::size_t idx : cell)
          if (!fn(idx)) return;
      return;
    }
    std::size_t base[3] = {0, 0, 0};
    for (std::size_t a = 0; a < dim_; ++a) base[a] = coord_cell(p[a]);
    std::size_t offsets = 1;
    for (std::size_t a = 0; a < dim_; ++a) offsets *= 3;
    for (std::size_t o = 0; o < offsets; ++o) {
      std::size_t rest = o;
      std::size_t id = 0;
      for (std::size_t a = 0; a < dim_; ++a) {
        const std::size_t shift = rest % 3;
        rest /= 3;
        id = id * n + (base[a] + n + shift - 1) % n;
      }
      for (std::size_t idx : cells_[id])
        if (!fn(idx)) return;
    }
  }

  std::size_t dim_;
  double box_;
  double diameter2_;
  std::size_t cells_per_side_;
  double cell_size_;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<double> points_;
};

// One RSA run; returns false when the packing saturates (or exhausts the
// attempt budget) before `count` spheres are placed.
bool rsa_attempt(int dim, double box, std::size_t count, double diameter, Xoshiro256& rng,
                 std::vector<double>& out, std::size_t& attempts) {
  const auto d = static_cast<std::size_t>(dim);
  HardCorePacking packing(dim, box, diameter);
  const std::size_t budget = kAttemptsPerPoint * count;
  std::vector<double> p(d);

  std::size_t misses = 0;
  while (packing.size() < count && misses < kPhaseOneMisses) {
    if (++attempts > budget) return false;
    for (auto& c : p) c = box * uniform01(rng);
    if (packing.fits(p.data())) {
      packing.insert(p.data());
      misses = 0;
    } else {
      ++misses;
    }
  }

  if (packing.size() < count) {
    // Voxel side chosen so the voxel diagonal does not exceed the diameter.
    const auto per_side = static_cast<std::size_t>(std::ceil(box * std::sqrt(double(dim)) / diameter));
    double side = box / static_cast<double>(per_side);
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= per_side;

    std::vector<double> voxels;
    voxels.reserve(total * d);
    std::vector<double> lo(d);
    for (std::size_t v = 0; v < total; ++v) {
      std::size_t rest = v;
      for (std::size_t a = d; a-- > 0;) {
        lo[a] = static_cast<double>(rest % per_side) * side;
        rest /= per_side;
      }
      if (!packing.covers(lo.data(), side)) voxels.insert(voxels.end(), lo.begin(), lo.end());
    }

    std::vector<double> refined;
    for (int level = 0; packing.size() < count; ++level) {
      const std::size_t live = voxels.size() / d;
      if (live == 0 || level > kMaxRefinements) return false;
      const std::size_t trials = 4 * live;
      for (std::size_t t = 0; t < trials && packing.size() < count; ++t) {
        if (++attempts > budget) return false;
        const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(live));
        const double* v = &voxels[std::min(pick, live - 1) * d];
        for (std::size_t a = 0; a < d; ++a) p[a] = wrap(v[a] + side * uniform01(rng), box);
        if (packing.fits(p.data())) packing.insert(p.data());
      }
      if (packing.size() >= count) break;

      const double half = 0.5 * side;
      const std::size_t children = std::size_t{1} << d;
      refined.clear();
      for (std::size_t i = 0; i < live; ++i) {
        const double* v = &voxels[i * d];
        if (packing.covers(v, side)) continue;
        for (std::size_t c = 0; c < children; ++c) {
          for (std::size_t a = 0; a < d; ++a) lo[a] = v[a] + (((c >> a) & 1U) ? half : 0.0);
          if (!packing.covers(lo.data(), half)) refined.insert(refined.end(), lo.begin(), lo.end());
        }
      }
      voxels.swap(refined);
      side = half;
    }
  }

  out = packing.points();
  return true;
}

}  // namespace

PointPattern sim_rsa(const ModelConfig& config, std::uint64_t seed, SimulationStats* stats) {
  const ModelConfig c = detail::validated_as(config, Model::rsa);
  const std::size_t count =
      c.rsa_count.value_or(static_cast<std::size_t>(std::llround(c.intensity * std::pow(c.box_length, c.dim))));
  if (count == 0) throw DomainError("RSA point count must be positive");
  const double phi = c.volume_fraction.value_or(rsa_default_volume_fraction(c.dim));
  const double diameter = 2.0 * rsa_radius(count, phi, c.dim, c.box_length);
  if (count > 1 && diameter >= 0.5 * c.box_length)
    throw DomainError("RSA spheres are too large for the periodic box");

  std::vector<double> coords;
  std::size_t attempts = 0;
  for (std::size_t restart = 0; restart <= c.rsa_max_restarts; ++restart) {
    auto rng = make_stream(seed, restart);
    if (rsa_attempt(c.dim, c.box_length, count, diameter, rng, coords, attempts)) {
      if (stats) {
        stats->restarts += restart;
        stats->attempts += attempts;
      }
      return PointPattern(c.dim, c.box_length, std::move(coords));
    }
  }
  throw SimulationError("RSA saturated before reaching the requested point count in every restart");
}

}  // namespace hyperu
