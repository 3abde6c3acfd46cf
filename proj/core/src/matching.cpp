// Stable matching between a stationarized lattice and a Poisson sample on the
// torus. With distance-based preferences on both sides the stable matching is
// unique almost surely and equals the result of repeatedly pairing mutual
// nearest neighbours; equivalently, scanning all site/candidate pairs in
// increasing distance and accepting a pair whenever both ends are free.
// Pairs are generated within a search radius that doubles until every site
// has a partner.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>
#include <vector>

#include "hyperu/errors.hpp"
#include "hyperu/random.hpp"
#include "hyperu/simulate.hpp"

namespace hyperu {

namespace {

constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();

struct Candidate {
  double distance2;
  std::size_t site;
  std::size_t cand;

  bool operator<(const Candidate& o) const noexcept {
    return std::tie(distance2, site, cand) < std::tie(o.distance2, o.site, o.cand);
  }
};

// Cell grid over a subset of points, cell side >= radius.
class CellGrid {
 public:
  CellGrid(const PointPattern& pts, const std::vector<std::size_t>& members, double radius)
      : dim_(static_cast<std::size_t>(pts.dim())) {
    const double L = pts.box_length();
    per_side_ = std::max<std::size_t>(1, static_cast<std::size_t>(L / radius));
    cell_ = L / static_cast<double>(per_side_);
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim_; ++a) total *= per_side_;
    cells_.resize(total);
    for (std::size_t idx : members) cells_[cell_of(pts.point(idx))].push_back(idx);
  }

  template <typename Fn>
  void visit_neighbors(std::span<const double> p, Fn&& fn) const {
    const std::size_t n = per_side_;
    if (n < 3) {
      for (const auto& c : cells_)
        for (std::size_t idx : c) fn(idx);
      return;
    }
    std::vector<std::size_t> base(dim_);
    for (std::size_t a = 0; a < dim_; ++a) base[a] = coord_cell(p[a]);
    std::size_t offsets = 1;
    for (std::size_t a = 0; a < dim_; ++a) offsets *= 3;
    for (std::size_t o = 0; o < offsets; ++o) {
      std::size_t rest = o;
      std::size_t id = 0;
      for (std::size_t a = 0; a < dim_; ++a) {
        id = id * n + (base[a] + n + rest % 3 - 1) % n;
        rest /= 3;
      }
      for (std::size_t idx : cells_[id]) fn(idx);
    }
  }

 private:
  std::size_t coord_cell(double c) const {
    return std::min(static_cast<std::size_t>(c / cell_), per_side_ - 1);
  }
  std::size_t cell_of(std::span<const double> p) const {
    std::size_t id = 0;
    for (std::size_t a = 0; a < dim_; ++a) id = id * per_side_ + coord_cell(p[a]);
    return id;
  }

  std::size_t dim_;
  std::size_t per_side_;
  double cell_;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace

std::vector<std::size_t> detail::stable_match(const PointPattern& sites,
                                              const PointPattern& candidates) {
  if (sites.dim() != candidates.dim() || sites.box_length() != candidates.box_length())
    throw DomainError("matching requires patterns on the same torus");
  if (candidates.size() < sites.size())
    throw SimulationError("fewer candidates than sites; a complete matching is impossible");

  const std::size_t n = sites.size();
  const std::size_t m = candidates.size();
  const double L = sites.box_length();
  const int d = sites.dim();
  const double volume = std::pow(L, d);
  const double max_reach = 0.5 * L * std::sqrt(static_cast<double>(d));

  std::vector<std::size_t> partner(n, kUnmatched);
  std::vector<char> taken(m, 0);
  std::size_t matched = 0;

  double radius = 2.5 * std::pow(volume / static_cast<double>(std::max<std::size_t>(m, 1)), 1.0 / d);
  std::vector<Candidate> pairs;
  std::vector<std::size_t> free_sites, free_cands;
  while (matched < n) {
    free_sites.clear();
    free_cands.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (partner[i] == kUnmatched) free_sites.push_back(i);
    for (std::size_t j = 0; j < m; ++j)
      if (!taken[j]) free_cands.push_back(j);

    const bool unbounded = radius >= max_reach;
    const double radius2 = unbounded ? std::numeric_limits<double>::infinity() : radius * radius;
    pairs.clear();
    const CellGrid grid(candidates, free_cands, unbounded ? L : radius);
    for (std::size_t i : free_sites) {
      const auto p = sites.point(i);
      grid.visit_neighbors(p, [&](std::size_t j) {
        const double r2 = torus_distance2(p, candidates.point(j), L);
        if (r2 <= radius2) pairs.push_back({r2, i, j});
      });
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& pr : pairs) {
      if (partner[pr.site] == kUnmatched && !taken[pr.cand]) {
        partner[pr.site] = pr.cand;
        taken[pr.cand] = 1;
        ++matched;
      }
    }
    radius *= 2.0;
  }
  return partner;
}

PointPattern sim_matching(const ModelConfig& config, std::uint64_t seed, SimulationStats* stats) {
  const ModelConfig c = detail::validated_as(config, Model::matching);
  const auto side = static_cast<long long>(std::llround(c.box_length));
  const auto d = static_cast<std::size_t>(c.dim);
  long long cells = 1;
  for (std::size_t a = 0; a < d; ++a) cells *= side;

  constexpr std::size_t kMaxRestarts = 1000;
  for (std::size_t restart = 0; restart <= kMaxRestarts; ++restart) {
    auto rng = make_stream(seed, restart);
    std::vector<double> shift(d);
    for (auto& s : shift) s = uniform01(rng);

    PointPattern sites(c.dim, c.box_length);
    sites.reserve(static_cast<std::size_t>(cells));
    std::vector<double> p(d);
    for (long long cell = 0; cell < cells; ++cell) {
      long long rest = cell;
      for (std::size_t a = d; a-- > 0;) {
        p[a] = static_cast<double>(rest % side) + shift[a];
        rest /= side;
      }
      sites.add_wrapped(p);
    }

    std::poisson_distribution<std::uint64_t> count_dist(c.matching_intensity * static_cast<double>(cells));
    const std::uint64_t count = count_dist(rng);
    if (count < static_cast<std::uint64_t>(cells)) continue;

    PointPattern candidates(c.dim, c.box_length);
    candidates.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      for (auto& x : p) x = c.box_length * uniform01(rng);
      candidates.add_wrapped(p);
    }

    const auto partner = detail::stable_match(sites, candidates);
    PointPattern out(c.dim, c.box_length);
    out.reserve(partner.size());
    for (std::size_t j : partner) out.add_wrapped(candidates.point(j));
    if (stats) stats->restarts += restart;
    return out;
  }
  throw SimulationError("matching: Poisson sample smaller than the lattice in every restart");
}

}  // namespace hyperu
