#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hyperu/errors.hpp"
#include "hyperu/random.hpp"
#include "hyperu/simulate.hpp"

namespace hyperu {
namespace {

ModelConfig config_for(Model m, double L = 35.0, int dim = 2) {
  ModelConfig c;
  c.model = m;
  c.box_length = L;
  c.dim = dim;
  return c;
}

double mean_count(const ModelConfig& c, int reps) {
  double total = 0.0;
  for (int r = 0; r < reps; ++r) total += static_cast<double>(simulate(c, derive_seed(99, r)).size());
  return total / reps;
}

TEST(Models, ParseAndName) {
  for (Model m : {Model::poisson, Model::thomas, Model::rsa, Model::url, Model::matching})
    EXPECT_EQ(parse_model(model_name(m)), m);
  EXPECT_THROW(parse_model("ginibre"), DomainError);
}

TEST(Simulate, DeterministicForEveryModel) {
  for (Model m : {Model::poisson, Model::thomas, Model::rsa, Model::url, Model::matching}) {
    ModelConfig c = config_for(m, 20.0);
    EXPECT_EQ(simulate(c, 5), simulate(c, 5)) << model_name(m);
    EXPECT_NE(simulate(c, 5), simulate(c, 6)) << model_name(m);
  }
}

TEST(Simulate, CoordinatesInsideBox) {
  for (Model m : {Model::poisson, Model::thomas, Model::rsa, Model::url, Model::matching}) {
    const PointPattern p = simulate(config_for(m, 20.0), 11);
    for (double c : p.coordinates()) {
      ASSERT_GE(c, 0.0);
      ASSERT_LT(c, 20.0);
    }
  }
}

TEST(Poisson, MeanCount) {
  const double m = mean_count(config_for(Model::poisson), 400);
  EXPECT_NEAR(m, 1225.0, 4.0 * std::sqrt(1225.0 / 400));
}

TEST(Poisson, ZeroIntensityIsEmpty) {
  ModelConfig c = config_for(Model::poisson);
  c.intensity = 0.0;
  EXPECT_TRUE(sim_poisson(c, 1).empty());
}

TEST(Thomas, MeanCount) {
  // Var N = lambda_p L^2 * E[K^2] = 122.5 * 110.
  const double m = mean_count(config_for(Model::thomas), 400);
  EXPECT_NEAR(m, 1225.0, 4.0 * std::sqrt(122.5 * 110.0 / 400));
}

TEST(Thomas, ZeroSpreadStacksChildrenOnParents) {
  ModelConfig c = config_for(Model::thomas, 20.0);
  c.cluster_std = 0.0;
  const PointPattern p = sim_thomas(c, 3);
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < p.size(); ++i) pts.emplace_back(p.point(i).begin(), p.point(i).end());
  std::sort(pts.begin(), pts.end());
  const auto distinct = std::unique(pts.begin(), pts.end()) - pts.begin();
  EXPECT_LT(static_cast<std::size_t>(distinct), p.size());
}

TEST(Url, OnePointPerCell) {
  ModelConfig c = config_for(Model::url, 50.0);
  const PointPattern p = sim_url(c, 8);
  ASSERT_EQ(p.size(), 2500u);
  std::vector<int> occupied(2500, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int a = static_cast<int>(std::floor(p.point(i)[0]));
    const int b = static_cast<int>(std::floor(p.point(i)[1]));
    occupied[static_cast<std::size_t>(a * 50 + b)] += 1;
  }
  // The global shift moves each cell's point into at most four unit cells.
  EXPECT_LE(*std::max_element(occupied.begin(), occupied.end()), 4);
}

TEST(Url, WithoutShiftEachCellHoldsOnePoint) {
  // One dimension: points sorted by their cell index are one per cell up to the shift.
  ModelConfig c = config_for(Model::url, 40.0, 1);
  const PointPattern p = sim_url(c, 2);
  ASSERT_EQ(p.size(), 40u);
  std::vector<double> x(p.coordinates().begin(), p.coordinates().end());
  std::sort(x.begin(), x.end());
  // Consecutive gaps of a one-per-cell pattern are below 2.
  for (std::size_t i = 1; i < x.size(); ++i) EXPECT_LT(x[i] - x[i - 1], 2.0);
}

TEST(Url, RejectsNonIntegerBox) {
  EXPECT_THROW(sim_url(config_for(Model::url, 35.5), 1), DomainError);
}

TEST(Rsa, RadiusFromVolumeFraction) {
  const double R = rsa_radius(1225, 0.547, 2, 35.0);
  EXPECT_NEAR(R, 35.0 * std::sqrt(0.547 / (std::numbers::pi * 1225)), 1e-14);
  EXPECT_DOUBLE_EQ(rsa_default_volume_fraction(1), 0.747);
  EXPECT_DOUBLE_EQ(rsa_default_volume_fraction(2), 0.547);
  EXPECT_DOUBLE_EQ(rsa_default_volume_fraction(3), 0.384);
}

TEST(Rsa, HardCoreAndCount) {
  for (int d = 1; d <= 3; ++d) {
    const double L = d == 1 ? 200.0 : (d == 2 ? 20.0 : 8.0);
    ModelConfig c = config_for(Model::rsa, L, d);
    const PointPattern p = sim_rsa(c, 4);
    const auto count = static_cast<std::size_t>(std::llround(std::pow(L, d)));
    ASSERT_EQ(p.size(), count) << "d=" << d;
    const double D = 2.0 * rsa_radius(count, rsa_default_volume_fraction(d), d, L);
    double min2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j)
        min2 = std::min(min2, torus_distance2(p.point(i), p.point(j), L));
    EXPECT_GE(std::sqrt(min2), D) << "d=" << d;
  }
}

TEST(Rsa, SinglePoint) {
  ModelConfig c = config_for(Model::rsa, 10.0);
  c.rsa_count = 1;
  EXPECT_EQ(sim_rsa(c, 1).size(), 1u);
}

TEST(Rsa, RejectsFractionAboveJamming) {
  ModelConfig c = config_for(Model::rsa, 10.0);
  c.volume_fraction = 0.6;
  EXPECT_THROW(sim_rsa(c, 1), DomainError);
}

// A matching is stable when no site/candidate pair prefer each other to
// their assigned partners; an unmatched candidate prefers any site.
void expect_stable(const PointPattern& sites, const PointPattern& cands,
                   const std::vector<std::size_t>& partner) {
  const double L = sites.box_length();
  std::vector<double> cand_d2(cands.size(), std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < sites.size(); ++s)
    cand_d2[partner[s]] = torus_distance2(sites.point(s), cands.point(partner[s]), L);
  for (std::size_t s = 0; s < sites.size(); ++s) {
    const double own = torus_distance2(sites.point(s), cands.point(partner[s]), L);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double d2 = torus_distance2(sites.point(s), cands.point(c), L);
      ASSERT_FALSE(d2 < own && d2 < cand_d2[c]) << "blocking pair " << s << "," << c;
    }
  }
}

TEST(Matching, StableAgainstBruteForce) {
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = make_stream(1234, trial);
    const double L = 6.0;
    PointPattern sites(2, L), cands(2, L);
    for (int i = 0; i < 30; ++i) {
      const double p[2] = {uniform01(rng) * L, uniform01(rng) * L};
      sites.add_wrapped(p);
    }
    for (int i = 0; i < 70; ++i) {
      const double p[2] = {uniform01(rng) * L, uniform01(rng) * L};
      cands.add_wrapped(p);
    }
    const auto partner = detail::stable_match(sites, cands);
    ASSERT_EQ(partner.size(), sites.size());
    std::vector<std::size_t> sorted = partner;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::unique(sorted.begin(), sorted.end()), sorted.end());
    expect_stable(sites, cands, partner);
  }
}

TEST(Matching, CountEqualsLatticeSize) {
  for (int d = 1; d <= 3; ++d) {
    const double L = d == 3 ? 6.0 : 20.0;
    const PointPattern p = sim_matching(config_for(Model::matching, L, d), 17);
    EXPECT_EQ(p.size(), static_cast<std::size_t>(std::llround(std::pow(L, d))));
  }
}

TEST(Matching, RequiresAlphaAboveOne) {
  ModelConfig c = config_for(Model::matching, 10.0);
  c.matching_intensity = 1.0;
  EXPECT_THROW(sim_matching(c, 1), DomainError);
}

TEST(Thin, IdentityAndMeanFraction) {
  const PointPattern p = sim_poisson(config_for(Model::poisson, 100.0), 1);
  EXPECT_EQ(thin(p, 1.0, 3), p);
  const PointPattern q = thin(p, 0.3, 3);
  const double frac = static_cast<double>(q.size()) / static_cast<double>(p.size());
  EXPECT_NEAR(frac, 0.3, 4.0 * std::sqrt(0.21 / p.size()));
  EXPECT_EQ(thin(p, 0.3, 3), q);
  EXPECT_THROW(thin(p, 0.0, 3), DomainError);
  EXPECT_THROW(thin(p, 1.5, 3), DomainError);
}

TEST(Thin, AppliedThroughRetention) {
  ModelConfig c = config_for(Model::matching, 30.0);
  c.retention = 0.9;
  const PointPattern p = simulate(c, 2);
  EXPECT_LT(p.size(), 900u);
  EXPECT_GT(p.size(), 700u);
}

}  // namespace
}  // namespace hyperu
