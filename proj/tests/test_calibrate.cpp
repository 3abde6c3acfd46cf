#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <unistd.h>

#include "hyperu/calibrate.hpp"
#include "hyperu/errors.hpp"
#include "hyperu/random.hpp"

namespace hyperu {
namespace {

namespace fs = std::filesystem;

std::vector<double> synthetic_mixture(std::size_t n, double p0, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  std::chi_squared_distribution<double> chi(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> Ts(n);
  for (auto& T : Ts) T = u(rng) < p0 ? 0.0 : chi(rng);
  return Ts;
}

NullModel null_of(double p0, double dof) {
  NullModel m;
  m.p0 = p0;
  m.dof = dof;
  return m;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("hyperu_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(FitMixture, RecoversSyntheticParameters) {
  const auto Ts = synthetic_mixture(200000, 0.5, 3);
  const NullModel m = fit_null_mixture(Ts);
  EXPECT_NEAR(m.p0, 0.5, 4.0 * std::sqrt(0.25 / 200000));
  EXPECT_NEAR(m.dof, 1.0, 4.0 * std::sqrt(2.0 / 100000));
  EXPECT_NEAR(m.gamma_rate, 0.5, 0.02);
  EXPECT_NEAR(m.gamma_shape, 0.5, 0.02);
}

TEST(FitMixture, DegenerateInputs) {
  EXPECT_THROW(fit_null_mixture(std::vector<double>(500, 1.0)), DomainError);
  EXPECT_THROW(fit_null_mixture(std::vector<double>(2000, 0.0)), DomainError);
  EXPECT_THROW(fit_null_mixture(std::vector<double>(2000, 1.0)), DomainError);
}

TEST(PValue, BoundaryValues) {
  const NullModel m = NullModel::reference();
  EXPECT_EQ(p_value(0.0, m), 1.0);
  EXPECT_NEAR(p_value(1e-12, m), 1.0 - m.p0, 1e-4);
  EXPECT_LT(p_value(500.0, m), 1e-100);
  EXPECT_THROW(p_value(-1.0, m), DomainError);
}

TEST(PValue, MonotoneInT) {
  const NullModel m = NullModel::reference();
  double prev = 1.0;
  for (double T = 0.0; T < 40.0; T += 0.01) {
    const double p = p_value(T, m);
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(CriticalValue, ReferenceNull) {
  const NullModel m = null_of(0.559, 0.944);
  EXPECT_NEAR(critical_value(m, 0.05), 2.39, 0.01);
}

TEST(CriticalValue, InvertsPValueAndIsMonotone) {
  const NullModel m = NullModel::reference();
  double prev = INFINITY;
  for (double level : {0.001, 0.01, 0.05, 0.1, 0.2, 0.4}) {
    const double c = critical_value(m, level);
    EXPECT_NEAR(p_value(c, m), level, 1e-9);
    EXPECT_LT(c, prev);
    prev = c;
  }
  EXPECT_LT(critical_value(m, 1.0 - m.p0 - 1e-9), 1e-6);
  EXPECT_THROW(critical_value(m, 0.5), DomainError);
  EXPECT_THROW(critical_value(m, 0.0), DomainError);
}

TEST(RunTest, AtomSampleNeverRejects) {
  const std::vector<double> k{0.5, 1.0, 2.0}, x{1.0, 2.0, 4.0};
  const TestReport r = run_test({k, x}, NullModel::reference(), 0.05);
  EXPECT_EQ(r.fit.T, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.reject);
}

TEST(SimulateNull, DeterministicAndThreadIndependent) {
  const auto kappas = build_wave_grid(2, 35.0, 0.75).kappas();
  const auto a = simulate_null_T(kappas, 2000, 9, {1.0, 1});
  const auto b = simulate_null_T(kappas, 2000, 9, {1.0, 3});
  EXPECT_EQ(a, b);
  for (double T : a) EXPECT_GE(T, 0.0);
}

TEST(SimulateNull, ScaleFreeInT) {
  const auto kappas = build_wave_grid(2, 35.0, 0.75).kappas();
  const std::size_t reps = 20000;
  const NullModel base = fit_null_mixture(simulate_null_T(kappas, reps, 1, {1.0, 1}));
  // Same stream: the law of T is t-free draw by draw.
  const NullModel same = fit_null_mixture(simulate_null_T(kappas, reps, 1, {0.05, 1}));
  EXPECT_NEAR(same.p0, base.p0, 1.0 / reps + 1e-12);
  EXPECT_NEAR(same.dof, base.dof, 1e-6);
  const double se_p0 = std::sqrt(base.p0 * (1 - base.p0) / reps);
  for (double t : {0.05, 20.0}) {
    const NullModel other = fit_null_mixture(simulate_null_T(kappas, reps, 77, {t, 1}));
    EXPECT_NEAR(other.p0, base.p0, 3.0 * std::sqrt(2.0) * se_p0) << t;
  }
}

TEST(SimulateNull, CalibratedLevelHoldsOnFreshDraws) {
  const auto kappas = build_wave_grid(2, 35.0, 0.75).kappas();
  const std::size_t reps = 40000;
  const NullModel m = fit_null_mixture(simulate_null_T(kappas, reps, 5));
  const auto fresh = simulate_null_T(kappas, reps, 6);
  for (double level : {0.01, 0.05, 0.1}) {
    const double c = critical_value(m, level);
    std::size_t rejected = 0;
    for (double T : fresh) rejected += T > c;
    const double rate = static_cast<double>(rejected) / reps;
    // Binomial error of the fresh draws plus that of the calibration.
    EXPECT_NEAR(rate, level, 4.0 * std::sqrt(2.0 * level * (1 - level) / reps)) << level;
  }
}

TEST(NullModelIo, JsonRoundTrip) {
  NullModel m = NullModel::reference();
  m.n = 2012;
  m.reps = 1000;
  m.seed = 0xfedcba9876543210ULL;
  m.gamma_shape = 0.4712345678901234;
  m.gamma_rate = 0.499;
  m.failures = 2;
  const NullModel back = null_model_from_json(to_json(m));
  EXPECT_EQ(back.p0, m.p0);
  EXPECT_EQ(back.dof, m.dof);
  EXPECT_EQ(back.seed, m.seed);
  EXPECT_EQ(back.gamma_shape, m.gamma_shape);
  EXPECT_EQ(back.failures, m.failures);
  EXPECT_TRUE(back.same_calibration(m));
  EXPECT_THROW(null_model_from_json("{not json"), FormatError);
  EXPECT_THROW(null_model_from_json("{\"p0\": 0.5}"), FormatError);
}

TEST(NullModelIo, CacheReuse) {
  const fs::path path = temp_path("null.json");
  fs::remove(path);
  CalibrationConfig c{2, 35.0, 0.75, 2000, 4, 1};
  bool reused = true;
  const NullModel first = calibrate_cached(c, path, &reused);
  EXPECT_FALSE(reused);
  ASSERT_TRUE(fs::exists(path));
  const NullModel second = calibrate_cached(c, path, &reused);
  EXPECT_TRUE(reused);
  EXPECT_EQ(first.p0, second.p0);
  EXPECT_EQ(first.dof, second.dof);
  c.seed = 5;
  calibrate_cached(c, path, &reused);
  EXPECT_FALSE(reused);
  EXPECT_EQ(load_null_model(path).seed, 5u);
  fs::remove(path);
}

TEST(Power, TableShapeAndDeterminism) {
  PowerConfig c;
  c.model.model = Model::matching;
  c.s_values = {0.0, 0.2};
  c.lengths = {20.0, 24.0};
  c.reps = 30;
  c.seed = 3;
  c.threads = 1;
  const PowerTable a = run_power(c, NullModel::reference());
  c.threads = 2;
  const PowerTable b = run_power(c, NullModel::reference());
  ASSERT_EQ(a.cells.size(), 4u);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].rejections, b.cells[i].rejections);
    EXPECT_EQ(a.cells[i].reps, 30u);
  }
  EXPECT_EQ(a.at(1, 0).s, 0.2);
  EXPECT_EQ(a.at(1, 0).length, 20.0);
  // Heavy thinning of a hyperuniform pattern is detected most of the time.
  EXPECT_GT(a.at(1, 1).rate(), 0.5);
  EXPECT_GT(a.at(1, 1).rate(), a.at(0, 1).rate());
}

}  // namespace
}  // namespace hyperu
