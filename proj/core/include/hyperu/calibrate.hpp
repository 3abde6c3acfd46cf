#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperu/inference.hpp"
#include "hyperu/simulate.hpp"

namespace hyperu {

/// Null law of T: an atom of mass p0 at zero plus (1 - p0) times a
/// Gamma(shape dof/2, rate 1/2) ("fractional chi-square") continuous part.
struct NullModel {
  double p0 = 0.0;
  double dof = 1.0;

  // Provenance of the calibration; zero when unknown.
  int dim = 0;
  double box_length = 0.0;
  double cutoff = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  // Two-parameter moment-matched gamma of the positive part (diagnostic).
  double gamma_shape = 0.0;
  double gamma_rate = 0.0;
  std::size_t failures = 0;

  /// Atom 0.559 and dof 0.944, reported for d = 2, L = 300, b = 0.75.
  static NullModel reference();

  bool same_calibration(const NullModel& other) const noexcept;
  std::string id() const;
};

struct TestReport {
  FitResult fit;
  double p_value = 1.0;
  double level = 0.05;
  bool reject = false;
  std::string null_id;
};

struct NullSimulationOptions {
  /// Mean of X_j is t * kappa_j.
  double t = 1.0;
  unsigned threads = 1;
};

/// T for `reps` independent draws X_j ~ Exponential(mean t * kappa_j).
/// Failed fits are dropped and counted in *failures; more than 0.1% of
/// failures raise NumericalError.
std::vector<double> simulate_null_T(std::span<const double> kappas, std::size_t reps,
                                    std::uint64_t seed, const NullSimulationOptions& options = {},
                                    std::size_t* failures = nullptr);

/// p0 = fraction of T <= kAtomThreshold, dof = mean of the positive part.
/// Requires >= 1000 values with >= 100 positive and at least one atom.
NullModel fit_null_mixture(std::span<const double> Ts);

/// Probability under the null of a statistic at least as extreme as T.
double p_value(double T, const NullModel& null);

/// T with p_value(T) = level. Throws DomainError unless 0 < level < 1 - p0.
double critical_value(const NullModel& null, double level);

TestReport run_test(SampleView sample, const NullModel& null, double level);

struct CalibrationConfig {
  int dim = 2;
  double box_length = 300.0;
  double cutoff = 0.75;
  std::size_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Builds the wave grid, simulates the null and fits the mixture.
NullModel calibrate_null(const CalibrationConfig& config);

/// Reuses `cache` when it holds a calibration with identical provenance;
/// otherwise calibrates and writes it atomically.
NullModel calibrate_cached(const CalibrationConfig& config, const std::filesystem::path& cache,
                           bool* reused = nullptr);

void save_null_model(const NullModel& model, const std::filesystem::path& path);
NullModel load_null_model(const std::filesystem::path& path);
std::string to_json(const NullModel& model);
NullModel null_model_from_json(const std::string& text);

struct PowerConfig {
  ModelConfig model;  ///< box_length and retention are overridden per cell
  std::vector<double> s_values;
  std::vector<double> lengths;
  std::size_t reps = 500;
  double level = 0.05;
  double cutoff = 0.75;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct PowerCell {
  double s = 0.0;
  double length = 0.0;
  std::size_t reps = 0;
  std::size_t rejections = 0;
  std::size_t failures = 0;
  std::size_t restarts = 0;

  double rate() const noexcept {
    const std::size_t valid = reps - failures;
    return valid == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(valid);
  }
};

/// Rejection rates of the test on single thinned samples (retention 1 - s),
/// one cell per (s, L); cells[i * lengths.size() + j] holds (s_i, L_j).
struct PowerTable {
  std::vector<double> s_values;
  std::vector<double> lengths;
  std::vector<PowerCell> cells;

  const PowerCell& at(std::size_t si, std::size_t li) const { return cells[si * lengths.size() + li]; }
};

PowerTable run_power(const PowerConfig& config, const NullModel& null);

/// One replicate of the power pipeline: simulate, thin, scatter, test.
TestReport power_replicate(const ModelConfig& model, const WaveGrid& grid, const NullModel& null,
                           double level, std::uint64_t seed, SimulationStats* stats = nullptr);

}  // namespace hyperu
