#include "hyperu/calibrate.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>

#include "hyperu/errors.hpp"
#include "hyperu/random.hpp"
#include "hyperu/stats.hpp"

namespace hyperu {

namespace {

// Exponential(1) draw from a uniform on the open interval (0, 1), so the
// result is strictly positive.
double unit_exponential(Xoshiro256& rng) {
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

}  // namespace

NullModel NullModel::reference() {
  NullModel m;
  m.p0 = 0.559;
  m.dof = 0.944;
  m.dim = 2;
  m.box_length = 300.0;
  m.cutoff = 0.75;
  return m;
}

bool NullModel::same_calibration(const NullModel& o) const noexcept {
  return dim == o.dim && box_length == o.box_length && cutoff == o.cutoff && n == o.n &&
         reps == o.reps && seed == o.seed;
}

std::string NullModel::id() const {
  std::ostringstream s;
  s << "d" << dim << "-L" << box_length << "-b" << cutoff << "-n" << n << "-reps" << reps << "-seed"
    << seed;
  return s.str();
}

std::vector<double> simulate_null_T(std::span<const double> kappas, std::size_t reps,
                                    std::uint64_t seed, const NullSimulationOptions& options,
                                    std::size_t* failures) {
  if (kappas.size() < 2) throw DomainError("null simulation needs at least two wave vectors");
  if (!(options.t > 0.0)) throw DomainError("null simulation needs t > 0");
  const std::size_t n = kappas.size();
  std::vector<double> Ts(reps, 0.0);
  std::vector<char> failed(reps, 0);
  parallel_for(reps, options.threads, [&](std::size_t r) {
    auto rng = make_stream(seed, r);
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = options.t * kappas[j] * unit_exponential(rng);
    try {
      Ts[r] = lr_statistic(SampleView(kappas, x)).T;
    } catch (const NumericalError&) {
      failed[r] = 1;
    }
  });

  std::vector<double> out;
  out.reserve(reps);
  std::size_t lost = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (failed[r]) {
      ++lost;
    } else {
      out.push_back(Ts[r]);
    }
  }
  if (failures) *failures = lost;
  if (static_cast<double>(lost) > 1e-3 * static_cast<double>(reps)) {
    std::ostringstream msg;
    msg << lost << " of " << reps << " null fits failed (more than 0.1%)";
    throw NumericalError(msg.str());
  }
  return out;
}

NullModel fit_null_mixture(std::span<const double> Ts) {
  if (Ts.size() < 1000) throw DomainError("null mixture fit needs at least 1000 values");
  std::vector<double> positive;
  positive.reserve(Ts.size());
  std::size_t atoms = 0;
  for (double T : Ts) {
    if (!(T >= 0.0)) throw DomainError("LR statistics must be non-negative");
    if (T <= kAtomThreshold) {
      ++atoms;
    } else {
      positive.push_back(T);
    }
  }
  if (atoms == 0) throw DomainError("degenerate null sample: no atom at T = 0");
  if (positive.size() < 100) throw DomainError("degenerate null sample: fewer than 100 positive values");

  NullModel m;
  m.p0 = static_cast<double>(atoms) / static_cast<double>(Ts.size());
  const double mu = mean(positive);
  const double var = variance(positive);
  // Gamma(shape k/2, rate 1/2) has mean k.
  m.dof = mu;
  m.gamma_shape = mu * mu / var;
  m.gamma_rate = mu / var;
  m.reps = Ts.size();
  return m;
}

double p_value(double T, const NullModel& null) {
  if (!(T >= 0.0)) throw DomainError("p-value needs T >= 0");
  if (T == 0.0) return 1.0;
  return (1.0 - null.p0) * regularized_gamma_upper(0.5 * null.dof, 0.5 * T);
}

double critical_value(const NullModel& null, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("significance level must lie in (0, 1)");
  if (!(level < 1.0 - null.p0))
    throw DomainError("significance level is unreachable: atom mass exceeds 1 - level");
  double lo = 0.0, hi = 1.0;
  while (p_value(hi, null) >= level) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("critical value bracket overflow");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p_value(mid, null) >= level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TestReport run_test(SampleView sample, const NullModel& null, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("significance level must lie in (0, 1)");
  TestReport r;
  r.fit = lr_statistic(sample);
  r.p_value = p_value(r.fit.T, null);
  r.level = level;
  r.reject = r.p_value < level;
  r.null_id = null.id();
  return r;
}

NullModel calibrate_null(const CalibrationConfig& config) {
  const WaveGrid grid = build_wave_grid(config.dim, config.box_length, config.cutoff);
  const auto kappas = grid.kappas();
  std::size_t failures = 0;
  const auto Ts = simulate_null_T(kappas, config.reps, config.seed,
                                  NullSimulationOptions{1.0, config.threads}, &failures);
  NullModel m = fit_null_mixture(Ts);
  m.dim = config.dim;
  m.box_length = config.box_length;
  m.cutoff = config.cutoff;
  m.n = kappas.size();
  m.reps = config.reps;
  m.seed = config.seed;
  m.failures = failures;
  return m;
}

NullModel calibrate_cached(const CalibrationConfig& config, const std::filesystem::path& cache,
                           bool* reused) {
  if (std::filesystem::exists(cache)) {
    try {
      NullModel cached = load_null_model(cache);
      NullModel wanted;
      wanted.dim = config.dim;
      wanted.box_length = config.box_length;
      wanted.cutoff = config.cutoff;
      wanted.n = build_wave_grid(config.dim, config.box_length, config.cutoff).size();
      wanted.reps = config.reps;
      wanted.seed = config.seed;
      if (cached.same_calibration(wanted)) {
        if (reused) *reused = true;
        return cached;
      }
    } catch (const FormatError&) {
      // Unreadable cache: recalibrate and overwrite.
    }
  }
  NullModel m = calibrate_null(config);
  save_null_model(m, cache);
  if (reused) *reused = false;
  return m;
}

TestReport power_replicate(const ModelConfig& model, const WaveGrid& grid, const NullModel& null,
                           double level, std::uint64_t seed, SimulationStats* stats) {
  const PointPattern pattern = simulate(model, seed, stats);
  const SpectralSample sample = spectral_sample(pattern, grid);
  return run_test(sample, null, level);
}

PowerTable run_power(const PowerConfig& config, const NullModel& null) {
  if (config.s_values.empty() || config.lengths.empty())
    throw DomainError("power table needs at least one s value and one length");
  if (config.reps == 0) throw DomainError("power table needs reps > 0");
  for (double s : config.s_values)
    if (!(s >= 0.0 && s < 1.0)) throw DomainError("s values must lie in [0, 1)");

  PowerTable table{config.s_values, config.lengths, {}};
  table.cells.resize(config.s_values.size() * config.lengths.size());
  for (std::size_t li = 0; li < config.lengths.size(); ++li) {
    const double L = config.lengths[li];
    const WaveGrid grid = build_wave_grid(config.model.dim, L, config.cutoff);
    // Replicate seeds depend on (seed, L, replicate) only: every s value
    // thins the same base pattern with the same uniforms, so cells are
    // nested realizations and a single cell reproduces its table entry.
    const std::uint64_t length_seed = derive_seed(config.seed, std::bit_cast<std::uint64_t>(L));
    for (std::size_t si = 0; si < config.s_values.size(); ++si) {
      ModelConfig model = config.model;
      model.box_length = L;
      model.retention = 1.0 - config.s_values[si];
      model.validate();

      std::vector<char> rejected(config.reps, 0), failed(config.reps, 0);
      std::vector<std::size_t> restarts(config.reps, 0);
      parallel_for(config.reps, config.threads, [&](std::size_t r) {
        SimulationStats stats;
        try {
          const auto report =
              power_replicate(model, grid, null, config.level, derive_seed(length_seed, r), &stats);
          rejected[r] = report.reject ? 1 : 0;
        } catch (const SimulationError&) {
          failed[r] = 1;
        } catch (const NumericalError&) {
          failed[r] = 1;
        } catch (const EmptyPatternError&) {
          failed[r] = 1;
        }
        restarts[r] = stats.restarts;
      });

      PowerCell& cell = table.cells[si * config.lengths.size() + li];
      cell.s = config.s_values[si];
      cell.length = L;
      cell.reps = config.reps;
      for (std::size_t r = 0; r < config.reps; ++r) {
        cell.rejections += static_cast<std::size_t>(rejected[r]);
        cell.failures += static_cast<std::size_t>(failed[r]);
        cell.restarts += restarts[r];
      }
    }
  }
  return table;
}

}  // namespace hyperu
