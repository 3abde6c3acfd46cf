#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hyperu/calibrate.hpp"
#include "hyperu/errors.hpp"
#include "hyperu/io.hpp"
#include "hyperu/random.hpp"
#include "hyperu/simulate.hpp"
#include "hyperu/spectral.hpp"
#include "hyperu/stats.hpp"

namespace hyperu::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kUsageError = 1;
constexpr int kNumericalError = 2;

struct SimulateOptions {
  std::string model = "poisson";
  int dim = 2;
  double length = 35.0;
  double intensity = 1.0;
  double alpha = 3.0;
  double thin = 1.0;
  double cluster_size = 10.0;
  double cluster_std = 1.0;
  std::size_t count = 0;
  double phi = 0.0;
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  std::string out = ".";
};

struct ScatterOptions {
  std::string in;
  double cutoff = 0.75;
  std::string out = "-";
};

struct CcdfOptions {
  std::vector<std::string> in;
  int row = -1;
  std::size_t points = 200;
  std::string out = "-";
};

struct TestOptions {
  std::string in;
  std::string null_path;
  double level = 0.05;
};

struct CalibrateOptions {
  int dim = 2;
  double length = 300.0;
  double cutoff = 0.75;
  std::size_t reps = 100000;
  std::uint64_t seed = 1;
  std::string out = "null.json";
  bool force = false;
};

struct PowerOptions {
  std::string model = "matching";
  int dim = 2;
  double alpha = 3.0;
  std::vector<double> s_values{0.0, 0.001, 0.01};
  std::vector<double> lengths{50.0};
  std::string null_path;
  std::size_t reps = 500;
  double level = 0.05;
  double cutoff = 0.75;
  std::uint64_t seed = 1;
  std::string out = "-";
};

std::string command_line(const std::vector<std::string>& args) {
  std::string s;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (i > 1) s += ' ';
    s += args[i];
  }
  return s;
}

std::vector<std::string> provenance(const std::vector<std::string>& args) {
  return {std::string("hyperu ") + HYPERU_VERSION, "command: " + command_line(args)};
}

// Writes to the named file atomically, or to `out` for "-".
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path == "-" || path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

ModelConfig model_config(const SimulateOptions& o) {
  ModelConfig c;
  c.model = parse_model(o.model);
  c.dim = o.dim;
  c.box_length = o.length;
  c.intensity = o.intensity;
  c.matching_intensity = o.alpha;
  c.retention = o.thin;
  c.mean_cluster_size = o.cluster_size;
  c.cluster_std = o.cluster_std;
  if (o.count > 0) c.rsa_count = o.count;
  if (o.phi > 0.0) c.volume_fraction = o.phi;
  c.validate();
  return c;
}

int do_simulate(const SimulateOptions& o, unsigned threads, const std::vector<std::string>& args,
                std::ostream& out, std::ostream& err) {
  const ModelConfig config = model_config(o);
  if (o.reps == 0) throw DomainError("--reps must be positive");
  const bool to_stdout = o.out == "-";
  if (to_stdout && o.reps != 1) throw DomainError("--out - (stdout) needs --reps 1");
  if (!to_stdout) fs::create_directories(o.out);

  std::vector<std::string> texts(o.reps);
  std::vector<SimulationStats> stats(o.reps);
  parallel_for(o.reps, threads, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(o.seed, r);
    const PointPattern p = simulate(config, rep_seed, &stats[r]);
    auto header = provenance(args);
    header.push_back("seed=" + std::to_string(o.seed) + " replicate=" + std::to_string(r));
    std::ostringstream s;
    write_pattern(s, p, header);
    texts[r] = s.str();
  });

  std::size_t restarts = 0;
  for (std::size_t r = 0; r < o.reps; ++r) {
    restarts += stats[r].restarts;
    if (to_stdout) {
      out << texts[r];
    } else {
      char name[64];
      std::snprintf(name, sizeof name, "%s_%05zu.txt", std::string(model_name(config.model)).c_str(), r);
      write_file_atomic(fs::path(o.out) / name, texts[r]);
    }
  }
  if (restarts > 0) err << "simulate: " << restarts << " resampled realizations\n";
  return 0;
}

int do_scatter(const ScatterOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const PointPattern pattern = read_pattern_file(o.in);
  const WaveGrid grid = build_wave_grid(pattern.dim(), pattern.box_length(), o.cutoff);
  SpectralSample sample = spectral_sample(pattern, grid);
  std::ostringstream s;
  auto header = provenance(args);
  header.push_back("points=" + std::to_string(pattern.size()) + " vectors=" + std::to_string(grid.size()));
  write_spectral_csv(s, sample, header);
  emit(o.out, out, s.str());
  return 0;
}

int do_ccdf(const CcdfOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  std::vector<double> values;
  for (const auto& path : o.in) {
    const SpectralSample s = read_spectral_csv_file(path);
    if (o.row >= 0) {
      if (static_cast<std::size_t>(o.row) >= s.size())
        throw DomainError("--row " + std::to_string(o.row) + " out of range for " + path);
      values.push_back(s.x[static_cast<std::size_t>(o.row)]);
    } else {
      values.insert(values.end(), s.x.begin(), s.x.end());
    }
  }
  const auto table = scaled_ccdf(values, o.points);
  std::ostringstream s;
  for (const auto& h : provenance(args)) s << "# " << h << '\n';
  s << "z,ccdf\n";
  for (const auto& row : table) s << format_double(row.z) << ',' << format_double(row.ccdf) << '\n';
  emit(o.out, out, s.str());
  return 0;
}

int do_test(const TestOptions& o, std::ostream& out) {
  const SpectralSample sample = read_spectral_csv_file(o.in);
  const NullModel null = o.null_path.empty() ? NullModel::reference() : load_null_model(o.null_path);
  const TestReport r = run_test(sample, null, o.level);
  out << "# hyperu " << HYPERU_VERSION << '\n';
  out << "# null p0=" << format_double(null.p0) << " dof=" << format_double(null.dof)
      << (o.null_path.empty() ? " (reference)" : " (" + o.null_path + ")") << '\n';
  out << "n=" << sample.size() << '\n';
  out << "t0_hat=" << format_double(r.fit.t0_hat) << '\n';
  out << "s_hat=" << format_double(r.fit.s_hat) << '\n';
  out << "t1_hat=" << format_double(r.fit.t1_hat) << '\n';
  out << "h0=" << format_double(r.fit.h0) << '\n';
  out << "h1=" << format_double(r.fit.h1) << '\n';
  out << "T=" << format_double(r.fit.T) << '\n';
  out << "p_value=" << format_double(r.p_value) << '\n';
  out << "level=" << format_double(r.level) << '\n';
  out << "reject=" << (r.reject ? "true" : "false") << '\n';
  return 0;
}

int do_calibrate(const CalibrateOptions& o, unsigned threads, std::ostream& out) {
  CalibrationConfig c{o.dim, o.length, o.cutoff, o.reps, o.seed, threads};
  if (o.force && fs::exists(o.out)) fs::remove(o.out);
  bool reused = false;
  const NullModel m = calibrate_cached(c, o.out, &reused);
  out << "# hyperu " << HYPERU_VERSION << (reused ? " (cached calibration)" : "") << '\n';
  out << "null=" << m.id() << '\n';
  out << "p0=" << format_double(m.p0) << '\n';
  out << "dof=" << format_double(m.dof) << '\n';
  out << "gamma_shape=" << format_double(m.gamma_shape) << '\n';
  out << "gamma_rate=" << format_double(m.gamma_rate) << '\n';
  out << "critical_value_0.05=" << format_double(critical_value(m, 0.05)) << '\n';
  return 0;
}

int do_power(const PowerOptions& o, unsigned threads, const std::vector<std::string>& args,
             std::ostream& out) {
  PowerConfig c;
  c.model.model = parse_model(o.model);
  c.model.dim = o.dim;
  c.model.matching_intensity = o.alpha;
  c.s_values = o.s_values;
  c.lengths = o.lengths;
  c.reps = o.reps;
  c.level = o.level;
  c.cutoff = o.cutoff;
  c.seed = o.seed;
  c.threads = threads;
  const NullModel null = o.null_path.empty() ? NullModel::reference() : load_null_model(o.null_path);
  const PowerTable table = run_power(c, null);

  std::ostringstream s;
  for (const auto& h : provenance(args)) s << "# " << h << '\n';
  s << "# null p0=" << format_double(null.p0) << " dof=" << format_double(null.dof)
    << " level=" << format_double(o.level) << " reps=" << o.reps << '\n';
  s << "s";
  for (double L : table.lengths) s << ',' << format_double(L);
  s << '\n';
  std::size_t failures = 0;
  for (std::size_t si = 0; si < table.s_values.size(); ++si) {
    s << format_double(table.s_values[si]);
    for (std::size_t li = 0; li < table.lengths.size(); ++li) {
      const auto& cell = table.at(si, li);
      s << ',' << format_double(cell.rate());
      failures += cell.failures;
    }
    s << '\n';
  }
  if (failures > 0) s << "# simulation failures: " << failures << '\n';
  emit(o.out, out, s.str());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Likelihood-ratio test for hyperuniformity of point patterns", "hyperu"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads for replicate loops (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate point patterns on the torus");
  simulate_cmd->add_option("--model", sim.model, "poisson | thomas | rsa | url | matching")->required();
  simulate_cmd->add_option("--dim", sim.dim, "Dimension d")->required();
  simulate_cmd->add_option("--length", sim.length, "Box side L")->required();
  simulate_cmd->add_option("--intensity", sim.intensity, "Target intensity");
  simulate_cmd->add_option("--alpha", sim.alpha, "Poisson intensity for matching (> 1)");
  simulate_cmd->add_option("--thin", sim.thin, "Retention probability p in (0, 1]");
  simulate_cmd->add_option("--cluster-size", sim.cluster_size, "Thomas mean cluster size");
  simulate_cmd->add_option("--cluster-std", sim.cluster_std, "Thomas displacement standard deviation");
  simulate_cmd->add_option("--count", sim.count, "RSA point count (default round(intensity * L^d))");
  simulate_cmd->add_option("--phi", sim.phi, "RSA volume fraction (default per dimension)");
  simulate_cmd->add_option("--seed", sim.seed, "Random seed");
  simulate_cmd->add_option("--reps", sim.reps, "Number of replicates");
  simulate_cmd->add_option("--out", sim.out, "Output directory, or - for stdout");

  ScatterOptions sc;
  auto* scatter_cmd = app.add_subcommand("scatter", "Scattering intensities at reciprocal-lattice vectors");
  scatter_cmd->add_option("--in", sc.in, "Point pattern file")->required();
  scatter_cmd->add_option("--cutoff", sc.cutoff, "Wave-vector cutoff b");
  scatter_cmd->add_option("--out", sc.out, "Output CSV (- for stdout)");

  CcdfOptions cc;
  auto* ccdf_cmd = app.add_subcommand("ccdf", "Complementary CDF of mean-scaled scattering intensities");
  ccdf_cmd->add_option("--in", cc.in, "kappa,x CSV files")->required();
  ccdf_cmd->add_option("--row", cc.row, "Use only this row of each file (one wave vector across replicates)");
  ccdf_cmd->add_option("--points", cc.points, "Number of log-spaced z values");
  ccdf_cmd->add_option("--out", cc.out, "Output CSV (- for stdout)");

  TestOptions te;
  auto* test_cmd = app.add_subcommand("test", "Likelihood-ratio test of s = 0 on a kappa,x sample");
  test_cmd->add_option("--in", te.in, "kappa,x CSV")->required();
  test_cmd->add_option("--null", te.null_path, "Null model file (default: reference p0=0.559, dof=0.944)");
  test_cmd->add_option("--level", te.level, "Significance level");

  CalibrateOptions ca;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Monte-Carlo calibration of the null law of T");
  calibrate_cmd->add_option("--dim", ca.dim, "Dimension d");
  calibrate_cmd->add_option("--length", ca.length, "Box side L");
  calibrate_cmd->add_option("--cutoff", ca.cutoff, "Wave-vector cutoff b");
  calibrate_cmd->add_option("--reps", ca.reps, "Monte-Carlo replicates");
  calibrate_cmd->add_option("--seed", ca.seed, "Random seed");
  calibrate_cmd->add_option("--out", ca.out, "Null model file (reused when provenance matches)");
  calibrate_cmd->add_flag("--force", ca.force, "Recalibrate even if a matching file exists");

  PowerOptions po;
  auto* power_cmd = app.add_subcommand("power", "Rejection rates on thinned samples (rows s, columns L)");
  power_cmd->add_option("--model", po.model, "Base model (default matching)");
  power_cmd->add_option("--dim", po.dim, "Dimension d");
  power_cmd->add_option("--alpha", po.alpha, "Matching Poisson intensity");
  power_cmd->add_option("--thin-list", po.s_values, "Values of s = 1 - p (structure factor at the origin)")
      ->delimiter(',');
  power_cmd->add_option("--length-list", po.lengths, "Box sides L")->delimiter(',');
  power_cmd->add_option("--null", po.null_path, "Null model file (default: reference)");
  power_cmd->add_option("--reps", po.reps, "Replicates per cell");
  power_cmd->add_option("--level", po.level, "Significance level");
  power_cmd->add_option("--cutoff", po.cutoff, "Wave-vector cutoff b");
  power_cmd->add_option("--seed", po.seed, "Random seed");
  power_cmd->add_option("--out", po.out, "Output CSV (- for stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*simulate_cmd) return do_simulate(sim, threads, args, out, err);
    if (*scatter_cmd) return do_scatter(sc, args, out);
    if (*ccdf_cmd) return do_ccdf(cc, args, out);
    if (*test_cmd) return do_test(te, out);
    if (*calibrate_cmd) return do_calibrate(ca, threads, out);
    if (*power_cmd) return do_power(po, threads, args, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const SimulationError& e) {
    err << "simulation failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const EmptyPatternError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  err << app.help();
  return kUsageError;
}

}  // namespace hyperu::cli
