#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "hyperu/core.hpp"

namespace hyperu {

enum class Model { poisson, thomas, rsa, url, matching };

Model parse_model(std::string_view name);
std::string_view model_name(Model model) noexcept;

/// Parameters of the benchmark point processes. All models live on the
/// torus [0, L)^d.
struct ModelConfig {
  Model model = Model::poisson;
  int dim = 2;
  double box_length = 35.0;
  /// Target intensity gamma (points per unit volume).
  double intensity = 1.0;

  // Thomas cluster process.
  double mean_cluster_size = 10.0;
  double cluster_std = 1.0;

  // RSA: defaults to round(intensity * L^d) points at the near-saturation
  // volume fraction of the dimension.
  std::optional<std::size_t> rsa_count;
  std::optional<double> volume_fraction;
  std::size_t rsa_max_restarts = 1000;

  // Lattice-Poisson matching: Poisson intensity alpha > 1 against Z^d.
  double matching_intensity = 3.0;

  /// Independent thinning applied after simulation; 1 keeps every point.
  double retention = 1.0;

  /// Throws DomainError when a parameter is out of range for the model.
  void validate() const;
};

/// Counters reported by simulators that may retry internally.
struct SimulationStats {
  std::size_t restarts = 0;
  std::size_t attempts = 0;
};

double unit_ball_volume(int dim);
/// Near-saturation RSA volume fractions: 0.747 (d=1), 0.547 (d=2), 0.384 (d=3).
double rsa_default_volume_fraction(int dim);
/// Jamming (saturation) limit of RSA in dimension 1..3.
double rsa_jamming_limit(int dim);
/// Sphere radius R solving count * kappa_d * R^d = phi * L^d.
double rsa_radius(std::size_t count, double volume_fraction, int dim, double box_length);

PointPattern sim_poisson(const ModelConfig& config, std::uint64_t seed);
PointPattern sim_thomas(const ModelConfig& config, std::uint64_t seed);
PointPattern sim_rsa(const ModelConfig& config, std::uint64_t seed, SimulationStats* stats = nullptr);
PointPattern sim_url(const ModelConfig& config, std::uint64_t seed);
PointPattern sim_matching(const ModelConfig& config, std::uint64_t seed,
                          SimulationStats* stats = nullptr);

/// Keeps each point independently with probability p.
PointPattern thin(const PointPattern& pattern, double p, std::uint64_t seed);

/// Dispatches on config.model and applies thinning when retention < 1.
PointPattern simulate(const ModelConfig& config, std::uint64_t seed,
                      SimulationStats* stats = nullptr);

namespace detail {

/// Copy of `config` with the model replaced, validated for that model.
ModelConfig validated_as(const ModelConfig& config, Model model);

/// Distance-greedy stable matching of `sites` (every site gets a partner)
/// against `candidates` on the torus. Returns, for each site, the index of
/// its partner in `candidates`. Requires candidates.size() >= sites.size().
std::vector<std::size_t> stable_match(const PointPattern& sites, const PointPattern& candidates);

}  // namespace detail

}  // namespace hyperu
