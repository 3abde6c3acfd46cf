#include "hyperu/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hyperu/errors.hpp"
#include "hyperu/random.hpp"

namespace hyperu {

namespace {

constexpr std::uint64_t kThinTag = 0x7468696eULL;

double box_volume(const ModelConfig& c) { return std::pow(c.box_length, c.dim); }

std::uint64_t poisson_count(Xoshiro256& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(rng);
}

bool is_integer_length(double L) { return std::abs(L - std::round(L)) < 1e-9 && L >= 1.0; }

}  // namespace

ModelConfig detail::validated_as(const ModelConfig& config, Model model) {
  ModelConfig c = config;
  c.model = model;
  c.validate();
  return c;
}

Model parse_model(std::string_view name) {
  if (name == "poisson") return Model::poisson;
  if (name == "thomas") return Model::thomas;
  if (name == "rsa") return Model::rsa;
  if (name == "url") return Model::url;
  if (name == "matching") return Model::matching;
  throw DomainError("unknown model '" + std::string(name) +
                    "' (expected poisson, thomas, rsa, url or matching)");
}

std::string_view model_name(Model model) noexcept {
  switch (model) {
    case Model::poisson: return "poisson";
    case Model::thomas: return "thomas";
    case Model::rsa: return "rsa";
    case Model::url: return "url";
    case Model::matching: return "matching";
  }
  return "unknown";
}

void ModelConfig::validate() const {
  if (dim < 1) throw DomainError("dimension must be >= 1");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw DomainError("box length must be positive");
  if (!(intensity >= 0.0) || !std::isfinite(intensity))
    throw DomainError("intensity must be non-negative");
  if (!(retention > 0.0 && retention <= 1.0))
    throw DomainError("thinning retention probability must lie in (0, 1]");
  switch (model) {
    case Model::poisson: break;
    case Model::thomas:
      if (!(mean_cluster_size > 0.0)) throw DomainError("mean cluster size must be positive");
      if (!(cluster_std >= 0.0)) throw DomainError("cluster standard deviation must be >= 0");
      break;
    case Model::rsa: {
      if (dim > 3) throw DomainError("RSA is only supported for d <= 3");
      const double phi = volume_fraction.value_or(rsa_default_volume_fraction(dim));
      if (!(phi > 0.0 && phi < rsa_jamming_limit(dim)))
        throw DomainError("RSA volume fraction must lie in (0, jamming limit)");
      break;
    }
    case Model::url:
      if (!is_integer_length(box_length))
        throw DomainError("URL requires an integer box length");
      break;
    case Model::matching:
      if (!is_integer_length(box_length))
        throw DomainError("matching requires an integer box length");
      if (!(matching_intensity > 1.0))
        throw DomainError("matching requires Poisson intensity alpha > 1");
      break;
  }
}

double unit_ball_volume(int dim) {
  if (dim < 1) throw DomainError("dimension must be >= 1");
  const double d = dim;
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double rsa_default_volume_fraction(int dim) {
  switch (dim) {
    case 1: return 0.747;
    case 2: return 0.547;
    case 3: return 0.384;
    default: throw DomainError("RSA is only supported for d <= 3");
  }
}

double rsa_jamming_limit(int dim) {
  switch (dim) {
    case 1: return 0.7475979202534;  // Renyi's parking constant
    case 2: return 0.547069;
    case 3: return 0.38413;
    default: throw DomainError("RSA is only supported for d <= 3");
  }
}

double rsa_radius(std::size_t count, double volume_fraction, int dim, double box_length) {
  if (count == 0) throw DomainError("RSA point count must be positive");
  const double volume = volume_fraction * std::pow(box_length, dim) /
                        (static_cast<double>(count) * unit_ball_volume(dim));
  return std::pow(volume, 1.0 / dim);
}

PointPattern sim_poisson(const ModelConfig& config, std::uint64_t seed) {
  detail::validated_as(config, Model::poisson);
  auto rng = make_stream(seed, 0);
  const std::uint64_t n = poisson_count(rng, config.intensity * box_volume(config));
  PointPattern out(config.dim, config.box_length);
  out.reserve(n);
  std::vector<double> point(static_cast<std::size_t>(config.dim));
  for (std::uint64_t i = 0; i < n; ++i) {
    for (auto& c : point) c = config.box_length * uniform01(rng);
    out.add_wrapped(point);
  }
  return out;
}

PointPattern sim_thomas(const ModelConfig& config, std::uint64_t seed) {
  detail::validated_as(config, Model::thomas);
  auto rng = make_stream(seed, 0);
  const double parent_intensity = config.intensity / config.mean_cluster_size;
  const std::uint64_t parents = poisson_count(rng, parent_intensity * box_volume(config));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto d = static_cast<std::size_t>(config.dim);
  std::vector<double> parent(d), child(d);
  PointPattern out(config.dim, config.box_length);
  out.reserve(static_cast<std::size_t>(config.intensity * box_volume(config) * 1.2));
  for (std::uint64_t i = 0; i < parents; ++i) {
    for (auto& c : parent) c = config.box_length * uniform01(rng);
    const std::uint64_t children = poisson_count(rng, config.mean_cluster_size);
    for (std::uint64_t j = 0; j < children; ++j) {
      for (std::size_t a = 0; a < d; ++a) child[a] = parent[a] + config.cluster_std * gauss(rng);
      out.add_wrapped(child);
    }
  }
  return out;
}

PointPattern sim_url(const ModelConfig& config, std::uint64_t seed) {
  detail::validated_as(config, Model::url);
  auto rng = make_stream(seed, 0);
  const auto side = static_cast<long long>(std::llround(config.box_length));
  const auto d = static_cast<std::size_t>(config.dim);
  std::vector<double> shift(d);
  for (auto& c : shift) c = uniform01(rng);

  long long cells = 1;
  for (std::size_t a = 0; a < d; ++a) cells *= side;
  PointPattern out(config.dim, config.box_length);
  out.reserve(static_cast<std::size_t>(cells));
  std::vector<double> point(d);
  for (long long cell = 0; cell < cells; ++cell) {
    long long rest = cell;
    for (std::size_t a = d; a-- > 0;) {
      const auto m = static_cast<double>(rest % side);
      rest /= side;
      point[a] = m + uniform01(rng) + shift[a];
    }
    out.add_wrapped(point);
  }
  return out;
}

PointPattern thin(const PointPattern& pattern, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("thinning probability must lie in (0, 1]");
  if (p == 1.0) return pattern;
  auto rng = make_stream(seed, 0);
  PointPattern out(pattern.dim(), pattern.box_length());
  out.reserve(static_cast<std::size_t>(static_cast<double>(pattern.size()) * p) + 16);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (uniform01(rng) < p) out.add_wrapped(pattern.point(i));
  }
  return out;
}

PointPattern simulate(const ModelConfig& config, std::uint64_t seed, SimulationStats* stats) {
  PointPattern pattern = [&] {
    switch (config.model) {
      case Model::poisson: return sim_poisson(config, seed);
      case Model::thomas: return sim_thomas(config, seed);
      case Model::rsa: return sim_rsa(config, seed, stats);
      case Model::url: return sim_url(config, seed);
      case Model::matching: return sim_matching(config, seed, stats);
    }
    throw DomainError("unknown model");
  }();
  if (config.retention < 1.0) return thin(pattern, config.retention, derive_seed(seed, kThinTag));
  return pattern;
}

}  // namespace hyperu
