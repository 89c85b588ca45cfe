#include "smoothq/projection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "smoothq/errors.hpp"
#include "smoothq/metrics.hpp"

namespace smoothq {

namespace {

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::pair<std::vector<double>, std::vector<double>> random_directions(std::size_t dim,
                                                                      std::uint64_t seed) {
  if (dim < 2) throw ConfigError("projection needs at least two free coordinates");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> u(dim), v(dim);
    for (double& x : u) x = normal(rng);
    for (double& x : v) x = normal(rng);
    const double nu = norm(u);
    if (nu < 1e-12) continue;
    for (double& x : u) x /= nu;
    const double along = dot(u, v);
    for (std::size_t i = 0; i < dim; ++i) v[i] -= along * u[i];
    const double nv = norm(v);
    if (nv < 1e-12) continue;
    for (double& x : v) x /= nv;
    return {u, v};
  }
  throw NumericalError("could not draw two independent directions", 0.0);
}

std::vector<ProjectionPoint> project_potential(const NormalFormGame& game,
                                               const WeightedPotential& potential,
                                               const ProjectionSpec& spec) {
  if (game.num_players() != 2) throw ConfigError("projection is defined for two-player games");
  if (potential.phi.size() != game.num_profiles()) throw ConfigError("projection: potential has the wrong shape");
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) throw ConfigError("projection: delta must be non-negative");
  const std::size_t n = game.num_actions(0), m = game.num_actions(1);
  const std::size_t dim = (n - 1) + (m - 1);

  std::vector<double> u = spec.u, v = spec.v;
  if (u.empty() && v.empty()) std::tie(u, v) = random_directions(dim, spec.seed);
  if (u.size() != dim || v.size() != dim) throw ConfigError("projection: direction length must be (n-1)+(m-1)");
  const double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw ConfigError("projection: zero direction");
  const double cosine = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
  if (std::acos(std::abs(cosine)) <= 1e-6) throw ConfigError("projection: directions are parallel");

  std::vector<ProjectionPoint> out;
  out.reserve(spec.alphas.size() * spec.betas.size());
  std::vector<double> y1(n - 1), y2(m - 1);
  for (double b : spec.betas) {
    for (double a : spec.alphas) {
      for (std::size_t i = 0; i + 1 < n; ++i) y1[i] = a * u[i] + b * v[i];
      for (std::size_t j = 0; j + 1 < m; ++j) y2[j] = a * u[n - 1 + j] + b * v[n - 1 + j];
      const Profile x = {from_log_ratio(y1), from_log_ratio(y2)};
      const double value = multilinear_potential(game, potential, x) +
                           spec.delta * (shannon_entropy(x[0]) + shannon_entropy(x[1]));
      out.push_back({a, b, value});
    }
  }
  return out;
}

}  // namespace smoothq
