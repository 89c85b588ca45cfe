#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "smoothq/game.hpp"

namespace smoothq {

/// Two-direction slice through the joint log-ratio space of a two-player game.
/// Directions live in R^{(n-1)+(m-1)}: the first n-1 entries belong to player
/// 1. When u and v are left empty they are drawn from the seed.
struct ProjectionSpec {
  std::uint64_t seed = 0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> alphas;
  std::vector<double> betas;
  double delta = 0.0;
};

struct ProjectionPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double phi_h = 0.0;
};

/// Two i.i.d. standard normal vectors from mt19937_64(seed), Gram-Schmidt
/// orthonormalized.
std::pair<std::vector<double>, std::vector<double>> random_directions(std::size_t dim,
                                                                      std::uint64_t seed);

/// For every (alpha, beta) on the grid, maps alpha u + beta v back to the
/// simplices (exponentiate the log-ratios with the last action at 0 and
/// normalize) and evaluates Phi(x, y) + delta (H(x) + H(y)). Rows iterate
/// alpha fastest.
std::vector<ProjectionPoint> project_potential(const NormalFormGame& game,
                                               const WeightedPotential& potential,
                                               const ProjectionSpec& spec);

}  // namespace smoothq
