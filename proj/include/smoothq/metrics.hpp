#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smoothq/dynamics.hpp"
#include "smoothq/game.hpp"

namespace smoothq {

/// H(x) = -sum x_i ln x_i with 0 ln 0 = 0.
double shannon_entropy(std::span<const double> x);

/// D(p || x) = sum p_i ln(p_i / x_i). Returns +infinity when some x_i = 0 < p_i.
double kl_divergence(std::span<const double> p, std::span<const double> x);

/// Phi^H(x) = Phi(x) + sum_k (delta_k / w_k) H(x_k). With unit weights this is
/// the usual entropy-regularized potential.
double modified_potential(const NormalFormGame& game, const WeightedPotential& potential,
                          std::span<const double> deltas, const Profile& profile);

/// d Phi^H / dt along the SQL field: sum_k Var_{x_k}(r^H_k) / (beta_k w_k).
double modified_potential_rate(const NormalFormGame& game, const WeightedPotential& potential,
                               std::span<const AgentParams> params, const Profile& profile);

struct LyapunovAudit {
  bool skipped = false;
  bool passed = false;
  double max_decrease = 0.0;
  std::size_t worst_step = 0;
  std::string diagnostic;
};

/// Largest drop of phi_h between consecutive samples. Skipped (with a
/// diagnostic) for time-varying schedules; throws ConfigError if the
/// trajectory carries no potential values.
LyapunovAudit lyapunov_audit(const Trajectory& trajectory, double tolerance = 1e-8);

/// Regret series for one agent at every stored time.
struct RegretReport {
  std::size_t agent = 0;
  std::vector<double> times;
  std::vector<double> regret;           // R_k(T), best pure action in hindsight
  std::vector<double> modified_regret;  // R^H_k(T), entropy-regularized benchmark
  std::vector<double> bound;            // -<p_k(T), ln x_k(0)>
  MixedStrategy hindsight_strategy;     // p_k at the final time
  double alpha = 0.0;
  double beta = 1.0;
};

/// Requires constant parameters for agent k along the trajectory. Integrals
/// use the trapezoid rule on the stored samples.
RegretReport regret(const Trajectory& trajectory, const NormalFormGame& game, std::size_t k);

std::vector<RegretReport> regret_all(const Trajectory& trajectory, const NormalFormGame& game);

}  // namespace smoothq
