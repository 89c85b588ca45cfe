#include "smoothq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smoothq/errors.hpp"

namespace smoothq {

double shannon_entropy(std::span<const double> x) {
  double h = 0.0;
  for (double p : x) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double kl_divergence(std::span<const double> p, std::span<const double> x) {
  if (p.size() != x.size()) throw ConfigError("kl_divergence: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (x[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / x[i]);
  }
  return std::max(d, 0.0);
}

double modified_potential(const NormalFormGame& game, const WeightedPotential& potential,
                          std::span<const double> deltas, const Profile& profile) {
  if (deltas.size() != game.num_players()) throw ConfigError("modified_potential: one delta per player");
  if (potential.weights.size() != game.num_players()) {
    throw ConfigError("modified_potential: one weight per player");
  }
  double value = multilinear_potential(game, potential, profile);
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (deltas[k] < 0.0) throw ConfigError("modified_potential: deltas must be non-negative");
    if (deltas[k] > 0.0) value += deltas[k] / potential.weights[k] * shannon_entropy(profile[k]);
  }
  return value;
}

double modified_potential_rate(const NormalFormGame& game, const WeightedPotential& potential,
                               std::span<const AgentParams> params, const Profile& profile) {
  if (params.size() != game.num_players()) throw ConfigError("one AgentParams per player is required");
  double rate = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto rh = modified_reward(game, profile, params[k], k);
    const double mean = dot(profile[k], rh);
    double var = 0.0;
    for (std::size_t i = 0; i < rh.size(); ++i) var += profile[k][i] * (rh[i] - mean) * (rh[i] - mean);
    rate += var / (params[k].beta() * potential.weights[k]);
  }
  return rate;
}

LyapunovAudit lyapunov_audit(const Trajectory& trajectory, double tolerance) {
  LyapunovAudit audit;
  if (trajectory.phi_h.size() != trajectory.size() || trajectory.empty()) {
    throw ConfigError("lyapunov_audit: trajectory has no potential values");
  }
  if (!trajectory.constant_schedule) {
    audit.skipped = true;
    audit.diagnostic = "exploration rates vary in time; monotonicity is not implied";
    return audit;
  }
  for (std::size_t s = 0; s + 1 < trajectory.size(); ++s) {
    const double drop = trajectory.phi_h[s] - trajectory.phi_h[s + 1];
    if (drop > audit.max_decrease) {
      audit.max_decrease = drop;
      audit.worst_step = s;
    }
  }
  audit.passed = audit.max_decrease <= tolerance;
  if (!audit.passed) {
    std::ostringstream msg;
    msg << "Phi^H dropped by " << audit.max_decrease << " after t = "
        << trajectory.times[audit.worst_step];
    audit.diagnostic = msg.str();
  }
  return audit;
}

RegretReport regret(const Trajectory& trajectory, const NormalFormGame& game, std::size_t k) {
  if (trajectory.empty()) throw ConfigError("regret: empty trajectory");
  if (k >= game.num_players()) throw ConfigError("regret: player index out of range");
  const ScheduleValue params = trajectory.schedule_values.front().at(k);
  for (const auto& row : trajectory.schedule_values) {
    if (row.at(k).alpha != params.alpha || row.at(k).beta != params.beta) {
      throw ConfigError("regret: agent parameters must be constant along the trajectory");
    }
  }
  const double alpha = params.alpha, beta = params.beta, delta = params.delta;
  const std::size_t n = game.num_actions(k);

  RegretReport report;
  report.agent = k;
  report.alpha = alpha;
  report.beta = beta;
  report.times = trajectory.times;

  std::vector<double> log_x0(n);
  for (std::size_t i = 0; i < n; ++i) log_x0[i] = floored_log(trajectory.profiles.front()[k][i]);

  std::vector<double> cum_reward(n, 0.0), prev_reward;
  double cum_u = 0.0, cum_uh = 0.0, prev_u = 0.0, prev_uh = 0.0;
  for (std::size_t s = 0; s < trajectory.size(); ++s) {
    const auto& x = trajectory.profiles[s];
    const auto r = reward_vector(game, x, k);
    const double u = dot(x[k], r);
    const double uh = beta * u + alpha * shannon_entropy(x[k]);
    if (s > 0) {
      const double dt = trajectory.times[s] - trajectory.times[s - 1];
      for (std::size_t i = 0; i < n; ++i) cum_reward[i] += 0.5 * dt * (r[i] + prev_reward[i]);
      cum_u += 0.5 * dt * (u + prev_u);
      cum_uh += 0.5 * dt * (uh + prev_uh);
    }
    prev_reward = r;
    prev_u = u;
    prev_uh = uh;

    const double t = trajectory.times[s] - trajectory.times.front();
    const double best_pure = *std::max_element(cum_reward.begin(), cum_reward.end());
    report.regret.push_back(best_pure - cum_u);

    MixedStrategy p;
    double best_modified;
    if (alpha > 0.0 && t > 0.0) {
      // max_p beta<p,S> + alpha T H(p) = alpha T logsumexp(S / (delta T)).
      std::vector<double> z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = cum_reward[i] / (delta * t);
      p = softmax(z);
      best_modified = alpha * t * log_sum_exp(z);
    } else if (alpha > 0.0) {
      p.assign(n, 1.0 / static_cast<double>(n));
      best_modified = 0.0;
    } else {
      const auto top = std::max_element(cum_reward.begin(), cum_reward.end());
      p.assign(n, 0.0);
      p[static_cast<std::size_t>(top - cum_reward.begin())] = 1.0;
      best_modified = beta * best_pure;
    }
    report.modified_regret.push_back(best_modified - cum_uh);
    report.bound.push_back(-dot(p, log_x0));
    report.hindsight_strategy = std::move(p);
  }
  return report;
}

std::vector<RegretReport> regret_all(const Trajectory& trajectory, const NormalFormGame& game) {
  std::vector<RegretReport> out;
  for (std::size_t k = 0; k < game.num_players(); ++k) out.push_back(regret(trajectory, game, k));
  return out;
}

}  // namespace smoothq
