#include "smoothq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smoothq/errors.hpp"
#include "smoothq/metrics.hpp"

namespace smoothq {

namespace {

using Chart = std::vector<std::vector<double>>;

void check_schedules(const NormalFormGame& game, std::span<const ExplorationSchedule> schedules) {
  if (schedules.size() != game.num_players()) {
    throw ConfigError("one exploration schedule per player is required");
  }
}

bool all_constant(std::span<const ExplorationSchedule> schedules) {
  return std::all_of(schedules.begin(), schedules.end(),
                     [](const ExplorationSchedule& s) { return s.is_constant(); });
}

std::vector<ScheduleValue> sample(std::span<const ExplorationSchedule> schedules, double t) {
  std::vector<ScheduleValue> out;
  out.reserve(schedules.size());
  for (const auto& s : schedules) out.push_back(eval_schedule(s, t));
  return out;
}

std::vector<AgentParams> to_params(const std::vector<ScheduleValue>& values) {
  std::vector<AgentParams> params;
  params.reserve(values.size());
  for (const auto& v : values) params.emplace_back(v.alpha, v.beta);
  return params;
}

Profile profile_from_chart(const Chart& y) {
  Profile x;
  x.reserve(y.size());
  for (const auto& yk : y) x.push_back(from_log_ratio(yk));
  return x;
}

void record_row(Trajectory& traj, const NormalFormGame& game, double t, const Profile& x,
                std::vector<ScheduleValue> values) {
  std::vector<double> utilities(game.num_players());
  const auto r = reward_vectors(game, x);
  for (std::size_t k = 0; k < utilities.size(); ++k) utilities[k] = dot(x[k], r[k]);
  if (game.potential()) {
    std::vector<double> deltas;
    for (const auto& v : values) deltas.push_back(v.delta);
    traj.phi_h.push_back(modified_potential(game, *game.potential(), deltas, x));
  }
  traj.times.push_back(t);
  traj.profiles.push_back(x);
  traj.schedule_values.push_back(std::move(values));
  traj.utilities.push_back(std::move(utilities));
}

double sup_norm(const Chart& f) {
  double m = 0.0;
  for (const auto& fk : f) {
    for (double v : fk) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      m = std::max(m, std::abs(v));
    }
  }
  return m;
}

Chart axpy(const Chart& y, double a, const Chart& f) {
  Chart out = y;
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t i = 0; i < out[k].size(); ++i) out[k][i] += a * f[k][i];
  }
  return out;
}

class Rk4Stepper {
 public:
  Rk4Stepper(const NormalFormGame& game, const IntegrateOptions& options)
      : game_(game), options_(options) {}

  void advance(Chart& y, double t, double h, std::span<const AgentParams> params, int depth) const {
    const Chart k1 = field(y, params);
    const double norm = sup_norm(k1);
    if (!std::isfinite(norm)) throw NumericalError("SQL field is not finite", t);
    if (h * norm > options_.max_increment) {
      if (depth >= options_.max_halvings) {
        throw NumericalError("SQL field too large; step halving exhausted", t);
      }
      advance(y, t, h / 2, params, depth + 1);
      advance(y, t + h / 2, h / 2, params, depth + 1);
      return;
    }
    const Chart k2 = field(axpy(y, h / 2, k1), params);
    const Chart k3 = field(axpy(y, h / 2, k2), params);
    const Chart k4 = field(axpy(y, h, k3), params);
    for (std::size_t k = 0; k < y.size(); ++k) {
      for (std::size_t i = 0; i < y[k].size(); ++i) {
        y[k][i] += h / 6 * (k1[k][i] + 2 * k2[k][i] + 2 * k3[k][i] + k4[k][i]);
        if (!std::isfinite(y[k][i])) throw NumericalError("integrator state is not finite", t + h);
      }
    }
  }

 private:
  Chart field(const Chart& y, std::span<const AgentParams> params) const {
    return sql_log_ratio_field(game_, params, profile_from_chart(y), y);
  }

  const NormalFormGame& game_;
  const IntegrateOptions& options_;
};

}  // namespace

std::vector<std::vector<double>> sql_vector_field(const NormalFormGame& game,
                                                  std::span<const AgentParams> params,
                                                  const Profile& profile) {
  if (params.size() != game.num_players()) throw ConfigError("one AgentParams per player is required");
  const auto r = reward_vectors(game, profile);
  std::vector<std::vector<double>> field(profile.size());
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const auto& xk = profile[k];
    for (double p : xk) {
      if (!(p > 0.0)) throw DomainError("sql_vector_field: profile on the simplex boundary");
    }
    double mean_r = 0.0, mean_log = 0.0;
    for (std::size_t i = 0; i < xk.size(); ++i) {
      mean_r += xk[i] * r[k][i];
      mean_log += xk[i] * floored_log(xk[i]);
    }
    field[k].resize(xk.size());
    for (std::size_t i = 0; i < xk.size(); ++i) {
      field[k][i] = xk[i] * (params[k].beta() * (r[k][i] - mean_r) -
                             params[k].alpha() * (floored_log(xk[i]) - mean_log));
    }
  }
  return field;
}

std::vector<std::vector<double>> sql_log_ratio_field(const NormalFormGame& game,
                                                     std::span<const AgentParams> params,
                                                     const Profile& profile,
                                                     const std::vector<std::vector<double>>& y) {
  const auto r = reward_vectors(game, profile);
  std::vector<std::vector<double>> f(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double last = r[k].back();
    f[k].resize(y[k].size());
    for (std::size_t i = 0; i < y[k].size(); ++i) {
      f[k][i] = params[k].beta() * (r[k][i] - last) - params[k].alpha() * y[k][i];
    }
  }
  return f;
}

Trajectory integrate_sql(const NormalFormGame& game,
                         std::span<const ExplorationSchedule> schedules, const Profile& x0,
                         double t_end, const IntegrateOptions& options) {
  check_schedules(game, schedules);
  if (!(options.step > 0.0) || !std::isfinite(options.step)) throw ConfigError("step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be non-negative");
  if (options.record_every == 0) throw ConfigError("record_every must be positive");
  game.check_profile(x0);

  Chart y;
  for (const auto& xk : x0) y.push_back(to_log_ratio(xk));

  Trajectory traj;
  traj.constant_schedule = all_constant(schedules);
  record_row(traj, game, 0.0, profile_from_chart(y), sample(schedules, 0.0));

  const Rk4Stepper stepper(game, options);
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / options.step - 1e-9));
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * options.step;
    const bool last = s + 1 == steps;
    const double t_next = last ? t_end : static_cast<double>(s + 1) * options.step;
    const auto params = to_params(sample(schedules, t));
    stepper.advance(y, t, t_next - t, params, 0);
    if (last || (s + 1) % options.record_every == 0) {
      record_row(traj, game, t_next, profile_from_chart(y), sample(schedules, t_next));
    }
  }
  return traj;
}

QValueState q_update_step(QValueState q, std::size_t k, std::size_t i, double reward, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("q_update_step: alpha must lie in [0, 1)");
  if (k >= q.size() || i >= q[k].size()) throw ConfigError("q_update_step: index out of range");
  q[k][i] = (1.0 - alpha) * q[k][i] + alpha * reward;
  return q;
}

MixedStrategy boltzmann_distribution(std::span<const double> q_k, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("boltzmann: beta must be non-negative");
  return softmax(q_k, beta);
}

std::string to_string(BatchMode mode) {
  return mode == BatchMode::paper_eq12 ? "paper_eq12" : "exact_eq8";
}

BatchMode parse_batch_mode(const std::string& name) {
  if (name == "exact_eq8") return BatchMode::exact_eq8;
  if (name == "paper_eq12") return BatchMode::paper_eq12;
  throw ConfigError("unknown batch mode '" + name + "' (expected exact_eq8 or paper_eq12)");
}

double batch_q_update(double q, double reward, double alpha, std::size_t n, BatchMode mode) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("batch_q_update: alpha must lie in [0, 1)");
  const double nn = static_cast<double>(n);
  const double keep = std::pow(1.0 - alpha, nn);
  if (mode == BatchMode::exact_eq8) return keep * q + reward * (1.0 - keep);
  if (alpha == 0.0) return q + (nn + 1.0) * reward;
  return keep * q + (reward / alpha) * (1.0 - keep * (1.0 - alpha));
}

std::vector<std::size_t> interaction_counts(std::span<const double> x, std::size_t m) {
  std::vector<std::size_t> counts(x.size());
  std::vector<double> frac(x.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double share = std::max(0.0, x[i]) * static_cast<double>(m);
    counts[i] = static_cast<std::size_t>(std::floor(share));
    frac[i] = share - std::floor(share);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t j = 0; assigned < m && j < order.size(); ++j, ++assigned) ++counts[order[j]];
  // Guard against rounding pushing the floors above M.
  for (std::size_t i = x.size(); assigned > m && i-- > 0;) {
    const std::size_t take = std::min(counts[i], assigned - m);
    counts[i] -= take;
    assigned -= take;
  }
  return counts;
}

Trajectory simulate_discrete(const NormalFormGame& game,
                             std::span<const ExplorationSchedule> schedules, const Profile& x0,
                             std::size_t epochs, const DiscreteOptions& options) {
  check_schedules(game, schedules);
  game.check_profile(x0);
  QValueState q0(x0.size());
  for (std::size_t k = 0; k < x0.size(); ++k) {
    const double beta = eval_schedule(schedules[k], 0.0).beta;
    for (double p : x0[k]) {
      if (!(p > 0.0)) throw DomainError("simulate_discrete: initial profile must be interior");
      q0[k].push_back(std::log(p) / beta);
    }
  }
  return simulate_discrete_from_q(game, schedules, std::move(q0), epochs, options);
}

Trajectory simulate_discrete_from_q(const NormalFormGame& game,
                                    std::span<const ExplorationSchedule> schedules,
                                    QValueState q, std::size_t epochs,
                                    const DiscreteOptions& options) {
  check_schedules(game, schedules);
  if (options.interactions == 0) throw ConfigError("interactions per epoch must be at least 1");
  if (options.record_every == 0) throw ConfigError("record_every must be positive");
  if (q.size() != game.num_players()) throw ConfigError("Q state has the wrong number of players");
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k].size() != game.num_actions(k)) throw ConfigError("Q state has the wrong shape");
  }

  auto values = sample(schedules, 0.0);
  Profile x(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) x[k] = boltzmann_distribution(q[k], values[k].beta);

  Trajectory traj;
  traj.constant_schedule = all_constant(schedules);
  record_row(traj, game, 0.0, x, values);
  traj.q_values.push_back(q);

  for (std::size_t n = 0; n < epochs; ++n) {
    values = sample(schedules, static_cast<double>(n));
    const auto r = reward_vectors(game, x);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const auto counts = interaction_counts(x[k], options.interactions);
      for (std::size_t i = 0; i < q[k].size(); ++i) {
        q[k][i] = batch_q_update(q[k][i], r[k][i], values[k].alpha, counts[i], options.mode);
        if (!std::isfinite(q[k][i])) {
          throw NumericalError("Q value is not finite", static_cast<double>(n));
        }
      }
    }
    for (std::size_t k = 0; k < q.size(); ++k) x[k] = boltzmann_distribution(q[k], values[k].beta);
    const bool last = n + 1 == epochs;
    if (last || (n + 1) % options.record_every == 0) {
      const double t = static_cast<double>(n + 1);
      record_row(traj, game, t, x, sample(schedules, t));
      traj.q_values.push_back(q);
    }
  }
  return traj;
}

}  // namespace smoothq
