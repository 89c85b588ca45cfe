#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smoothq/game.hpp"
#include "smoothq/schedule.hpp"

namespace smoothq {

/// Q_ki memories, one vector per player.
using QValueState = std::vector<std::vector<double>>;

/// Output of both engines. Row r of every member describes the same instant.
/// q_values is filled only by the discrete engine and phi_h only when the
/// game carries a potential.
struct Trajectory {
  std::vector<double> times;
  std::vector<Profile> profiles;
  std::vector<QValueState> q_values;
  std::vector<std::vector<ScheduleValue>> schedule_values;
  std::vector<std::vector<double>> utilities;
  std::vector<double> phi_h;
  /// True when every agent's schedule is constant in time.
  bool constant_schedule = false;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

/// dx_ki/dt = x_ki (beta_k (r_ki - <x_k, r_k>) - alpha_k (ln x_ki - <x_k, ln x_k>)).
/// Throws DomainError on a boundary profile.
std::vector<std::vector<double>> sql_vector_field(const NormalFormGame& game,
                                                  std::span<const AgentParams> params,
                                                  const Profile& profile);

/// The same field in the log-ratio chart of each player:
/// dy_ki/dt = beta_k (r_ki - r_kn) - alpha_k y_ki.
std::vector<std::vector<double>> sql_log_ratio_field(const NormalFormGame& game,
                                                     std::span<const AgentParams> params,
                                                     const Profile& profile,
                                                     const std::vector<std::vector<double>>& y);

struct IntegrateOptions {
  double step = 1e-2;
  /// Keep every record_every-th step; t = 0 and t_end are always kept.
  std::size_t record_every = 1;
  /// A step is split in halves while step * |field|_inf exceeds this
  /// (field norm 1e3 at the default step).
  double max_increment = 10.0;
  int max_halvings = 30;
};

/// Classical RK4 in log-ratio coordinates with schedules frozen at the start
/// of each step. Throws NumericalError (with the failing time) when the field
/// becomes non-finite or the step cannot be reduced enough.
Trajectory integrate_sql(const NormalFormGame& game,
                         std::span<const ExplorationSchedule> schedules, const Profile& x0,
                         double t_end, const IntegrateOptions& options = {});

/// (1 - alpha) Q_ki + alpha * reward; only entry (k, i) changes.
QValueState q_update_step(QValueState q, std::size_t k, std::size_t i, double reward, double alpha);

/// x_i proportional to exp(beta q_i), computed with max-subtraction.
MixedStrategy boltzmann_distribution(std::span<const double> q_k, double beta);

enum class BatchMode { exact_eq8, paper_eq12 };

std::string to_string(BatchMode mode);
BatchMode parse_batch_mode(const std::string& name);

/// Closed form of n applications of the Q update with a constant reward.
/// exact_eq8: (1-a)^n q + r (1 - (1-a)^n).
/// paper_eq12: (1-a)^n q + (r/a)(1 - (1-a)^(n+1)), and q + (n+1) r at a = 0.
double batch_q_update(double q, double reward, double alpha, std::size_t n, BatchMode mode);

/// round(M x_i) with the remainder given to the largest fractional parts, so
/// the counts sum to M.
std::vector<std::size_t> interaction_counts(std::span<const double> x, std::size_t m);

struct DiscreteOptions {
  std::size_t interactions = 1000;  // M
  BatchMode mode = BatchMode::exact_eq8;
  std::size_t record_every = 1;
};

/// Expected-reward batch Q-learning. Epoch n samples the schedules at t = n,
/// evaluates rewards against the frozen profile, applies batch_q_update with
/// n_i = interaction_counts(x_k, M) and refreshes x_k by Boltzmann. The
/// initial memories are Q_k = ln(x_k(0)) / beta_k(0).
Trajectory simulate_discrete(const NormalFormGame& game,
                             std::span<const ExplorationSchedule> schedules, const Profile& x0,
                             std::size_t epochs, const DiscreteOptions& options = {});

Trajectory simulate_discrete_from_q(const NormalFormGame& game,
                                    std::span<const ExplorationSchedule> schedules,
                                    QValueState q0, std::size_t epochs,
                                    const DiscreteOptions& options = {});

}  // namespace smoothq
