#include "smoothq/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smoothq/errors.hpp"

namespace smoothq {

namespace {

// Calls fn(joint_index, actions) for every joint pure profile in layout order.
template <typename Fn>
void for_each_profile(std::span<const std::size_t> counts, Fn&& fn) {
  std::vector<std::size_t> actions(counts.size(), 0);
  std::size_t total = 1;
  for (std::size_t n : counts) total *= n;
  for (std::size_t joint = 0; joint < total; ++joint) {
    fn(joint, std::span<const std::size_t>(actions));
    for (std::size_t k = counts.size(); k-- > 0;) {
      if (++actions[k] < counts[k]) break;
      actions[k] = 0;
    }
  }
}

void require_player(const NormalFormGame& game, std::size_t k) {
  if (k >= game.num_players()) throw ConfigError("player index out of range");
}

void require_interior(const MixedStrategy& xk, const char* where) {
  for (double p : xk) {
    if (!std::isfinite(p) || p <= 0.0) {
      throw DomainError(std::string(where) + ": choice probability on the simplex boundary");
    }
  }
}

}  // namespace

NormalFormGame::NormalFormGame(std::vector<std::size_t> action_counts,
                               std::vector<std::vector<double>> payoffs)
    : action_counts_(std::move(action_counts)), payoffs_(std::move(payoffs)) {
  if (action_counts_.empty()) throw ConfigError("game needs at least one player");
  if (payoffs_.size() != action_counts_.size()) {
    throw ConfigError("one payoff tensor per player is required");
  }
  num_profiles_ = 1;
  for (std::size_t n : action_counts_) {
    if (n == 0) throw ConfigError("every player needs at least one action");
    num_profiles_ *= n;
  }
  strides_.assign(action_counts_.size(), 1);
  for (std::size_t k = action_counts_.size() - 1; k-- > 0;) {
    strides_[k] = strides_[k + 1] * action_counts_[k + 1];
  }
  for (std::size_t k = 0; k < payoffs_.size(); ++k) {
    if (payoffs_[k].size() != num_profiles_) {
      std::ostringstream msg;
      msg << "payoff tensor of player " << k + 1 << " has " << payoffs_[k].size()
          << " entries, expected " << num_profiles_;
      throw ConfigError(msg.str());
    }
    for (double v : payoffs_[k]) {
      if (!std::isfinite(v)) throw ConfigError("payoffs must be finite");
    }
  }
}

std::size_t NormalFormGame::joint_index(std::span<const std::size_t> actions) const {
  if (actions.size() != num_players()) throw ConfigError("joint_index: wrong number of actions");
  std::size_t joint = 0;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (actions[k] >= action_counts_[k]) throw ConfigError("joint_index: action out of range");
    joint += actions[k] * strides_[k];
  }
  return joint;
}

void NormalFormGame::set_potential(WeightedPotential potential) {
  if (potential.phi.size() != num_profiles_) throw ConfigError("potential has the wrong shape");
  if (potential.weights.size() != num_players()) {
    throw ConfigError("potential needs one weight per player");
  }
  for (double w : potential.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("potential weights must be positive");
  }
  for (double v : potential.phi) {
    if (!std::isfinite(v)) throw ConfigError("potential values must be finite");
  }
  potential_ = std::move(potential);
}

void NormalFormGame::check_profile(const Profile& profile) const {
  if (profile.size() != num_players()) throw ConfigError("profile has the wrong number of players");
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (profile[k].size() != action_counts_[k]) {
      throw ConfigError("profile has the wrong number of actions for a player");
    }
    double total = 0.0;
    for (double p : profile[k]) {
      if (!std::isfinite(p) || p < 0.0) throw ConfigError("profile entries must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("profile entries must sum to one");
  }
}

AgentParams::AgentParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
}

AgentParams AgentParams::from_delta(double delta, double beta) { return {delta * beta, beta}; }

std::vector<std::vector<double>> reward_vectors(const NormalFormGame& game, const Profile& profile) {
  game.check_profile(profile);
  const auto& counts = game.action_counts();
  std::vector<std::vector<double>> rewards(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) rewards[k].assign(counts[k], 0.0);

  if (counts.size() == 2) {
    const std::size_t n = counts[0], m = counts[1];
    const auto u1 = game.payoffs(0);
    const auto u2 = game.payoffs(1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        rewards[0][i] += u1[i * m + j] * profile[1][j];
        rewards[1][j] += u2[i * m + j] * profile[0][i];
      }
    }
    return rewards;
  }

  for_each_profile(counts, [&](std::size_t joint, std::span<const std::size_t> a) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
      double weight = 1.0;
      for (std::size_t l = 0; l < counts.size(); ++l) {
        if (l != k) weight *= profile[l][a[l]];
      }
      rewards[k][a[k]] += game.payoff(k, joint) * weight;
    }
  });
  return rewards;
}

std::vector<double> reward_vector(const NormalFormGame& game, const Profile& profile, std::size_t k) {
  require_player(game, k);
  return reward_vectors(game, profile)[k];
}

double expected_utility(const NormalFormGame& game, const Profile& profile, std::size_t k) {
  const auto r = reward_vector(game, profile, k);
  return dot(profile[k], r);
}

std::vector<double> modified_reward(const NormalFormGame& game, const Profile& profile,
                                    const AgentParams& params, std::size_t k) {
  auto r = reward_vector(game, profile, k);
  require_interior(profile[k], "modified_reward");
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = params.beta() * r[i] - params.alpha() * (floored_log(profile[k][i]) + 1.0);
  }
  return r;
}

double modified_utility(const NormalFormGame& game, const Profile& profile,
                        const AgentParams& params, std::size_t k) {
  const auto r = reward_vector(game, profile, k);
  require_interior(profile[k], "modified_utility");
  double x_log_x = 0.0;
  for (double p : profile[k]) x_log_x += p * floored_log(p);
  return params.beta() * dot(profile[k], r) - params.alpha() * x_log_x;
}

double multilinear_extension(std::span<const double> tensor,
                             std::span<const std::size_t> action_counts, const Profile& profile) {
  if (profile.size() != action_counts.size()) throw ConfigError("profile/tensor player mismatch");
  std::size_t total = 1;
  for (std::size_t k = 0; k < action_counts.size(); ++k) {
    if (profile[k].size() != action_counts[k]) throw ConfigError("profile/tensor action mismatch");
    total *= action_counts[k];
  }
  if (tensor.size() != total) throw ConfigError("tensor has the wrong size");
  double value = 0.0;
  for_each_profile(action_counts, [&](std::size_t joint, std::span<const std::size_t> a) {
    double weight = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) weight *= profile[k][a[k]];
    value += tensor[joint] * weight;
  });
  return value;
}

double multilinear_potential(const NormalFormGame& game, const WeightedPotential& potential,
                             const Profile& profile) {
  return multilinear_extension(potential.phi, game.action_counts(), profile);
}

PotentialCheck verify_weighted_potential(const NormalFormGame& game,
                                         const WeightedPotential& candidate, double tolerance) {
  PotentialCheck check;
  if (candidate.phi.size() != game.num_profiles() ||
      candidate.weights.size() != game.num_players()) {
    check.max_violation = std::numeric_limits<double>::infinity();
    return check;
  }
  const auto& counts = game.action_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const std::size_t stride = game.stride(k);
    const double w = candidate.weights[k];
    for_each_profile(counts, [&](std::size_t joint, std::span<const std::size_t> a) {
      // Compare action a_k against every higher action j with the rest fixed.
      for (std::size_t j = a[k] + 1; j < counts[k]; ++j) {
        const std::size_t other = joint + (j - a[k]) * stride;
        const double du = game.payoff(k, joint) - game.payoff(k, other);
        const double dphi = candidate.phi[joint] - candidate.phi[other];
        check.max_violation = std::max(check.max_violation, std::abs(du - w * dphi));
      }
    });
  }
  check.valid = check.max_violation <= tolerance;
  return check;
}

std::string to_string(Equilibrium e) {
  switch (e) {
    case Equilibrium::a1a1: return "(a1,a1)";
    case Equilibrium::a2a2: return "(a2,a2)";
    case Equilibrium::none: return "none";
  }
  return "none";
}

NormalFormGame CoordinationFacts::to_game() const {
  return NormalFormGame({2, 2}, {{u11, u12, u21, u22}, {v11, v21, v12, v22}});
}

CoordinationFacts classify_coordination(const NormalFormGame& game) {
  if (game.num_players() != 2 || game.num_actions(0) != 2 || game.num_actions(1) != 2) {
    throw ConfigError("classify_coordination needs a 2x2 game");
  }
  CoordinationFacts f;
  const auto u = game.payoffs(0);
  const auto v = game.payoffs(1);
  f.u11 = u[0];
  f.u12 = u[1];
  f.u21 = u[2];
  f.u22 = u[3];
  // Player 2's own action is the column index.
  f.v11 = v[0];
  f.v21 = v[1];
  f.v12 = v[2];
  f.v22 = v[3];

  f.lambda1 = f.u22 - f.u12;
  f.k1 = f.u11 - f.u12 - f.u21 + f.u22;
  f.lambda2 = f.v22 - f.v12;
  f.k2 = f.v11 - f.v12 - f.v21 + f.v22;
  f.x_mix = f.lambda2 / f.k2;
  f.y_mix = f.lambda1 / f.k1;

  f.is_coordination = f.u11 > f.u21 && f.u22 > f.u12 && f.v11 > f.v21 && f.v22 > f.v12;

  const double risk2 = (f.u22 - f.u12) * (f.v22 - f.v12);
  const double risk1 = (f.u11 - f.u21) * (f.v11 - f.v21);
  f.risk_dominant = risk2 > risk1 ? Equilibrium::a2a2
                    : risk2 < risk1 ? Equilibrium::a1a1
                                    : Equilibrium::none;

  if (f.u22 >= f.u11 && f.v22 >= f.v11 && (f.u22 > f.u11 || f.v22 > f.v11)) {
    f.payoff_dominant = Equilibrium::a2a2;
  } else if (f.u11 >= f.u22 && f.v11 >= f.v22 && (f.u11 > f.u22 || f.v11 > f.v22)) {
    f.payoff_dominant = Equilibrium::a1a1;
  }

  f.surface_connected_prediction = (f.x_mix > 0.5) != (f.y_mix > 0.5);
  return f;
}

WeightedPotential potential_2x2(const NormalFormGame& game) {
  const auto f = classify_coordination(game);
  if (f.k2 == 0.0) throw ConfigError("potential_2x2: degenerate game (k2 = 0)");
  const double w = f.k1 / f.k2;
  if (!(w > 0.0)) throw ConfigError("potential_2x2: k1 and k2 must have the same sign");
  const double d1 = f.u11 - f.u21;
  const double d2 = f.v11 - f.v21;
  WeightedPotential p;
  // phi differences along player 2's axis are w times v differences, so in
  // the u = w_k * phi convention player 2's weight is 1 / w.
  p.phi = {d1, d1 - w * d2, 0.0, f.k1 - w * d2};
  p.weights = {1.0, 1.0 / w};
  return p;
}

}  // namespace smoothq
