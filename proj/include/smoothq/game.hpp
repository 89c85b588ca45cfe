#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothq/profile.hpp"

namespace smoothq {

/// phi over joint pure profiles (same layout as the payoff tensors) and one
/// positive weight per player: u_k(i,a_-k) - u_k(j,a_-k) = w_k (phi(i,a_-k) - phi(j,a_-k)).
struct WeightedPotential {
  std::vector<double> phi;
  std::vector<double> weights;
};

/// Finite N-player normal-form game with dense payoff tensors.
///
/// Joint pure profiles are indexed row-major with player 0 most significant,
/// so for two players the payoff of (i, j) lives at `i * n_2 + j` in every
/// player's tensor.
class NormalFormGame {
 public:
  NormalFormGame(std::vector<std::size_t> action_counts, std::vector<std::vector<double>> payoffs);

  std::size_t num_players() const noexcept { return action_counts_.size(); }
  std::size_t num_actions(std::size_t k) const { return action_counts_.at(k); }
  const std::vector<std::size_t>& action_counts() const noexcept { return action_counts_; }
  std::size_t num_profiles() const noexcept { return num_profiles_; }
  std::size_t stride(std::size_t k) const { return strides_.at(k); }

  std::size_t joint_index(std::span<const std::size_t> actions) const;
  double payoff(std::size_t k, std::size_t joint) const { return payoffs_.at(k).at(joint); }
  double payoff(std::size_t k, std::span<const std::size_t> actions) const {
    return payoff(k, joint_index(actions));
  }
  std::span<const double> payoffs(std::size_t k) const { return payoffs_.at(k); }

  const std::optional<WeightedPotential>& potential() const noexcept { return potential_; }
  /// Attaches a potential after a shape check. Use verify_weighted_potential
  /// to check the defining identities.
  void set_potential(WeightedPotential potential);

  /// Throws ConfigError unless `profile` has one simplex vector (within 1e-9)
  /// per player with the right length.
  void check_profile(const Profile& profile) const;

 private:
  std::vector<std::size_t> action_counts_;
  std::vector<std::size_t> strides_;
  std::size_t num_profiles_ = 0;
  std::vector<std::vector<double>> payoffs_;
  std::optional<WeightedPotential> potential_;
};

/// Memory-loss rate alpha in [0, 1) and adaptation rate beta > 0.
class AgentParams {
 public:
  AgentParams(double alpha, double beta);
  static AgentParams from_delta(double delta, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double delta() const noexcept { return alpha_ / beta_; }

 private:
  double alpha_;
  double beta_;
};

/// r_ki(x) = u_k(i; x_-k).
std::vector<double> reward_vector(const NormalFormGame& game, const Profile& profile, std::size_t k);

/// Reward vectors for every player in one pass.
std::vector<std::vector<double>> reward_vectors(const NormalFormGame& game, const Profile& profile);

double expected_utility(const NormalFormGame& game, const Profile& profile, std::size_t k);

/// r^H_ki = beta_k r_ki - alpha_k (ln x_ki + 1). Requires x_k interior.
std::vector<double> modified_reward(const NormalFormGame& game, const Profile& profile,
                                    const AgentParams& params, std::size_t k);

/// u^H_k = beta_k <x_k, r_k> - alpha_k <x_k, ln x_k>. Requires x_k interior.
double modified_utility(const NormalFormGame& game, const Profile& profile,
                        const AgentParams& params, std::size_t k);

/// Expectation of a joint-profile tensor under a product distribution.
double multilinear_extension(std::span<const double> tensor,
                             std::span<const std::size_t> action_counts, const Profile& profile);

/// Phi(x) = sum_a phi(a) prod_k x_{k a_k}.
double multilinear_potential(const NormalFormGame& game, const WeightedPotential& potential,
                             const Profile& profile);

struct PotentialCheck {
  bool valid = false;
  double max_violation = 0.0;
};

/// Checks every unilateral-deviation identity of a weighted potential.
PotentialCheck verify_weighted_potential(const NormalFormGame& game,
                                         const WeightedPotential& candidate,
                                         double tolerance = 1e-9);

enum class Equilibrium { a1a1, a2a2, none };

std::string to_string(Equilibrium e);

/// Closed-form facts about a 2x2 game in the coordination-game notation.
/// Player 1 payoffs u_ij (own action i, opponent j) and player 2 payoffs v_ij
/// (own action i, opponent j). x_mix, y_mix are probabilities of action a_1.
struct CoordinationFacts {
  double u11 = 0, u12 = 0, u21 = 0, u22 = 0;
  double v11 = 0, v12 = 0, v21 = 0, v22 = 0;
  double lambda1 = 0, k1 = 0, lambda2 = 0, k2 = 0;
  double x_mix = 0, y_mix = 0;
  Equilibrium risk_dominant = Equilibrium::none;
  Equilibrium payoff_dominant = Equilibrium::none;
  bool surface_connected_prediction = false;
  /// False when the coordination inequalities fail; the other fields are
  /// still populated so parameter sweeps can continue.
  bool is_coordination = false;

  /// Rebuilds the 2x2 game these facts describe.
  NormalFormGame to_game() const;
};

CoordinationFacts classify_coordination(const NormalFormGame& game);

/// Potential of a 2x2 coordination game, built with w = k1/k2:
/// phi = [[u11 - u21, u11 - u21 - w (v11 - v21)], [0, k1 - w (v11 - v21)]].
/// Player 2's phi differences are w times its payoff differences, so the
/// returned weights are (1, k2/k1).
WeightedPotential potential_2x2(const NormalFormGame& game);

}  // namespace smoothq
