#include "smoothq/games.hpp"

#include <cmath>
#include <random>

#include "smoothq/errors.hpp"

namespace smoothq {

namespace {

NormalFormGame bimatrix(std::vector<double> u1, std::vector<double> u2) {
  return NormalFormGame({2, 2}, {std::move(u1), std::move(u2)});
}

NormalFormGame with_2x2_potential(NormalFormGame game) {
  game.set_potential(potential_2x2(game));
  return game;
}

NormalFormGame identical_interest(std::size_t n, std::size_t m, std::vector<double> phi) {
  NormalFormGame game({n, m}, {phi, phi});
  game.set_potential({std::move(phi), {1.0, 1.0}});
  return game;
}

}  // namespace

std::vector<std::string> builtin_game_names() {
  return {"stag_hunt", "battle_of_sexes", "pareto_coordination", "appendix_potential", "diagonal_10"};
}

NormalFormGame builtin_game(const std::string& name) {
  // Payoffs indexed (player-1 action, player-2 action).
  if (name == "stag_hunt") return with_2x2_potential(bimatrix({3, 0, 2, 1.5}, {3, 2, 0, 1.5}));
  if (name == "battle_of_sexes") return with_2x2_potential(bimatrix({1.5, 0, 0, 1}, {1, 0, 0, 2}));
  if (name == "pareto_coordination") {
    return with_2x2_potential(bimatrix({1, 0, 0, 1.5}, {1, 0, 0, 1.8}));
  }
  if (name == "appendix_potential") return identical_interest(10, 10, appendix_phi_matrix());
  if (name == "diagonal_10") {
    std::vector<double> d(10);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(i + 1);
    return diagonal_game(d);
  }
  throw ConfigError("unknown game '" + name + "'");
}

CatastropheKind parse_catastrophe_kind(const std::string& name) {
  if (name == "loss") return CatastropheKind::loss;
  if (name == "gain") return CatastropheKind::gain;
  throw ConfigError("catastrophe direction must be 'loss' or 'gain'");
}

NormalFormGame catastrophe_game(double m, CatastropheKind kind) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("catastrophe_game: M must be positive");
  const double off = kind == CatastropheKind::loss ? 0.0 : 1.5;
  // u2 = u1^T in (player-1 action, player-2 action) layout.
  return with_2x2_potential(bimatrix({2 * m, off, 2 * m - 1, 2}, {2 * m, 2 * m - 1, off, 2}));
}

NormalFormGame diagonal_game(const std::vector<double>& entries) {
  if (entries.empty()) throw ConfigError("diagonal_game: no entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i] > 0.0) || !std::isfinite(entries[i])) {
      throw ConfigError("diagonal_game: entries must be positive");
    }
    if (i > 0 && !(entries[i] > entries[i - 1])) {
      throw ConfigError("diagonal_game: entries must be strictly increasing");
    }
  }
  const std::size_t n = entries.size();
  std::vector<double> phi(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) phi[i * n + i] = entries[i];
  return identical_interest(n, n, std::move(phi));
}

std::vector<double> appendix_phi_matrix() {
  return {
      4, 4, 8, 1, 9, 1, 1, 9, 8, 2,  //
      7, 7, 9, 4, 7, 7, 4, 2, 6, 9,  //
      1, 2, 3, 9, 3, 2, 7, 2, 7, 5,  //
      3, 8, 7, 5, 8, 3, 4, 8, 4, 6,  //
      2, 1, 8, 7, 1, 5, 1, 4, 3, 4,  //
      1, 7, 9, 3, 5, 1, 5, 2, 9, 3,  //
      2, 4, 1, 7, 9, 6, 6, 9, 4, 9,  //
      4, 6, 1, 8, 3, 2, 5, 4, 9, 6,  //
      4, 2, 2, 1, 3, 6, 9, 7, 6, 1,  //
      5, 2, 8, 7, 2, 7, 6, 7, 6, 10,
  };
}

NormalFormGame random_potential_game(std::size_t n, std::size_t m, std::uint64_t seed, double lo,
                                     double hi) {
  if (n < 2 || m < 2) throw ConfigError("random_potential_game: need at least 2 actions each");
  if (!(hi > lo)) throw ConfigError("random_potential_game: empty value range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> phi(n * m);
  for (double& v : phi) v = dist(rng);
  return identical_interest(n, m, std::move(phi));
}

NormalFormGame random_game(const std::vector<std::size_t>& action_counts, std::uint64_t seed,
                           double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("random_game: empty value range");
  std::size_t profiles = 1;
  for (std::size_t n : action_counts) profiles *= n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<std::vector<double>> payoffs(action_counts.size(), std::vector<double>(profiles));
  for (auto& u : payoffs) {
    for (double& v : u) v = dist(rng);
  }
  return NormalFormGame(action_counts, std::move(payoffs));
}

}  // namespace smoothq
