#pragma once

#include <cmath>
#include <vector>

#include "smoothq/game.hpp"

namespace testing_support {

inline smoothq::NormalFormGame zero_game(std::vector<std::size_t> counts) {
  std::size_t total = 1;
  for (auto n : counts) total *= n;
  std::vector<std::vector<double>> payoffs(counts.size(), std::vector<double>(total, 0.0));
  return smoothq::NormalFormGame(counts, payoffs);
}

// Two-player game from row-major payoff matrices A (player 1) and B (player 2).
inline smoothq::NormalFormGame bimatrix(std::size_t n, std::size_t m, std::vector<double> a,
                                        std::vector<double> b) {
  return smoothq::NormalFormGame({n, m}, {std::move(a), std::move(b)});
}

inline double logistic(double s) { return 1.0 / (1.0 + std::exp(-s)); }

}  // namespace testing_support
