#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothq/game.hpp"

namespace smoothq {

/// stag_hunt, battle_of_sexes, pareto_coordination: the three 2x2 benchmark
/// coordination games, each with its potential_2x2 potential attached.
/// appendix_potential: identical-interest 10x10 game on appendix_phi_matrix().
/// diagonal_10: diagonal_game(1, 2, ..., 10).
NormalFormGame builtin_game(const std::string& name);
std::vector<std::string> builtin_game_names();

enum class CatastropheKind { loss, gain };

CatastropheKind parse_catastrophe_kind(const std::string& name);

/// Symmetric 2x2 games with u1 rows (2M, 0)/(2M - 1, 2) for loss and
/// (2M, 1.5)/(2M - 1, 2) for gain, u2 = u1^T.
NormalFormGame catastrophe_game(double m, CatastropheKind kind);

/// u1 = diag(entries), u2 = u1^T; entries must be positive and strictly increasing.
NormalFormGame diagonal_game(const std::vector<double>& entries);

/// The fixed 10x10 potential, row-major, entry (10, 10) = 10.
std::vector<double> appendix_phi_matrix();

/// Identical-interest two-player game u1 = u2 = phi with phi i.i.d. uniform
/// on [lo, hi) from mt19937_64(seed); the potential (phi, (1, 1)) is attached.
NormalFormGame random_potential_game(std::size_t n, std::size_t m, std::uint64_t seed,
                                     double lo = 0.0, double hi = 1.0);

/// Game with every payoff i.i.d. uniform on [lo, hi).
NormalFormGame random_game(const std::vector<std::size_t>& action_counts, std::uint64_t seed,
                           double lo = 0.0, double hi = 1.0);

}  // namespace smoothq
