#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "smoothq/dynamics.hpp"
#include "smoothq/game.hpp"
#include "smoothq/games.hpp"
#include "smoothq/schedule.hpp"

namespace smoothq {

/// Resolves a game reference: a builtin name, a path to a game file, or an
/// object that is either an inline game, {"file": path},
/// {"catastrophe": {"M": .., "kind": "loss"|"gain"}},
/// {"diagonal": [..]} or {"random_potential": {"n", "m", "lo", "hi"}} (uses `seed`).
NormalFormGame resolve_game(const nlohmann::json& ref, std::uint64_t seed,
                            const std::filesystem::path& base_dir = {});

/// Starts with mass 1 - (n_k - 1) eps on one action per player, one start per
/// joint pure profile (player 1 slowest).
std::vector<Profile> pure_starts(const NormalFormGame& game, double eps = 0.05);

/// For games where every player has two actions: the G^N lattice of action-1
/// probabilities linspace(lo, hi, G) (player 1 slowest).
std::vector<Profile> lattice_starts(const NormalFormGame& game, std::size_t size, double lo = 0.05,
                                    double hi = 0.95);

enum class EngineKind { continuous, discrete };

struct EngineConfig {
  EngineKind kind = EngineKind::continuous;
  double t_end = 100.0;
  IntegrateOptions integrate;
  std::size_t epochs = 20000;
  DiscreteOptions discrete;
};

struct ExperimentConfig {
  nlohmann::json game_ref = "stag_hunt";
  std::vector<ExplorationSchedule> schedules;
  EngineConfig engine;
  nlohmann::json initial = {{"kind", "lattice"}, {"size", 3}};
  std::string trajectory_output = "all";  // all | first | none
  bool regret = false;
  std::optional<nlohmann::json> surface;
  std::optional<nlohmann::json> projection;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::filesystem::path base_dir;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {});
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

struct ExperimentResult {
  std::vector<Profile> starts;
  std::vector<Profile> endpoints;
  std::vector<std::vector<double>> final_utilities;
  /// Phi at every endpoint (empty without a potential).
  std::vector<double> final_potential;
  std::vector<std::string> files;
  nlohmann::json summary;
};

/// Runs every start (in parallel, results in start order), then the optional
/// surface and projection analyses. With an output directory, writes the
/// CSV files and summary.json there.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Smallest delta on a symmetric diagonal sweep (delta_x = delta_y) of a 2x2
/// game where the QRE count drops from 3 to 1, found by bisection to `tol`.
/// Returns nullopt when the count is never 3 in [lo, hi].
std::optional<double> symmetric_fold_delta(const NormalFormGame& game, double lo = 1e-3,
                                           double hi = 20.0, double tol = 1e-6);

struct CatastropheOutcome {
  double m = 0.0;
  CatastropheKind kind = CatastropheKind::loss;
  double fold_delta = 0.0;
  double delta_peak = 0.0;
  Profile start;
  Profile exploit_end;
  Profile explore_end;
  double exploit_utility = 0.0;
  double explore_utility = 0.0;
  /// exploit / explore for loss, explore / exploit for gain.
  double ratio = 0.0;
  Trajectory exploit_trajectory;
  Trajectory explore_trajectory;
};

struct CatastropheOptions {
  /// Peak exploration as a multiple of the measured symmetric fold delta.
  double peak_over_fold = 2.0;
  double beta = 0.1;
  double t_peak = 300.0;
  double t_end = 600.0;
  double tail = 600.0;
  double step = 0.05;
  std::size_t record_every = 20;
};

/// Runs the catastrophe game twice from its default start ((0.9, 0.9) for
/// loss, (0.1, 0.1) for gain): once with no exploration and once with a
/// CLR-1 exploration cycle for both agents, then reads the utility of player 1
/// at the final state.
CatastropheOutcome run_catastrophe(double m, CatastropheKind kind, const CatastropheOptions& options = {});

nlohmann::json catastrophe_to_json(const CatastropheOutcome& outcome);

}  // namespace smoothq
