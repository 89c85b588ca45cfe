#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smoothq/csv.hpp"
#include "smoothq/errors.hpp"
#include "smoothq/experiment.hpp"
#include "smoothq/game_io.hpp"
#include "smoothq/games.hpp"
#include "smoothq/metrics.hpp"
#include "smoothq/projection.hpp"
#include "smoothq/qre.hpp"
#include "smoothq/surface.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace smoothq;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::string game = "stag_hunt";
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::string engine;
  std::string format = "csv";
  bool game_set = false;
  bool seed_set = false;
};

NormalFormGame load_game(const Globals& g) { return resolve_game(json(g.game), g.seed, fs::current_path()); }

fs::path ensure_out(const Globals& g) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec || !fs::is_directory(g.out)) throw ConfigError("cannot create output directory " + g.out);
  return g.out;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<double> flatten(const Profile& x) {
  std::vector<double> out;
  for (const auto& xk : x) out.insert(out.end(), xk.begin(), xk.end());
  return out;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  double delta = 0.1;
  double beta = 1.0;
  double t_end = 100.0;
  double step = 1e-2;
  std::size_t epochs = 20000;
  std::size_t interactions = 1000;
  std::string mode = "exact_eq8";
  std::size_t record_every = 1;
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  ExperimentConfig config;
  if (!g.config.empty()) {
    const fs::path path(g.config);
    config = parse_experiment_config(read_json_file(path), path.parent_path());
  } else {
    const NormalFormGame game = load_game(g);
    json j = {{"game", g.game}, {"schedules", json::array()}};
    for (std::size_t k = 0; k < game.num_players(); ++k) {
      j["schedules"].push_back({{"kind", "constant"}, {"delta", a.delta}, {"beta", a.beta}});
    }
    const bool two = std::all_of(game.action_counts().begin(), game.action_counts().end(),
                                 [](std::size_t n) { return n == 2; });
    j["initial"] = two ? json{{"kind", "lattice"}, {"size", 3}} : json{{"kind", "pure"}};
    j["engine"] = {{"kind", "continuous"},     {"t_end", a.t_end},  {"step", a.step},
                   {"epochs", a.epochs},       {"interactions", a.interactions},
                   {"mode", a.mode},           {"record_every", a.record_every}};
    config = parse_experiment_config(j, fs::current_path());
  }
  if (g.game_set) config.game_ref = g.game;
  if (g.seed_set) config.seed = g.seed;
  if (!g.engine.empty()) config.engine.kind = g.engine == "discrete" ? EngineKind::discrete : EngineKind::continuous;

  const auto result = run_experiment(config, ensure_out(g));
  if (g.format == "json") {
    print_json(result.summary);
    return 0;
  }
  std::cout << "run";
  const auto& shape = result.endpoints.front();
  for (std::size_t k = 0; k < shape.size(); ++k) {
    for (std::size_t i = 0; i < shape[k].size(); ++i) std::cout << ",x_" << k + 1 << '_' << i + 1;
  }
  for (std::size_t k = 0; k < shape.size(); ++k) std::cout << ",u_" << k + 1;
  if (!result.final_potential.empty()) std::cout << ",phi";
  std::cout << '\n';
  for (std::size_t r = 0; r < result.endpoints.size(); ++r) {
    std::cout << r;
    for (double v : flatten(result.endpoints[r])) std::cout << ',' << format_number(v);
    for (double u : result.final_utilities[r]) std::cout << ',' << format_number(u);
    if (!result.final_potential.empty()) std::cout << ',' << format_number(result.final_potential[r]);
    std::cout << '\n';
  }
  return 0;
}

// --- qre --------------------------------------------------------------------

struct QreArgs {
  std::vector<double> deltas;
  bool stability = false;
};

int run_qre(const Globals& g, const QreArgs& a) {
  const NormalFormGame game = load_game(g);
  if (a.deltas.size() != game.num_players()) {
    throw ConfigError("--delta needs one value per player (" + std::to_string(game.num_players()) + ")");
  }
  const bool two_by_two = game.num_players() == 2 && game.num_actions(0) == 2 && game.num_actions(1) == 2;
  auto points = two_by_two ? qre_2x2_roots(classify_coordination(game), a.deltas[0], a.deltas[1])
                           : solve_qre_multistart(game, a.deltas, 5);
  if (a.stability) {
    for (auto& p : points) p.stability = stability_of(game, a.deltas, p);
  }
  if (g.format == "json") {
    json out = json::array();
    for (const auto& p : points) {
      json row = {{"profile", p.profile}, {"residual", p.residual}, {"degenerate", p.degenerate}};
      if (p.stability) row["stability"] = to_string(*p.stability);
      out.push_back(row);
    }
    print_json({{"deltas", a.deltas}, {"count", points.size()}, {"qre", out}});
    return 0;
  }
  std::cout << "root";
  for (std::size_t k = 0; k < game.num_players(); ++k) {
    for (std::size_t i = 0; i < game.num_actions(k); ++i) std::cout << ",x_" << k + 1 << '_' << i + 1;
  }
  std::cout << ",residual,stable\n";
  for (std::size_t r = 0; r < points.size(); ++r) {
    std::cout << r;
    for (double v : flatten(points[r].profile)) std::cout << ',' << format_number(v);
    std::cout << ',' << format_number(points[r].residual) << ',';
    if (points[r].stability) std::cout << to_string(*points[r].stability);
    std::cout << '\n';
  }
  return 0;
}

// --- surface ----------------------------------------------------------------

struct SurfaceArgs {
  std::vector<double> range{0.05, 5.0};
  std::size_t resolution = 200;
  bool stability = false;
};

int run_surface(const Globals& g, const SurfaceArgs& a) {
  const NormalFormGame game = load_game(g);
  SweepOptions options;
  options.stability = a.stability;
  const auto scan = sweep_surface(game, {a.range[0], a.range[1]}, {a.range[0], a.range[1]}, a.resolution, options);
  const auto folds = detect_folds(scan);
  const fs::path out = ensure_out(g);
  write_file(out / "surface.csv", [&](std::ostream& os) { write_surface_csv(os, scan); });
  write_file(out / "folds.csv", [&](std::ostream& os) { write_folds_csv(os, folds); });
  for (const auto& w : folds.warnings) std::cerr << "warning: " << w << '\n';
  if (g.format == "json") {
    json comps = json::array();
    for (const auto& c : folds.components) comps.push_back({{"id", c.id}, {"type", c.type}, {"points", c.polyline.size()}});
    print_json({{"fold_components", folds.components.size()}, {"components", comps}, {"warnings", folds.warnings}});
  } else {
    std::cout << "component_id,type,points\n";
    for (const auto& c : folds.components) std::cout << c.id << ',' << c.type << ',' << c.polyline.size() << '\n';
  }
  return 0;
}

// --- project ----------------------------------------------------------------

struct ProjectArgs {
  double delta = 0.0;
  std::vector<double> range{-5.0, 5.0};
  std::size_t resolution = 41;
};

int run_project(const Globals& g, const ProjectArgs& a) {
  const NormalFormGame game = load_game(g);
  if (!game.potential()) throw ConfigError("project needs a game with a potential");
  ProjectionSpec spec;
  spec.seed = g.seed;
  spec.delta = a.delta;
  for (std::size_t i = 0; i < a.resolution; ++i) {
    const double t = a.resolution == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(a.resolution - 1);
    spec.alphas.push_back(a.range[0] + t * (a.range[1] - a.range[0]));
  }
  spec.betas = spec.alphas;
  const auto points = project_potential(game, *game.potential(), spec);
  if (g.format == "json") {
    json out = json::array();
    for (const auto& p : points) out.push_back({p.alpha, p.beta, p.phi_h});
    print_json({{"delta", a.delta}, {"seed", g.seed}, {"points", out}});
  } else {
    write_projection_csv(std::cout, points);
  }
  write_file(ensure_out(g) / "projection.csv", [&](std::ostream& os) { write_projection_csv(os, points); });
  return 0;
}

// --- regret -----------------------------------------------------------------

struct RegretArgs {
  double delta = 0.1;
  double beta = 1.0;
  double t_end = 50.0;
  double step = 1e-2;
};

int run_regret(const Globals& g, const RegretArgs& a) {
  const NormalFormGame game = load_game(g);
  const std::vector<ExplorationSchedule> schedules(game.num_players(), make_constant(a.delta, a.beta));
  IntegrateOptions options;
  options.step = a.step;
  const auto traj = integrate_sql(game, schedules, uniform_profile(game.action_counts()), a.t_end, options);
  const auto reports = regret_all(traj, game);
  write_file(ensure_out(g) / "regret.csv", [&](std::ostream& os) { write_regret_csv(os, reports); });
  if (g.format == "json") {
    json out = json::array();
    for (const auto& r : reports) {
      out.push_back({{"agent", r.agent + 1},
                     {"R", r.regret.back()},
                     {"RH", r.modified_regret.back()},
                     {"bound", r.bound.back()},
                     {"hindsight_strategy", r.hindsight_strategy}});
    }
    print_json({{"t_end", a.t_end}, {"agents", out}});
  } else {
    std::cout << "agent,R,RH,bound\n";
    for (const auto& r : reports) {
      std::cout << r.agent + 1 << ',' << format_number(r.regret.back()) << ','
                << format_number(r.modified_regret.back()) << ',' << format_number(r.bound.back()) << '\n';
    }
  }
  return 0;
}

// --- catastrophe ------------------------------------------------------------

struct CatastropheArgs {
  double m = 10.0;
  std::string kind = "loss";
  double peak_over_fold = 2.0;
};

int run_catastrophe_cmd(const Globals& g, const CatastropheArgs& a) {
  CatastropheOptions options;
  options.peak_over_fold = a.peak_over_fold;
  const auto outcome = run_catastrophe(a.m, parse_catastrophe_kind(a.kind), options);
  const fs::path out = ensure_out(g);
  write_file(out / "catastrophe_exploit.csv",
             [&](std::ostream& os) { write_trajectory_csv(os, outcome.exploit_trajectory); });
  write_file(out / "catastrophe_explore.csv",
             [&](std::ostream& os) { write_trajectory_csv(os, outcome.explore_trajectory); });
  if (g.format == "json") {
    print_json(catastrophe_to_json(outcome));
  } else {
    std::cout << "M,kind,fold_delta,delta_peak,exploit_utility,explore_utility,ratio\n"
              << format_number(outcome.m) << ',' << a.kind << ',' << format_number(outcome.fold_delta) << ','
              << format_number(outcome.delta_peak) << ',' << format_number(outcome.exploit_utility) << ','
              << format_number(outcome.explore_utility) << ',' << format_number(outcome.ratio) << '\n';
  }
  return 0;
}

int run_list(const Globals& g) {
  const auto names = builtin_game_names();
  if (g.format == "json") {
    json out = json::array();
    for (const auto& n : names) {
      const auto game = builtin_game(n);
      out.push_back({{"name", n}, {"actions", game.action_counts()}, {"has_potential", game.potential().has_value()}});
    }
    print_json(out);
  } else {
    for (const auto& n : names) std::cout << n << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth Q-learning dynamics, QRE surfaces and fold detection"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--game", g.game, "Builtin game name or path to a game JSON file")
      ->each([&](const std::string&) { g.game_set = true; });
  app.add_option("--config", g.config, "Experiment config JSON (simulate)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for random directions and random games")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--engine", g.engine, "Override the engine of the config")
      ->check(CLI::IsMember({"continuous", "discrete"}));
  app.add_option("--format", g.format, "Stdout format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate the learning dynamics from a config or constant exploration");
  simulate->add_option("--delta", sim.delta, "Constant exploration rate when no config is given");
  simulate->add_option("--beta", sim.beta, "Adaptation rate when no config is given");
  simulate->add_option("--t-end", sim.t_end, "Continuous horizon");
  simulate->add_option("--step", sim.step, "RK4 step");
  simulate->add_option("--epochs", sim.epochs, "Discrete epochs");
  simulate->add_option("--interactions", sim.interactions, "Q updates per epoch (M)");
  simulate->add_option("--mode", sim.mode, "Batch update mode")->check(CLI::IsMember({"exact_eq8", "paper_eq12"}));
  simulate->add_option("--record-every", sim.record_every, "Keep every n-th step");

  QreArgs qre;
  auto* qre_cmd = app.add_subcommand("qre", "List the QRE of a game at fixed exploration rates");
  qre_cmd->add_option("--delta", qre.deltas, "Exploration rate per player")->required()->expected(1, -1);
  qre_cmd->add_flag("--stability", qre.stability, "Classify each QRE by linearization");

  SurfaceArgs surf;
  auto* surface = app.add_subcommand("surface", "Sweep the QRE surface of a 2x2 game and detect folds");
  surface->add_option("--range", surf.range, "delta range [lo hi] for both axes")->expected(2);
  surface->add_option("--resolution", surf.resolution, "Grid points per axis");
  surface->add_flag("--stability", surf.stability, "Classify every QRE");

  ProjectArgs proj;
  auto* project = app.add_subcommand("project", "Evaluate the regularized potential on a random 2D slice");
  project->add_option("--delta", proj.delta, "Common exploration rate");
  project->add_option("--range", proj.range, "Coefficient range [lo hi]")->expected(2);
  project->add_option("--resolution", proj.resolution, "Grid points per axis");

  RegretArgs reg;
  auto* regret_cmd = app.add_subcommand("regret", "Regret series from a uniform start at constant exploration");
  regret_cmd->add_option("--delta", reg.delta, "Exploration rate");
  regret_cmd->add_option("--beta", reg.beta, "Adaptation rate");
  regret_cmd->add_option("--t-end", reg.t_end, "Horizon");
  regret_cmd->add_option("--step", reg.step, "RK4 step");

  CatastropheArgs cat;
  auto* catastrophe = app.add_subcommand("catastrophe", "Exploit vs explore limiting utilities in the catastrophe games");
  catastrophe->add_option("--M", cat.m, "Payoff scale M > 0");
  catastrophe->add_option("--kind", cat.kind, "loss or gain")->check(CLI::IsMember({"loss", "gain"}));
  catastrophe->add_option("--peak-over-fold", cat.peak_over_fold, "Peak exploration as a multiple of the fold delta");

  auto* list = app.add_subcommand("list-games", "List builtin games");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(g, sim);
    if (qre_cmd->parsed()) return run_qre(g, qre);
    if (surface->parsed()) return run_surface(g, surf);
    if (project->parsed()) return run_project(g, proj);
    if (regret_cmd->parsed()) return run_regret(g, reg);
    if (catastrophe->parsed()) return run_catastrophe_cmd(g, cat);
    if (list->parsed()) return run_list(g);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure at t=" << e.time() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
