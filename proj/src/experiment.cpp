#include "smoothq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "smoothq/csv.hpp"
#include "smoothq/errors.hpp"
#include "smoothq/game_io.hpp"
#include "smoothq/metrics.hpp"
#include "smoothq/projection.hpp"
#include "smoothq/qre.hpp"
#include "smoothq/surface.hpp"

namespace smoothq {

namespace {

using nlohmann::json;

json profile_json(const Profile& x) { return json(x); }

Profile two_action_profile(const std::vector<double>& a1) {
  Profile x;
  for (double p : a1) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("action-1 probabilities must lie in (0, 1)");
    x.push_back({p, 1.0 - p});
  }
  return x;
}

bool all_two_actions(const NormalFormGame& game) {
  return std::all_of(game.action_counts().begin(), game.action_counts().end(),
                     [](std::size_t n) { return n == 2; });
}

std::vector<Profile> resolve_starts(const NormalFormGame& game, const json& spec) {
  const std::string kind = spec.value("kind", std::string("lattice"));
  if (kind == "lattice") {
    return lattice_starts(game, spec.value("size", std::size_t{3}), spec.value("lo", 0.05),
                          spec.value("hi", 0.95));
  }
  if (kind == "pure") return pure_starts(game, spec.value("epsilon", 0.05));
  if (kind == "uniform") return {uniform_profile(game.action_counts())};
  if (kind == "point") {
    Profile x;
    if (spec.contains("profile")) {
      x = spec.at("profile").get<Profile>();
    } else if (spec.contains("a1")) {
      if (!all_two_actions(game)) throw ConfigError("initial 'a1' needs two actions per player");
      x = two_action_profile(spec.at("a1").get<std::vector<double>>());
    } else {
      throw ConfigError("initial point needs 'profile' or 'a1'");
    }
    game.check_profile(x);
    return {x};
  }
  throw ConfigError("unknown initial condition kind '" + kind + "'");
}

std::string numbered(const char* stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu.csv", stem, i);
  return buf;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, count));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const NumericalError& e) {
      throw NumericalError("start " + std::to_string(i) + ": " + e.what(), e.time());
    } catch (const ConfigError& e) {
      throw ConfigError("start " + std::to_string(i) + ": " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("start " + std::to_string(i) + ": " + e.what());
    }
  }
}

json stats_json(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {{"mean", mean},
          {"std", std::sqrt(var)},
          {"min", *std::min_element(v.begin(), v.end())},
          {"max", *std::max_element(v.begin(), v.end())}};
}

std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::pair<double, double> range_of(const json& j, const char* key, std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError(std::string(key) + " must be [lo, hi]");
  return {v[0], v[1]};
}

}  // namespace

NormalFormGame resolve_game(const json& ref, std::uint64_t seed, const std::filesystem::path& base_dir) {
  auto resolve_path = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  if (ref.is_string()) {
    const auto name = ref.get<std::string>();
    const auto names = builtin_game_names();
    if (std::find(names.begin(), names.end(), name) != names.end()) return builtin_game(name);
    if (std::filesystem::exists(resolve_path(name))) return load_game_file(resolve_path(name));
    throw ConfigError("'" + name + "' is neither a builtin game nor a readable game file");
  }
  if (!ref.is_object()) throw ConfigError("game must be a name or an object");
  if (ref.contains("file")) return load_game_file(resolve_path(ref.at("file").get<std::string>()));
  if (ref.contains("catastrophe")) {
    const auto& c = ref.at("catastrophe");
    return catastrophe_game(c.at("M").get<double>(), parse_catastrophe_kind(c.value("kind", std::string("loss"))));
  }
  if (ref.contains("diagonal")) return diagonal_game(ref.at("diagonal").get<std::vector<double>>());
  if (ref.contains("random_potential")) {
    const auto& r = ref.at("random_potential");
    return random_potential_game(r.at("n").get<std::size_t>(), r.at("m").get<std::size_t>(),
                                 r.value("seed", seed), r.value("lo", 0.0), r.value("hi", 1.0));
  }
  return game_from_json(ref);
}

std::vector<Profile> pure_starts(const NormalFormGame& game, double eps) {
  const auto& counts = game.action_counts();
  for (std::size_t n : counts) {
    if (!(eps > 0.0) || !(static_cast<double>(n - 1) * eps < 1.0)) {
      throw ConfigError("pure starts: epsilon must leave positive mass on the chosen action");
    }
  }
  std::vector<Profile> out;
  std::vector<std::size_t> a(counts.size(), 0);
  for (std::size_t joint = 0; joint < game.num_profiles(); ++joint) {
    Profile x;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      MixedStrategy xk(counts[k], eps);
      xk[a[k]] = 1.0 - static_cast<double>(counts[k] - 1) * eps;
      x.push_back(std::move(xk));
    }
    out.push_back(std::move(x));
    for (std::size_t k = counts.size(); k-- > 0;) {
      if (++a[k] < counts[k]) break;
      a[k] = 0;
    }
  }
  return out;
}

std::vector<Profile> lattice_starts(const NormalFormGame& game, std::size_t size, double lo, double hi) {
  if (!all_two_actions(game)) throw ConfigError("lattice starts need two actions per player");
  if (size == 0) throw ConfigError("lattice size must be positive");
  const auto values = grid(lo, hi, size);
  const std::size_t players = game.num_players();
  std::vector<Profile> out;
  std::vector<std::size_t> idx(players, 0);
  while (true) {
    std::vector<double> a1;
    for (std::size_t k = 0; k < players; ++k) a1.push_back(values[idx[k]]);
    out.push_back(two_action_profile(a1));
    std::size_t k = players;
    while (k-- > 0) {
      if (++idx[k] < size) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c;
  c.base_dir = base_dir;
  try {
    if (j.contains("game")) c.game_ref = j.at("game");
    c.seed = j.value("seed", std::uint64_t{0});
    c.threads = j.value("threads", 0u);
    if (!j.contains("schedules") || !j.at("schedules").is_array()) {
      throw ConfigError("experiment config needs a 'schedules' array (one per player)");
    }
    for (const auto& s : j.at("schedules")) c.schedules.push_back(schedule_from_json(s));
    if (j.contains("engine")) {
      const auto& e = j.at("engine");
      const std::string kind = e.value("kind", std::string("continuous"));
      if (kind == "continuous") {
        c.engine.kind = EngineKind::continuous;
      } else if (kind == "discrete") {
        c.engine.kind = EngineKind::discrete;
      } else {
        throw ConfigError("engine kind must be 'continuous' or 'discrete'");
      }
      c.engine.t_end = e.value("t_end", c.engine.t_end);
      c.engine.integrate.step = e.value("step", c.engine.integrate.step);
      c.engine.integrate.record_every = e.value("record_every", std::size_t{1});
      c.engine.epochs = e.value("epochs", c.engine.epochs);
      c.engine.discrete.interactions = e.value("interactions", c.engine.discrete.interactions);
      c.engine.discrete.mode = parse_batch_mode(e.value("mode", std::string("exact_eq8")));
      c.engine.discrete.record_every = e.value("record_every", std::size_t{1});
    }
    if (j.contains("initial")) c.initial = j.at("initial");
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      c.trajectory_output = o.value("trajectory", std::string("all"));
      if (c.trajectory_output != "all" && c.trajectory_output != "first" && c.trajectory_output != "none") {
        throw ConfigError("outputs.trajectory must be all, first or none");
      }
      c.regret = o.value("regret", false);
      if (o.contains("surface")) c.surface = o.at("surface");
      if (o.contains("projection")) c.projection = o.at("projection");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return c;
}

json experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  j["game"] = c.game_ref;
  j["seed"] = c.seed;
  j["schedules"] = json::array();
  for (const auto& s : c.schedules) j["schedules"].push_back(schedule_to_json(s));
  if (c.engine.kind == EngineKind::continuous) {
    j["engine"] = {{"kind", "continuous"},
                   {"t_end", c.engine.t_end},
                   {"step", c.engine.integrate.step},
                   {"record_every", c.engine.integrate.record_every}};
  } else {
    j["engine"] = {{"kind", "discrete"},
                   {"epochs", c.engine.epochs},
                   {"interactions", c.engine.discrete.interactions},
                   {"mode", to_string(c.engine.discrete.mode)},
                   {"record_every", c.engine.discrete.record_every}};
  }
  j["initial"] = c.initial;
  j["outputs"] = {{"trajectory", c.trajectory_output}, {"regret", c.regret}};
  if (c.surface) j["outputs"]["surface"] = *c.surface;
  if (c.projection) j["outputs"]["projection"] = *c.projection;
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& out_dir) {
  const NormalFormGame game = resolve_game(config.game_ref, config.seed, config.base_dir);
  if (config.schedules.size() != game.num_players()) {
    throw ConfigError("experiment needs one schedule per player (" + std::to_string(game.num_players()) + ")");
  }
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    if (ec || !std::filesystem::is_directory(*out_dir)) {
      throw ConfigError("cannot create output directory " + out_dir->string());
    }
  }

  ExperimentResult result;
  result.starts = resolve_starts(game, config.initial);
  const std::size_t count = result.starts.size();
  result.endpoints.resize(count);
  result.final_utilities.resize(count);
  std::vector<double> potentials(count, 0.0);
  std::vector<std::vector<std::string>> files(count);

  parallel_for(count, config.threads, [&](std::size_t i) {
    Trajectory traj = config.engine.kind == EngineKind::continuous
                          ? integrate_sql(game, config.schedules, result.starts[i], config.engine.t_end,
                                          config.engine.integrate)
                          : simulate_discrete(game, config.schedules, result.starts[i], config.engine.epochs,
                                              config.engine.discrete);
    result.endpoints[i] = traj.profiles.back();
    result.final_utilities[i] = traj.utilities.back();
    if (game.potential()) potentials[i] = multilinear_potential(game, *game.potential(), traj.profiles.back());
    if (!out_dir) return;
    const bool keep = config.trajectory_output == "all" || (config.trajectory_output == "first" && i == 0);
    if (keep) {
      const auto name = numbered("trajectory", i);
      write_file(*out_dir / name, [&](std::ostream& out) { write_trajectory_csv(out, traj); });
      files[i].push_back(name);
    }
    if (config.regret) {
      const auto name = numbered("regret", i);
      const auto reports = regret_all(traj, game);
      write_file(*out_dir / name, [&](std::ostream& out) { write_regret_csv(out, reports); });
      files[i].push_back(name);
    }
  });
  if (game.potential()) result.final_potential = potentials;
  for (const auto& f : files) result.files.insert(result.files.end(), f.begin(), f.end());

  json summary;
  summary["config"] = experiment_config_to_json(config);
  summary["game"] = {{"players", game.num_players()},
                     {"actions", game.action_counts()},
                     {"has_potential", game.potential().has_value()}};
  summary["runs"] = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    json run = {{"start", profile_json(result.starts[i])},
                {"endpoint", profile_json(result.endpoints[i])},
                {"utilities", result.final_utilities[i]}};
    if (game.potential()) run["potential"] = potentials[i];
    summary["runs"].push_back(std::move(run));
  }
  double spread = 0.0;
  for (const auto& e : result.endpoints) spread = std::max(spread, max_abs_diff(e, result.endpoints.front()));
  summary["endpoint_spread"] = spread;
  summary["final_potential"] = stats_json(result.final_potential);

  if (config.surface) {
    const auto& s = *config.surface;
    SweepOptions options;
    options.threads = config.threads;
    options.stability = s.value("stability", false);
    const auto scan = sweep_surface(game, range_of(s, "delta_x", {0.05, 5.0}), range_of(s, "delta_y", {0.05, 5.0}),
                                    s.value("resolution", std::size_t{200}), options);
    const auto folds = detect_folds(scan);
    json comps = json::array();
    for (const auto& c : folds.components) {
      comps.push_back({{"id", c.id}, {"type", c.type}, {"points", c.polyline.size()}});
    }
    summary["surface"] = {{"fold_components", folds.components.size()},
                          {"components", comps},
                          {"warnings", folds.warnings}};
    if (out_dir) {
      write_file(*out_dir / "surface.csv", [&](std::ostream& out) { write_surface_csv(out, scan); });
      write_file(*out_dir / "folds.csv", [&](std::ostream& out) { write_folds_csv(out, folds); });
      result.files.push_back("surface.csv");
      result.files.push_back("folds.csv");
    }
  }

  if (config.projection) {
    if (!game.potential()) throw ConfigError("projection needs a game with a potential");
    const auto& p = *config.projection;
    ProjectionSpec spec;
    spec.seed = p.value("seed", config.seed);
    spec.delta = p.value("delta", 0.0);
    const auto [lo, hi] = range_of(p, "range", {-5.0, 5.0});
    const auto res = p.value("resolution", std::size_t{41});
    spec.alphas = grid(lo, hi, res);
    spec.betas = grid(lo, hi, res);
    if (p.contains("u")) spec.u = p.at("u").get<std::vector<double>>();
    if (p.contains("v")) spec.v = p.at("v").get<std::vector<double>>();
    const auto points = project_potential(game, *game.potential(), spec);
    summary["projection"] = {{"points", points.size()}, {"delta", spec.delta}, {"seed", spec.seed}};
    if (out_dir) {
      write_file(*out_dir / "projection.csv", [&](std::ostream& out) { write_projection_csv(out, points); });
      result.files.push_back("projection.csv");
    }
  }

  summary["files"] = result.files;
  if (out_dir) {
    write_file(*out_dir / "summary.json", [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
  }
  result.summary = std::move(summary);
  return result;
}

std::optional<double> symmetric_fold_delta(const NormalFormGame& game, double lo, double hi, double tol) {
  const CoordinationFacts facts = classify_coordination(game);
  auto count = [&](double d) { return qre_2x2_roots(facts, d, d).size(); };
  if (count(lo) < 3) return std::nullopt;
  if (count(hi) >= 3) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) >= 3 ? lo : hi) = mid;
  }
  return hi;
}

CatastropheOutcome run_catastrophe(double m, CatastropheKind kind, const CatastropheOptions& options) {
  CatastropheOutcome out;
  out.m = m;
  out.kind = kind;
  const NormalFormGame game = catastrophe_game(m, kind);
  const auto fold = symmetric_fold_delta(game);
  if (!fold) throw NumericalError("catastrophe game has no symmetric fold", 0.0);
  out.fold_delta = *fold;
  out.delta_peak = options.peak_over_fold * out.fold_delta;

  const double a1 = kind == CatastropheKind::loss ? 0.9 : 0.1;
  out.start = {{a1, 1.0 - a1}, {a1, 1.0 - a1}};
  const double horizon = options.t_end + options.tail;
  IntegrateOptions integrate;
  integrate.step = options.step;
  integrate.record_every = options.record_every;

  const std::vector<ExplorationSchedule> exploit(2, make_constant(0.0, options.beta));
  const std::vector<ExplorationSchedule> explore(
      2, make_clr1(0.0, out.delta_peak, options.t_peak, options.t_end, RampShape::linear, options.beta));
  out.exploit_trajectory = integrate_sql(game, exploit, out.start, horizon, integrate);
  out.explore_trajectory = integrate_sql(game, explore, out.start, horizon, integrate);
  out.exploit_end = out.exploit_trajectory.profiles.back();
  out.explore_end = out.explore_trajectory.profiles.back();
  out.exploit_utility = out.exploit_trajectory.utilities.back()[0];
  out.explore_utility = out.explore_trajectory.utilities.back()[0];
  out.ratio = kind == CatastropheKind::loss ? out.exploit_utility / out.explore_utility
                                            : out.explore_utility / out.exploit_utility;
  return out;
}

json catastrophe_to_json(const CatastropheOutcome& o) {
  return {{"M", o.m},
          {"kind", o.kind == CatastropheKind::loss ? "loss" : "gain"},
          {"fold_delta", o.fold_delta},
          {"delta_peak", o.delta_peak},
          {"start", o.start},
          {"exploit_endpoint", o.exploit_end},
          {"explore_endpoint", o.explore_end},
          {"exploit_utility", o.exploit_utility},
          {"explore_utility", o.explore_utility},
          {"ratio", o.ratio}};
}

}  // namespace smoothq
