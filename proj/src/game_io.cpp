#include "smoothq/game_io.hpp"

#include <fstream>

#include "smoothq/errors.hpp"

namespace smoothq {

namespace {

std::vector<double> number_array(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

NormalFormGame game_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("game file must contain a JSON object");
  if (!j.contains("actions") || !j.at("actions").is_array()) {
    throw ConfigError("game file: 'actions' array is required");
  }
  std::vector<std::size_t> actions;
  for (const auto& n : j.at("actions")) {
    if (!n.is_number_integer() || n.get<long long>() <= 0) {
      throw ConfigError("game file: action counts must be positive integers");
    }
    actions.push_back(n.get<std::size_t>());
  }
  if (j.contains("players")) {
    if (!j.at("players").is_number_integer() || j.at("players").get<long long>() != static_cast<long long>(actions.size())) {
      throw ConfigError("game file: 'players' disagrees with the length of 'actions'");
    }
  }
  if (!j.contains("payoffs") || !j.at("payoffs").is_array()) {
    throw ConfigError("game file: 'payoffs' array is required");
  }
  std::vector<std::vector<double>> payoffs;
  for (std::size_t k = 0; k < j.at("payoffs").size(); ++k) {
    payoffs.push_back(number_array(j.at("payoffs")[k], "game file: payoffs[" + std::to_string(k) + "]"));
  }
  NormalFormGame game(std::move(actions), std::move(payoffs));
  if (j.contains("potential") && !j.at("potential").is_null()) {
    const auto& p = j.at("potential");
    if (!p.is_object() || !p.contains("phi") || !p.contains("weights")) {
      throw ConfigError("game file: 'potential' needs 'phi' and 'weights'");
    }
    game.set_potential({number_array(p.at("phi"), "game file: potential.phi"),
                        number_array(p.at("weights"), "game file: potential.weights")});
  }
  return game;
}

nlohmann::json game_to_json(const NormalFormGame& game) {
  nlohmann::json j;
  j["players"] = game.num_players();
  j["actions"] = game.action_counts();
  j["payoffs"] = nlohmann::json::array();
  for (std::size_t k = 0; k < game.num_players(); ++k) {
    const auto u = game.payoffs(k);
    j["payoffs"].push_back(std::vector<double>(u.begin(), u.end()));
  }
  if (game.potential()) {
    j["potential"] = {{"phi", game.potential()->phi}, {"weights", game.potential()->weights}};
  }
  return j;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

NormalFormGame load_game_file(const std::filesystem::path& path) {
  try {
    return game_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace smoothq
