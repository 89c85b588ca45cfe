#pragma once

#include <filesystem>

#include "json.hpp"
#include "smoothq/game.hpp"

namespace smoothq {

/// {"players": N, "actions": [n_1..n_N], "payoffs": [[flat row-major tensor] per player],
///  "potential": {"phi": [...], "weights": [...]}}; "potential" is optional.
NormalFormGame game_from_json(const nlohmann::json& j);
nlohmann::json game_to_json(const NormalFormGame& game);

NormalFormGame load_game_file(const std::filesystem::path& path);

/// Parses a JSON file, turning I/O and syntax failures into ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace smoothq
