#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "smoothq/game.hpp"
#include "smoothq/qre.hpp"

namespace smoothq {

/// QRE of a 2x2 game on a rectangular (delta_x, delta_y) grid. Grid point
/// (i, j) has delta_x[i], delta_y[j] and is stored at j * nx + i.
struct SurfaceScan {
  std::vector<double> delta_x;
  std::vector<double> delta_y;
  std::vector<int> counts;
  std::vector<std::vector<QREPoint>> points;
  /// Grid points whose count differs from a 4-neighbor.
  std::vector<bool> fold_cells;

  std::size_t nx() const noexcept { return delta_x.size(); }
  std::size_t ny() const noexcept { return delta_y.size(); }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx() + i; }
};

struct SweepOptions {
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  bool stability = false;
  RootScanOptions roots;
};

/// resolution points per axis, evenly spaced and including both ends.
SurfaceScan sweep_surface(const NormalFormGame& game, std::pair<double, double> range_x,
                          std::pair<double, double> range_y, std::size_t resolution,
                          const SweepOptions& options = {});

struct FoldComponent {
  int id = 0;
  /// "upper" when the two largest-x equilibria merge across the boundary,
  /// "lower" when the two smallest do, "other" for any other count change.
  std::string type;
  /// Midpoints of the crossed grid edges, ordered along the boundary.
  std::vector<std::pair<double, double>> polyline;
};

struct FoldReport {
  std::vector<FoldComponent> components;
  std::vector<std::string> warnings;
};

/// Marching squares on the count field. Crossed grid edges are typed by
/// which pair of equilibria vanishes, and edges of the same type that share a
/// grid square form one component.
FoldReport detect_folds(const SurfaceScan& scan);

}  // namespace smoothq
