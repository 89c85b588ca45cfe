#include "smoothq/surface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "smoothq/errors.hpp"

namespace smoothq {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

void check_range(std::pair<double, double> range, const char* axis) {
  if (!(range.first > 0.0) || !(range.second >= range.first) || !std::isfinite(range.second)) {
    throw ConfigError(std::string("surface: ") + axis + " range must be positive and increasing");
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

double distance(const QREPoint& a, const QREPoint& b) {
  return std::abs(a.profile[0][0] - b.profile[0][0]) + std::abs(a.profile[1][0] - b.profile[1][0]);
}

// The surviving root sits next to the lowest (by x) root of the
// three-root side when the upper pair merged, and next to the highest when
// the lower pair merged.
std::string crossing_type(const std::vector<QREPoint>& a, const std::vector<QREPoint>& b) {
  const auto& three = a.size() > b.size() ? a : b;
  const auto& one = a.size() > b.size() ? b : a;
  if (three.size() != 3 || one.size() != 1) return "other";
  return distance(one[0], three.front()) < distance(one[0], three.back()) ? "upper" : "lower";
}

}  // namespace

SurfaceScan sweep_surface(const NormalFormGame& game, std::pair<double, double> range_x,
                          std::pair<double, double> range_y, std::size_t resolution,
                          const SweepOptions& options) {
  check_range(range_x, "delta_x");
  check_range(range_y, "delta_y");
  if (resolution < 2) throw ConfigError("surface: resolution must be at least 2");
  const CoordinationFacts facts = classify_coordination(game);

  SurfaceScan scan;
  scan.delta_x = linspace(range_x.first, range_x.second, resolution);
  scan.delta_y = linspace(range_y.first, range_y.second, resolution);
  const std::size_t nx = scan.nx(), ny = scan.ny();
  scan.counts.assign(nx * ny, 0);
  scan.points.assign(nx * ny, {});

  std::atomic<std::size_t> next_row{0};
  auto worker = [&]() {
    for (std::size_t j = next_row++; j < ny; j = next_row++) {
      for (std::size_t i = 0; i < nx; ++i) {
        const double dx = scan.delta_x[i], dy = scan.delta_y[j];
        auto roots = qre_2x2_roots(facts, dx, dy, options.roots);
        if (options.stability) {
          const double deltas[2] = {dx, dy};
          for (auto& p : roots) p.stability = stability_of(game, deltas, p);
        }
        scan.counts[scan.index(i, j)] = static_cast<int>(roots.size());
        scan.points[scan.index(i, j)] = std::move(roots);
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, ny));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  scan.fold_cells.assign(nx * ny, false);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const int c = scan.counts[scan.index(i, j)];
      const bool differs = (i > 0 && scan.counts[scan.index(i - 1, j)] != c) ||
                           (i + 1 < nx && scan.counts[scan.index(i + 1, j)] != c) ||
                           (j > 0 && scan.counts[scan.index(i, j - 1)] != c) ||
                           (j + 1 < ny && scan.counts[scan.index(i, j + 1)] != c);
      scan.fold_cells[scan.index(i, j)] = differs;
    }
  }
  return scan;
}

FoldReport detect_folds(const SurfaceScan& scan) {
  FoldReport report;
  const std::size_t nx = scan.nx(), ny = scan.ny();
  if (nx * ny < 2) return report;

  const std::size_t horizontal = ny * (nx - 1);
  const std::size_t total = horizontal + nx * (ny - 1);
  auto h_edge = [&](std::size_t i, std::size_t j) { return j * (nx - 1) + i; };
  auto v_edge = [&](std::size_t i, std::size_t j) { return horizontal + j * nx + i; };
  auto ends = [&](std::size_t e) {
    if (e < horizontal) {
      const std::size_t j = e / (nx - 1), i = e % (nx - 1);
      return std::pair{scan.index(i, j), scan.index(i + 1, j)};
    }
    const std::size_t f = e - horizontal;
    const std::size_t j = f / nx, i = f % nx;
    return std::pair{scan.index(i, j), scan.index(i, j + 1)};
  };
  auto midpoint = [&](std::size_t e) {
    if (e < horizontal) {
      const std::size_t j = e / (nx - 1), i = e % (nx - 1);
      return std::pair{0.5 * (scan.delta_x[i] + scan.delta_x[i + 1]), scan.delta_y[j]};
    }
    const std::size_t f = e - horizontal;
    const std::size_t j = f / nx, i = f % nx;
    return std::pair{scan.delta_x[i], 0.5 * (scan.delta_y[j] + scan.delta_y[j + 1])};
  };

  std::vector<std::string> type(total);
  std::size_t unusual = 0;
  for (int c : scan.counts) {
    if (c != 1 && c != 3) ++unusual;
  }
  for (std::size_t e = 0; e < total; ++e) {
    const auto [a, b] = ends(e);
    if (scan.counts[a] != scan.counts[b]) type[e] = crossing_type(scan.points[a], scan.points[b]);
  }

  DisjointSets sets(total);
  std::vector<std::vector<std::size_t>> adjacent(total);
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t square[4] = {h_edge(i, j), h_edge(i, j + 1), v_edge(i, j), v_edge(i + 1, j)};
      for (int p = 0; p < 4; ++p) {
        for (int q = p + 1; q < 4; ++q) {
          const std::size_t e = square[p], f = square[q];
          if (type[e].empty() || type[e] != type[f]) continue;
          sets.unite(e, f);
          adjacent[e].push_back(f);
          adjacent[f].push_back(e);
        }
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> members;
  std::vector<std::size_t> order;
  for (std::size_t e = 0; e < total; ++e) {
    if (type[e].empty()) continue;
    const std::size_t root = sets.find(e);
    if (!members.count(root)) order.push_back(root);
    members[root].push_back(e);
  }

  for (std::size_t root : order) {
    const auto& edges = members[root];
    FoldComponent comp;
    comp.id = static_cast<int>(report.components.size());
    comp.type = type[root];
    // Walk from an end of the chain when there is one.
    std::size_t start = edges.front();
    for (std::size_t e : edges) {
      if (adjacent[e].size() == 1) {
        start = e;
        break;
      }
    }
    std::vector<bool> seen(total, false);
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
      const std::size_t e = stack.back();
      stack.pop_back();
      if (seen[e]) continue;
      seen[e] = true;
      comp.polyline.push_back(midpoint(e));
      auto next = adjacent[e];
      std::sort(next.rbegin(), next.rend());
      for (std::size_t f : next) {
        if (!seen[f]) stack.push_back(f);
      }
    }
    if (edges.size() == 1) {
      report.warnings.push_back("fold component " + std::to_string(comp.id) +
                                " crosses a single grid edge; the resolution may be too coarse");
    }
    report.components.push_back(std::move(comp));
  }
  if (unusual > 0) {
    report.warnings.push_back(std::to_string(unusual) +
                              " grid points have a QRE count other than 1 or 3 (near-tangent roots)");
  }
  return report;
}

}  // namespace smoothq
