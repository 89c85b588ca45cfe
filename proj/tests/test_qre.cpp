#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "smoothq/errors.hpp"
#include "smoothq/games.hpp"
#include "smoothq/qre.hpp"
#include "smoothq/surface.hpp"

using namespace smoothq;
using testing_support::bimatrix;
using testing_support::logistic;
using testing_support::zero_game;

namespace {

// Sign changes of x -> sigma(c1 (sigma(c2 (x - x_mix)) - y_mix)) - x on a
// uniform grid of (floor, 1 - floor) with both ends included.
int grid_root_count(const CoordinationFacts& f, double dx, double dy, std::size_t points = 100000) {
  // Scan in log-odds z = ln(x / (1 - x)); every root has |z| <= |c1|.
  const double c1 = f.k1 / dx, c2 = f.k2 / dy;
  auto g = [&](double z) { return c1 * (logistic(c2 * (logistic(z) - f.x_mix)) - f.y_mix) - z; };
  const double hi = std::abs(c1) + 1.0, lo = -hi;
  int changes = 0;
  double prev = g(lo);
  for (std::size_t i = 1; i < points; ++i) {
    const double z = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double cur = g(z);
    if ((prev < 0) != (cur < 0)) ++changes;
    prev = cur;
  }
  return changes;
}

NormalFormGame random_coordination(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> gap(0.1, 3.0), base(-2.0, 2.0);
  const double u21 = base(rng), u12 = base(rng), v21 = base(rng), v12 = base(rng);
  return bimatrix(2, 2, {u21 + gap(rng), u12, u21, u12 + gap(rng)}, {v21 + gap(rng), v21, v12, v12 + gap(rng)});
}

}  // namespace

TEST_CASE("qre_residual") {
  const auto z = zero_game({3, 2});
  const std::vector<double> d = {0.7, 2.0};
  CHECK(qre_residual(z, d, uniform_profile(z.action_counts())) == 0.0);

  const auto sh = builtin_game("stag_hunt");
  const std::vector<double> big = {1e6, 1e6};
  CHECK(qre_residual(sh, big, {{0.5, 0.5}, {0.5, 0.5}}) < 1e-5);

  const std::vector<double> small = {0.1, 0.1};
  const Profile x = {{0.9, 0.1}, {0.9, 0.1}};
  // Oracle: r_1 = (2.7, 1.95), softmax at rate 0.1.
  const double s = 1.0 / (1.0 + std::exp((1.95 - 2.7) / 0.1));
  CHECK(qre_residual(sh, small, x) == doctest::Approx(std::abs(0.9 - s)));
  CHECK(qre_residual(sh, small, x) > 0.0);
  const std::vector<double> bad = {0.0, 1.0};
  CHECK_THROWS_AS(qre_residual(sh, bad, x), ConfigError);
}

TEST_CASE("solve_qre examples") {
  const auto z = zero_game({3, 3});
  const std::vector<double> d = {0.5, 0.5};
  const auto q = solve_qre(z, d, {{0.8, 0.1, 0.1}, {0.2, 0.2, 0.6}});
  CHECK(max_abs_diff(q.profile, uniform_profile(z.action_counts())) < 1e-10);

  const auto sh = builtin_game("stag_hunt");
  const auto facts = classify_coordination(sh);
  const std::vector<double> high = {5.0, 5.0};
  const auto oracle = qre_2x2_roots(facts, 5.0, 5.0);
  REQUIRE(oracle.size() == 1);
  for (double seed : {0.01, 0.5, 0.99}) {
    const auto p = solve_qre(sh, high, {{seed, 1 - seed}, {seed, 1 - seed}});
    CHECK(std::abs(p.profile[0][0] - oracle[0].profile[0][0]) < 1e-8);
    CHECK(std::abs(p.profile[1][0] - oracle[0].profile[1][0]) < 1e-8);
    CHECK(p.residual < 1e-10);
  }

  const std::vector<double> low = {0.05, 0.05};
  const auto top = solve_qre(sh, low, {{0.99, 0.01}, {0.99, 0.01}});
  CHECK(top.profile[0][0] > facts.x_mix);
  CHECK(top.profile[1][0] > facts.y_mix);
  CHECK(region_check(facts, top.profile[0][0], top.profile[1][0]).allowed);

  QreOptions capped;
  capped.max_iterations = 2;
  try {
    solve_qre(sh, low, {{0.6, 0.4}, {0.6, 0.4}}, capped);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.time() == 2.0);
    CHECK(e.last_iterate().size() == 2);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("qre_2x2_roots examples") {
  const auto sh = classify_coordination(builtin_game("stag_hunt"));
  const auto three = qre_2x2_roots(sh, 0.05, 0.05);
  CHECK(three.size() == 3);
  CHECK(grid_root_count(sh, 0.05, 0.05) == 3);
  CHECK(qre_2x2_roots(sh, 5.0, 5.0).size() == 1);
  CHECK(grid_root_count(sh, 5.0, 5.0) == 1);
  for (std::size_t r = 1; r < three.size(); ++r) CHECK(three[r - 1].profile[0][0] < three[r].profile[0][0]);

  // Huge delta: the only root is near (1/2, 1/2).
  const auto flat = qre_2x2_roots(sh, 1e12, 1e12);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0].profile[0][0] == doctest::Approx(0.5));
  CHECK(flat[0].profile[1][0] == doctest::Approx(0.5));

  // Zero game: single uniform root even though k1 = k2 = 0.
  const auto zero = qre_2x2_roots(classify_coordination(zero_game({2, 2})), 0.3, 0.3);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].profile[0][0] == doctest::Approx(0.5));
}

TEST_CASE("property: root counts agree with the grid oracle and are odd") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ld(std::log(0.02), std::log(5.0));
  int agree = 0, total = 0;
  for (int g = 0; g < 200; ++g) {
    const auto facts = classify_coordination(random_coordination(rng));
    const double dx = std::exp(ld(rng)), dy = std::exp(ld(rng));
    const auto roots = qre_2x2_roots(facts, dx, dy);
    CHECK(roots.size() % 2 == 1);
    // A grid cannot see degenerate (tangent) roots.
    bool degenerate = false;
    for (const auto& r : roots) degenerate = degenerate || r.degenerate;
    if (degenerate) continue;
    ++total;
    // The grid can merge two roots closer than its spacing, so only
    // non-exceeding and matching-parity are required.
    const int grid = grid_root_count(facts, dx, dy);
    CHECK(grid <= static_cast<int>(roots.size()));
    CHECK(grid % 2 == 1);
    if (grid == static_cast<int>(roots.size())) ++agree;
  }
  CHECK(agree >= total * 98 / 100);
}

TEST_CASE("property: large delta converges to uniform") {
  std::mt19937_64 rng(8);
  for (int g = 0; g < 50; ++g) {
    const auto facts = classify_coordination(random_coordination(rng));
    const auto roots = qre_2x2_roots(facts, 1e4, 1e4);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0].profile[0][0] - 0.5) < 1e-3);
    CHECK(std::abs(roots[0].profile[1][0] - 0.5) < 1e-3);
  }
}

TEST_CASE("multistart solver matches the scalar reduction") {
  std::mt19937_64 rng(31);
  for (int g = 0; g < 15; ++g) {
    const auto game = random_coordination(rng);
    const auto facts = classify_coordination(game);
    for (double d : {0.05, 0.5}) {
      const std::vector<double> deltas = {d, d * 1.3};
      const auto a = solve_qre_multistart(game, deltas);
      const auto b = qre_2x2_roots(facts, deltas[0], deltas[1]);
      REQUIRE(a.size() == b.size());
      for (std::size_t r = 0; r < a.size(); ++r) {
        CHECK(std::abs(a[r].profile[0][0] - b[r].profile[0][0]) < 1e-8);
        CHECK(std::abs(a[r].profile[1][0] - b[r].profile[1][0]) < 1e-8);
      }
    }
  }
  // Larger game: every returned point is a QRE.
  const auto big = random_potential_game(4, 3, 2, 0.0, 2.0);
  const std::vector<double> deltas = {0.1, 0.2};
  const auto pts = solve_qre_multistart(big, deltas, 5);
  CHECK(!pts.empty());
  for (const auto& p : pts) CHECK(qre_residual(big, deltas, p.profile) < 1e-10);
}

TEST_CASE("region_check examples") {
  const auto sh = classify_coordination(builtin_game("stag_hunt"));
  const auto ll = region_check(sh, 0.3, 0.3);
  CHECK(ll.covered);
  CHECK(ll.allowed);
  CHECK(ll.region == "lower_left");
  CHECK(ll.locus_case == 1);
  CHECK_FALSE(region_check(sh, 0.55, 0.55).allowed);
  CHECK(region_check(sh, 0.7, 0.8).allowed);

  const auto bos = classify_coordination(builtin_game("battle_of_sexes"));
  const auto mid = region_check(bos, 0.6, 0.45);
  CHECK(mid.allowed);
  CHECK(mid.region == "middle");
  CHECK(mid.locus_case == 2);
  CHECK_FALSE(region_check(bos, 0.6, 0.55).allowed);

  // x_mix + y_mix < 1 is handled by relabeling.
  const auto flipped = classify_coordination(bimatrix(2, 2, {3, 0, 0, 1.5}, {3, 0, 0, 1.5}));
  CHECK(flipped.x_mix == doctest::Approx(1.0 / 3.0));
  CHECK(region_check(flipped, 0.7, 0.7).allowed);
  CHECK_FALSE(region_check(flipped, 0.45, 0.45).allowed);
}

TEST_CASE("property: every QRE of random coordination games lies in an allowed region") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ld(std::log(0.01), std::log(10.0));
  int violations = 0;
  for (int g = 0; g < 300; ++g) {
    const auto facts = classify_coordination(random_coordination(rng));
    for (int s = 0; s < 5; ++s) {
      for (const auto& q : qre_2x2_roots(facts, std::exp(ld(rng)), std::exp(ld(rng)))) {
        const auto rc = region_check(facts, q.profile[0][0], q.profile[1][0]);
        if (rc.covered && !rc.allowed) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("stability_of") {
  const auto sh = builtin_game("stag_hunt");
  const auto facts = classify_coordination(sh);
  const std::vector<double> low = {0.05, 0.05};
  const auto roots = qre_2x2_roots(facts, 0.05, 0.05);
  REQUIRE(roots.size() == 3);
  CHECK(stability_of(sh, low, roots[0]) == Stability::stable);
  CHECK(stability_of(sh, low, roots[1]) == Stability::unstable);
  CHECK(stability_of(sh, low, roots[2]) == Stability::stable);

  const std::vector<double> high = {4.0, 4.0};
  const auto unique = qre_2x2_roots(facts, 4.0, 4.0);
  CHECK(stability_of(sh, high, unique[0]) == Stability::stable);

  const auto z = zero_game({3, 2});
  const std::vector<double> d = {0.2, 0.9};
  QREPoint u;
  u.profile = uniform_profile(z.action_counts());
  u.deltas = d;
  CHECK(stability_of(z, d, u) == Stability::stable);
}

TEST_CASE("sweep_surface and detect_folds") {
  const auto z = builtin_game("stag_hunt");
  const auto zero = zero_game({2, 2});
  const auto flat = sweep_surface(zero, {0.05, 5.0}, {0.05, 5.0}, 20);
  for (int c : flat.counts) CHECK(c == 1);
  const auto none = detect_folds(flat);
  CHECK(none.components.empty());
  CHECK(none.warnings.empty());

  const auto scan = sweep_surface(z, {0.01, 5.0}, {0.01, 5.0}, 60);
  CHECK(scan.counts[scan.index(0, 0)] == 3);
  CHECK(scan.counts[scan.index(59, 59)] == 1);
  for (std::size_t c = 0; c < scan.counts.size(); ++c) {
    CHECK((scan.counts[c] == 1 || scan.counts[c] == 3));
    CHECK(scan.points[c].size() == static_cast<std::size_t>(scan.counts[c]));
  }
  const auto folds = detect_folds(scan);
  CHECK(folds.components.size() == 1);

  // Sweeps are deterministic regardless of thread count.
  SweepOptions one;
  one.threads = 1;
  SweepOptions four;
  four.threads = 4;
  const auto a = sweep_surface(z, {0.05, 2.0}, {0.05, 2.0}, 25, one);
  const auto b = sweep_surface(z, {0.05, 2.0}, {0.05, 2.0}, 25, four);
  CHECK(a.counts == b.counts);
  for (std::size_t c = 0; c < a.points.size(); ++c) {
    for (std::size_t r = 0; r < a.points[c].size(); ++r) {
      CHECK(a.points[c][r].profile == b.points[c][r].profile);
    }
  }
}

TEST_CASE("single-edge fold components raise a warning") {
  SurfaceScan scan;
  scan.delta_x = {1.0, 2.0};
  scan.delta_y = {1.0};
  scan.counts = {3, 1};
  auto point = [](double x) {
    QREPoint p;
    p.profile = {{x, 1 - x}, {x, 1 - x}};
    return p;
  };
  scan.points = {{point(0.1), point(0.5), point(0.9)}, {point(0.12)}};
  scan.fold_cells = {true, true};
  const auto report = detect_folds(scan);
  REQUIRE(report.components.size() == 1);
  CHECK(report.components[0].type == "upper");
  CHECK(report.components[0].polyline.size() == 1);
  CHECK(report.warnings.size() == 1);
}
