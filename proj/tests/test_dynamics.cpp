#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "smoothq/dynamics.hpp"
#include "smoothq/errors.hpp"
#include "smoothq/games.hpp"
#include "smoothq/qre.hpp"

using namespace smoothq;
using testing_support::zero_game;

namespace {

Profile random_interior(const std::vector<std::size_t>& counts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.02, 1.0);
  Profile x;
  for (auto n : counts) {
    std::vector<double> xk(n);
    double s = 0;
    for (auto& v : xk) s += (v = u(rng));
    for (auto& v : xk) v /= s;
    x.push_back(xk);
  }
  return x;
}

// Replicator-plus-entropy field for a bimatrix game written directly from
// the matrices, independent of the library's reward evaluation.
std::vector<double> direct_field_2x2(const NormalFormGame& g, double a1, double a2, double x, double y) {
  auto u = [&](std::size_t k, std::size_t i, std::size_t j) { return g.payoff(k, i * 2 + j); };
  const double r10 = u(0, 0, 0) * y + u(0, 0, 1) * (1 - y);
  const double r11 = u(0, 1, 0) * y + u(0, 1, 1) * (1 - y);
  const double r20 = u(1, 0, 0) * x + u(1, 1, 0) * (1 - x);
  const double r21 = u(1, 0, 1) * x + u(1, 1, 1) * (1 - x);
  const double hx = x * std::log(x) + (1 - x) * std::log(1 - x);
  const double hy = y * std::log(y) + (1 - y) * std::log(1 - y);
  const double dx = x * ((r10 - (x * r10 + (1 - x) * r11)) - a1 * (std::log(x) - hx));
  const double dy = y * ((r20 - (y * r20 + (1 - y) * r21)) - a2 * (std::log(y) - hy));
  return {dx, dy};
}

// Plain RK4 on (x, y) with a much finer step, used as an independent
// integrator for 2x2 games at constant parameters.
std::pair<double, double> fine_rk4_2x2(const NormalFormGame& g, double a, double x, double y, double t_end,
                                       double h) {
  const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
  for (std::size_t s = 0; s < steps; ++s) {
    const auto k1 = direct_field_2x2(g, a, a, x, y);
    const auto k2 = direct_field_2x2(g, a, a, x + h / 2 * k1[0], y + h / 2 * k1[1]);
    const auto k3 = direct_field_2x2(g, a, a, x + h / 2 * k2[0], y + h / 2 * k2[1]);
    const auto k4 = direct_field_2x2(g, a, a, x + h * k3[0], y + h * k3[1]);
    x += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    y += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return {x, y};
}

}  // namespace

TEST_CASE("sql_vector_field examples") {
  const auto sh = builtin_game("stag_hunt");
  const std::vector<AgentParams> replicator(2, AgentParams(0.0, 1.0));
  const Profile x = {{0.9, 0.1}, {0.9, 0.1}};
  const auto f = sql_vector_field(sh, replicator, x);
  const auto r = reward_vector(sh, x, 0);
  const double u1 = 0.9 * r[0] + 0.1 * r[1];
  CHECK(f[0][0] == doctest::Approx(0.9 * (r[0] - u1)));

  const auto z = zero_game({3, 4});
  const std::vector<AgentParams> p = {AgentParams(0.7, 2.0), AgentParams(0.2, 0.5)};
  for (const auto& fk : sql_vector_field(z, p, uniform_profile(z.action_counts()))) {
    for (double v : fk) CHECK(std::abs(v) < 1e-15);
  }

  CHECK_THROWS_AS(sql_vector_field(sh, replicator, {{1.0, 0.0}, {0.5, 0.5}}), DomainError);
}

TEST_CASE("property: field is tangent and equals the Lemma-1 form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.0, 0.95), ub(0.1, 3.0);
  for (int t = 0; t < 1000; ++t) {
    const auto g = random_game({2 + t % 3, 2 + (t / 3) % 3}, t, -2.0, 2.0);
    const auto x = random_interior(g.action_counts(), rng);
    const std::vector<AgentParams> p = {AgentParams(ua(rng), ub(rng)), AgentParams(ua(rng), ub(rng))};
    const auto f = sql_vector_field(g, p, x);
    for (std::size_t k = 0; k < 2; ++k) {
      double sum = 0;
      for (double v : f[k]) sum += v;
      CHECK(std::abs(sum) < 1e-12);
      const auto rh = modified_reward(g, x, p[k], k);
      const double avg = dot(x[k], rh);
      for (std::size_t i = 0; i < f[k].size(); ++i) {
        CHECK(std::abs(f[k][i] - x[k][i] * (rh[i] - avg)) < 1e-12);
      }
    }
  }
}

TEST_CASE("field matches a direct 2x2 formula") {
  const auto bos = builtin_game("battle_of_sexes");
  const std::vector<AgentParams> p(2, AgentParams(0.3, 1.0));
  for (double x : {0.1, 0.45, 0.8}) {
    for (double y : {0.2, 0.6, 0.95}) {
      const auto f = sql_vector_field(bos, p, {{x, 1 - x}, {y, 1 - y}});
      const auto d = direct_field_2x2(bos, 0.3, 0.3, x, y);
      CHECK(f[0][0] == doctest::Approx(d[0]).epsilon(1e-12));
      CHECK(f[1][0] == doctest::Approx(d[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: stationary iff QRE") {
  // QREs from the 2x2 root scan are stationary.
  const auto sh = builtin_game("stag_hunt");
  const auto facts = classify_coordination(sh);
  for (double d : {0.05, 0.3, 2.0}) {
    const std::vector<AgentParams> p(2, AgentParams::from_delta(d, 0.4));
    const std::vector<double> deltas = {d, d};
    for (const auto& q : qre_2x2_roots(facts, d, d)) {
      CHECK(qre_residual(sh, deltas, q.profile) < 1e-8);
      for (const auto& fk : sql_vector_field(sh, p, q.profile)) {
        for (double v : fk) CHECK(std::abs(v) < 1e-10);
      }
    }
  }
  // Random interior points are neither.
  std::mt19937_64 rng(4);
  const std::vector<AgentParams> p(2, AgentParams(0.3, 1.0));
  const std::vector<double> deltas = {0.3, 0.3};
  for (int t = 0; t < 100; ++t) {
    const auto x = random_interior({2, 2}, rng);
    double norm = 0;
    for (const auto& fk : sql_vector_field(sh, p, x)) {
      for (double v : fk) norm = std::max(norm, std::abs(v));
    }
    CHECK((norm < 1e-10) == (qre_residual(sh, deltas, x) < 1e-8));
  }
}

TEST_CASE("integrate_sql from a QRE is stationary") {
  const auto bos = builtin_game("battle_of_sexes");
  const auto roots = qre_2x2_roots(classify_coordination(bos), 0.4, 0.4);
  const std::vector<ExplorationSchedule> s(2, make_constant(0.4, 1.0));
  for (const auto& q : roots) {
    const auto traj = integrate_sql(bos, s, q.profile, 10.0);
    double drift = 0;
    for (const auto& x : traj.profiles) drift = std::max(drift, max_abs_diff(x, q.profile));
    CHECK(drift < 1e-8);
  }
}

TEST_CASE("integrate_sql agrees with a fine independent integrator") {
  const auto sh = builtin_game("stag_hunt");
  const std::vector<ExplorationSchedule> s(2, make_constant(0.01, 1.0));
  const auto traj = integrate_sql(sh, s, {{0.9, 0.1}, {0.9, 0.1}}, 30.0);
  const auto [x, y] = fine_rk4_2x2(sh, 0.01, 0.9, 0.9, 30.0, 1e-3);
  CHECK(traj.profiles.back()[0][0] == doctest::Approx(x).epsilon(1e-7));
  CHECK(traj.profiles.back()[1][0] == doctest::Approx(y).epsilon(1e-7));

  const auto long_run = integrate_sql(sh, s, {{0.9, 0.1}, {0.9, 0.1}}, 200.0);
  CHECK(long_run.profiles.back()[0][0] > 0.99);
  CHECK(long_run.profiles.back()[1][0] > 0.99);
}

TEST_CASE("CLR-1 spike above the fold moves Stag Hunt to the risk-dominant corner") {
  const auto sh = builtin_game("stag_hunt");
  const std::vector<ExplorationSchedule> s(2, make_clr1(0.01, 3.0, 300.0, 600.0, RampShape::linear, 0.2));
  IntegrateOptions opt;
  opt.step = 0.05;
  opt.record_every = 50;
  const auto traj = integrate_sql(sh, s, {{0.9, 0.1}, {0.9, 0.1}}, 900.0, opt);
  CHECK(traj.profiles.back()[0][0] < 0.01);
  CHECK(traj.profiles.back()[1][0] < 0.01);
  CHECK(traj.times.back() == doctest::Approx(900.0));
}

TEST_CASE("property: simplex preserved along both engines") {
  const auto g = random_potential_game(5, 4, 8, 0.0, 3.0);
  const std::vector<ExplorationSchedule> s = {make_ete(0.8, 20.0, RampShape::linear, 0.5),
                                              make_clr1(0.0, 0.9, 10.0, 25.0, RampShape::quadratic, 1.0)};
  std::mt19937_64 rng(1);
  const auto x0 = random_interior(g.action_counts(), rng);
  DiscreteOptions dopt;
  dopt.interactions = 50;
  for (const auto& traj : {integrate_sql(g, s, x0, 40.0), simulate_discrete(g, s, x0, 60, dopt)}) {
    for (const auto& x : traj.profiles) {
      for (const auto& xk : x) {
        double sum = 0;
        for (double v : xk) {
          CHECK(v > 0.0);
          sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-10);
      }
    }
    CHECK(traj.phi_h.size() == traj.size());
    CHECK(traj.utilities.size() == traj.size());
    CHECK(traj.schedule_values.size() == traj.size());
  }
}

TEST_CASE("integrate_sql reports blow-up with a time stamp") {
  const auto g = testing_support::bimatrix(2, 2, {1e12, 0, 0, 1}, {1e12, 0, 0, 1});
  const std::vector<ExplorationSchedule> s(2, make_constant(0.0, 1.0));
  IntegrateOptions opt;
  opt.max_halvings = 2;
  try {
    integrate_sql(g, s, {{0.5, 0.5}, {0.5, 0.5}}, 1.0, opt);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.time() >= 0.0);
    CHECK(e.time() < 1.0);
  }
  CHECK_THROWS_AS(integrate_sql(g, s, {{1.0, 0.0}, {0.5, 0.5}}, 1.0), DomainError);
}

TEST_CASE("q_update_step") {
  const QValueState q = {{0.0, 0.0}, {0.0, 0.0}};
  CHECK(q_update_step(q, 0, 1, 5.0, 0.0) == q);
  auto s = q_update_step(q, 1, 0, 1.0, 0.5);
  CHECK(s[1][0] == 0.5);
  CHECK(s[0] == std::vector<double>{0.0, 0.0});
  CHECK(s[1][1] == 0.0);
  s = q_update_step(q_update_step(s, 1, 0, 1.0, 0.5), 1, 0, 1.0, 0.5);
  CHECK(s[1][0] == 0.875);
  CHECK_THROWS_AS(q_update_step(q, 0, 0, 1.0, 1.0), ConfigError);
}

TEST_CASE("boltzmann_distribution") {
  const std::vector<double> q = {3.0, -1.0, 7.0};
  for (double v : boltzmann_distribution(q, 0.0)) CHECK(v == doctest::Approx(1.0 / 3.0));
  const std::vector<double> l2 = {std::log(2.0), 0.0};
  const auto b = boltzmann_distribution(l2, 1.0);
  CHECK(b[0] == doctest::Approx(2.0 / 3.0));
  CHECK(b[1] == doctest::Approx(1.0 / 3.0));
  const std::vector<double> big = {1000.0, 0.0};
  const auto c = boltzmann_distribution(big, 1.0);
  CHECK(std::abs(c[0] - 1.0) < 1e-12);
  CHECK(std::isfinite(c[1]));
  CHECK_THROWS_AS(boltzmann_distribution(q, -1.0), ConfigError);
}

TEST_CASE("property: Boltzmann shift invariance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> q(4), shifted(4);
    const double c = nd(rng) * 100;
    for (std::size_t i = 0; i < 4; ++i) {
      q[i] = nd(rng);
      shifted[i] = q[i] + c;
    }
    const auto a = boltzmann_distribution(q, 1.7);
    const auto b = boltzmann_distribution(shifted, 1.7);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    CHECK(std::max_element(a.begin(), a.end()) - a.begin() == std::max_element(q.begin(), q.end()) - q.begin());
  }
}

TEST_CASE("batch_q_update") {
  CHECK(batch_q_update(0.0, 1.0, 0.5, 2, BatchMode::exact_eq8) == doctest::Approx(0.75));
  CHECK(batch_q_update(0.0, 1.0, 0.5, 2, BatchMode::paper_eq12) == doctest::Approx(1.75));
  // alpha = 0: exact keeps q, the literal formula accumulates rewards.
  CHECK(batch_q_update(2.0, 1.0, 0.0, 5, BatchMode::exact_eq8) == 2.0);
  CHECK(batch_q_update(2.0, 1.0, 0.0, 5, BatchMode::paper_eq12) == doctest::Approx(2.0 + 6.0));
  // alpha -> 1 forgets the past.
  CHECK(batch_q_update(9.0, 1.5, 1.0 - 1e-12, 3, BatchMode::exact_eq8) == doctest::Approx(1.5));
  CHECK(batch_q_update(9.0, 1.5, 1.0 - 1e-12, 3, BatchMode::paper_eq12) == doctest::Approx(1.5));
  CHECK(parse_batch_mode("paper_eq12") == BatchMode::paper_eq12);
  CHECK_THROWS_AS(parse_batch_mode("eq13"), ConfigError);
}

TEST_CASE("property: exact batch equals stepwise unroll") {
  for (int a10 = 1; a10 <= 9; ++a10) {
    const double alpha = a10 / 10.0;
    for (std::size_t n = 1; n <= 50; ++n) {
      QValueState q = {{-0.7}};
      for (std::size_t s = 0; s < n; ++s) q = q_update_step(q, 0, 0, 2.3, alpha);
      const double closed = batch_q_update(-0.7, 2.3, alpha, n, BatchMode::exact_eq8);
      CHECK(std::abs(closed - q[0][0]) <= 1e-10 * std::max(1.0, std::abs(q[0][0])));
    }
  }
}

TEST_CASE("interaction_counts") {
  const std::vector<double> x = {0.335, 0.333, 0.332};
  const auto n = interaction_counts(x, 10);
  CHECK(n[0] + n[1] + n[2] == 10);
  CHECK(n == std::vector<std::size_t>{4, 3, 3});
  const std::vector<double> y = {0.25, 0.75};
  CHECK(interaction_counts(y, 1000) == std::vector<std::size_t>{250, 750});
}

TEST_CASE("simulate_discrete compositions") {
  const auto z = zero_game({3, 2});
  const std::vector<ExplorationSchedule> s(2, make_constant(0.5, 1.0));
  const auto traj = simulate_discrete(z, s, uniform_profile(z.action_counts()), 100);
  for (const auto& x : traj.profiles) CHECK(max_abs_diff(x, uniform_profile(z.action_counts())) < 1e-15);

  // One epoch with M = 1 is one Q update of the most likely action plus Boltzmann.
  const auto sh = builtin_game("stag_hunt");
  const Profile x0 = {{0.7, 0.3}, {0.4, 0.6}};
  const double alpha = 0.25, beta = 2.0;
  const std::vector<ExplorationSchedule> s2(2, make_constant(alpha / beta, beta));
  DiscreteOptions opt;
  opt.interactions = 1;
  const auto one = simulate_discrete(sh, s2, x0, 1, opt);
  REQUIRE(one.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    QValueState q = {{std::log(x0[0][0]) / beta, std::log(x0[0][1]) / beta},
           {std::log(x0[1][0]) / beta, std::log(x0[1][1]) / beta}};
    const auto r = reward_vector(sh, x0, k);
    const std::size_t played = x0[k][0] > x0[k][1] ? 0 : 1;
    q = q_update_step(q, k, played, r[played], alpha);
    const auto expect = boltzmann_distribution(q[k], beta);
    CHECK(one.profiles[1][k][0] == doctest::Approx(expect[0]).epsilon(1e-12));
  }
}
