#include <cmath>

#include "doctest.h"
#include "smoothq/errors.hpp"
#include "smoothq/schedule.hpp"

using namespace smoothq;

TEST_CASE("ETE endpoints and midpoint") {
  const auto s = make_ete(1.0, 10.0, RampShape::linear, 0.5);
  CHECK(eval_schedule(s, 0).delta == 1.0);
  CHECK(eval_schedule(s, 5).delta == doctest::Approx(0.5));
  CHECK(eval_schedule(s, 10).delta == 0.0);
  CHECK(eval_schedule(s, 1e6).delta == 0.0);
  const auto v = eval_schedule(s, 2.5);
  CHECK(v.beta == 0.5);
  CHECK(v.alpha / v.beta == doctest::Approx(v.delta));

  const auto zero = make_ete(0.0, 100.0);
  for (double t : {0.0, 1.0, 50.0, 200.0}) CHECK(eval_schedule(zero, t).delta == 0.0);
}

TEST_CASE("CLR1 shape") {
  const auto s = make_clr1(0.0, 2.0, 5.0, 10.0, RampShape::linear, 0.4);
  CHECK(eval_schedule(s, 0).delta == 0.0);
  CHECK(eval_schedule(s, 5).delta == doctest::Approx(2.0));
  CHECK(eval_schedule(s, 10).delta == 0.0);
  CHECK(eval_schedule(s, 7.5).delta == doctest::Approx(1.0));

  const auto q = make_clr1(0.0, 2.0, 5.0, 10.0, RampShape::quadratic, 0.4);
  CHECK(eval_schedule(q, 2.5).delta == doctest::Approx(2.0 * 0.25));

  const auto flat = make_clr1(0.3, 0.3, 5.0, 10.0);
  CHECK(eval_schedule(flat, 0).delta == doctest::Approx(0.3));
  CHECK(eval_schedule(flat, 4).delta == doctest::Approx(0.3));
  CHECK(eval_schedule(flat, 10).delta == 0.0);

  const auto delayed = make_clr1(0.1, 3.0, 300.0, 500.0, RampShape::linear, 0.2, 100.0);
  CHECK(eval_schedule(delayed, 50).delta == doctest::Approx(0.1));
  CHECK(eval_schedule(delayed, 200).delta == doctest::Approx(0.1 + 2.9 * 0.5));
}

TEST_CASE("constant schedule") {
  const auto s = make_constant(0.3, 2.0);
  for (double t : {0.0, 3.0, 1e9}) {
    const auto v = eval_schedule(s, t);
    CHECK(v.delta == doctest::Approx(0.3));
    CHECK(v.alpha / v.beta == doctest::Approx(0.3));
  }
  CHECK(s.is_constant());
  CHECK_FALSE(make_ete(1.0, 5.0, RampShape::linear, 0.5).is_constant());
}

TEST_CASE("property: monotone segments and eventual zero") {
  for (auto shape : {RampShape::linear, RampShape::quadratic}) {
    const auto ete = make_ete(0.9, 40.0, shape);
    const auto clr = make_clr1(0.1, 0.9, 15.0, 40.0, shape, 1.0, 5.0);
    double prev_ete = eval_schedule(ete, 0).delta;
    double prev_clr = eval_schedule(clr, 0).delta;
    for (int step = 1; step < 1200; ++step) {
      const double t = step / 20.0;
      const double e = eval_schedule(ete, t).delta;
      const double c = eval_schedule(clr, t).delta;
      CHECK(e >= 0.0);
      CHECK(e <= prev_ete + 1e-15);
      if (t <= 15.0) CHECK(c >= prev_clr - 1e-15);
      else CHECK(c <= prev_clr + 1e-15);
      if (t >= 40.0) {
        CHECK(e == 0.0);
        CHECK(c == 0.0);
      }
      prev_ete = e;
      prev_clr = c;
    }
    CHECK(clr.max_delta() == doctest::Approx(0.9));
  }
}

TEST_CASE("piecewise knots") {
  const auto s = make_piecewise({{0.0, 0.2}, {10.0, 0.6}, {20.0, 0.0}});
  CHECK(eval_schedule(s, 5).delta == doctest::Approx(0.4));
  CHECK(eval_schedule(s, 15).delta == doctest::Approx(0.3));
  CHECK(eval_schedule(s, 30).delta == 0.0);
  CHECK_THROWS_AS(make_piecewise({{5.0, 0.1}, {1.0, 0.2}}), ConfigError);
}

TEST_CASE("schedule errors") {
  CHECK_THROWS_AS(eval_schedule(make_constant(0.1), -1.0), ConfigError);
  CHECK_THROWS_AS(make_clr1(0.0, 1.0, 10.0, 5.0), ConfigError);
  CHECK_THROWS_AS(make_ete(-1.0, 5.0), ConfigError);
  CHECK_THROWS_AS(make_constant(2.0, 1.0), ConfigError);  // alpha = 2 is not a memory-loss rate
  CHECK_NOTHROW(make_constant(2.0, 0.4));
}

TEST_CASE("schedule JSON round trip") {
  for (const auto& s : {make_clr1(0.01, 3.0, 200.0, 400.0, RampShape::quadratic, 0.2, 50.0),
                        make_ete(2.0, 30.0, RampShape::linear, 0.4), make_constant(0.5, 1.5),
                        make_piecewise({{0.0, 0.1}, {3.0, 0.4}})}) {
    const auto back = schedule_from_json(schedule_to_json(s));
    for (double t : {0.0, 1.0, 2.5, 60.0, 250.0, 500.0}) {
      CHECK(eval_schedule(back, t).delta == eval_schedule(s, t).delta);
      CHECK(eval_schedule(back, t).beta == eval_schedule(s, t).beta);
    }
  }
  CHECK_THROWS_AS(schedule_from_json({{"kind", "cosine"}}), ConfigError);
  CHECK_THROWS_AS(schedule_from_json({{"kind", "clr1"}, {"delta_low", 0.0}}), ConfigError);
}
