#include "oracles.hpp"
#include "test_util.hpp"

#include "wcpd/errors.hpp"
#include "wcpd/problems.hpp"
#include "wcpd/saddle.hpp"

#include <doctest.h>

#include <cmath>

using namespace wcpd;
using testing::vec1;
using testing::vec2;

namespace {

double K(SaddleProblem const &p, double x, double y) { return lagrangian(p, vec1(x), vec1(y)); }
double H(SaddleProblem const &p, double x, double y) { return gap_H(p, vec1(x), vec1(y)); }

SaddleProblem vector_problem()
{
  return SaddleProblem{linf_ball_indicator(1), linf_ball_indicator(1), identity_map(2), std::nullopt,
                       {{Vec::Zero(2), Vec::Zero(2)}}, {}, {}};
}

} // namespace

TEST_CASE("lagrangian values")
{
  auto const ex3 = example_abs_bilinear().problem;
  CHECK(K(ex3, 1, 1) == 1.0);
  CHECK(K(ex3, 0, 0) == 0.0);
  CHECK(K(example_quadratic_dual().problem, 1, 2) == doctest::Approx(2.5));
  CHECK_THROWS_AS(lagrangian(ex3, vec2(1, 1), vec1(0)), std::invalid_argument);

  auto const vp = vector_problem();
  double const inf = std::numeric_limits<double>::infinity();
  CHECK(lagrangian(vp, vec2(3, 4), vec2(0, 0)) == inf);
  CHECK(lagrangian(vp, vec2(0, 0), vec2(3, 4)) == -inf);
}

TEST_CASE("modified gap H")
{
  auto const ex1 = example_abs_split().problem;
  CHECK(H(ex1, 3, 4) == 7.0);
  CHECK(H(ex1, 0, 0) == 0.0);
  CHECK(H(example_quadratic_dual().problem, 0, 1) == doctest::Approx(0.125));

  auto missing = ex1;
  missing.saddle_set.clear();
  CHECK_THROWS_AS(gap_H(missing, vec1(0), vec1(0)), std::invalid_argument);

  // A wrong saddle set produces negative raw values, which are clamped and counted.
  auto wrong = example_abs_bilinear().problem;
  wrong.saddle_set = {{vec1(1), vec1(1)}};
  GapDiagnostics diag;
  CHECK(gap_H(wrong, vec1(0), vec1(0), &diag) == 0.0);
  CHECK(diag.negative_h.load() == 1);
}

TEST_CASE("H vanishes on S but also at non-saddle points of the |x^2-1| example")
{
  auto const variant = example_wc_quartic_variant().problem;
  CHECK(H(variant, 0, 0) == 0.0);
  CHECK(H(variant, 0, 1) == 0.0);
  CHECK(H(variant, 1, 1) == 0.0);
  CHECK(H(variant, 1, 0) == 0.0);
  CHECK(saddle_violation(variant, 500, 2.0, 1) <= 1e-8);
  CHECK(saddle_violation(example_wc_quartic().problem, 500, 0.5, 1) <= 1e-8);
  for (auto const &spec : {example_abs_split(), example_quadratic_dual(), example_abs_bilinear()}) {
    CHECK(saddle_violation(spec.problem, 500, 5.0, 2) <= 1e-8);
  }
}

TEST_CASE("strongly convex toy: H vanishes only on S")
{
  SaddleProblem p{quad_fit(vec1(0), 1.0), quad_fit(vec1(0), 1.0), identity_map(1), std::nullopt,
                  {{vec1(0), vec1(0)}}, {}, {}};
  for (double x : grid_axis(-2, 2, 0.1)) {
    for (double y : grid_axis(-2, 2, 0.1)) {
      if (std::abs(x) + std::abs(y) > 1e-9) { CHECK(H(p, x, y) > 0.0); }
    }
  }
}

TEST_CASE("duality gap G on a grid")
{
  Box2 const box{-3, 3, -3, 3};
  double const step = 0.01;
  auto const ex1 = example_abs_split().problem;
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    double const x = rng.uniform(-3, 3);
    double const y = rng.uniform(-3, 3);
    CHECK(std::abs(gap_G(ex1, x, y, box, step) - (std::abs(x) + std::abs(y))) <= step);
  }
  CHECK(std::abs(gap_G(ex1, 0, 0, box, step)) <= step);
  auto const ex3 = example_abs_bilinear().problem;
  CHECK(gap_G(ex3, 1, 1, box, step) >= H(ex3, 1, 1) - step);
  CHECK_THROWS_AS(gap_G(vector_problem(), 0, 0, box, step), Unsupported);
}

TEST_CASE("chain G >= H >= 0 for the convex examples")
{
  Box2 const box{-2, 2, -2, 2};
  double const step = 0.02;
  for (auto const &spec : {example_abs_split(), example_quadratic_dual(), example_abs_bilinear()}) {
    for (double x : grid_axis(-2, 2, 0.4)) {
      for (double y : grid_axis(-2, 2, 0.4)) {
        double const h = H(spec.problem, x, y);
        CHECK(h >= 0.0);
        CHECK(gap_G(spec.problem, x, y, box, step) >= h - step);
      }
    }
  }
}

TEST_CASE("inf-sharpness verdicts")
{
  auto const r1 = verify_inf_sharpness(example_abs_split().problem, 1.0, {-5, 5, -5, 5}, 0.05);
  CHECK(r1.min_violation >= -1e-12);
  CHECK(r1.sharp());

  auto const r2 = verify_inf_sharpness(example_quadratic_dual().problem, 0.1, {-1, 1, -1, 1}, 0.01);
  CHECK(r2.min_violation == doctest::Approx(-0.02).epsilon(1e-6));
  CHECK(std::abs(r2.witness_x) <= 1e-12);
  CHECK(std::abs(std::abs(r2.witness_y) - 0.4) <= 1e-9);
  CHECK_FALSE(r2.sharp());

  auto const r3 = verify_inf_sharpness(example_abs_bilinear().problem, 1.0, {-3, 3, -3, 3}, 0.05);
  CHECK(r3.min_violation >= -1e-12);

  auto const rv = verify_inf_sharpness(example_wc_quartic_variant().problem, 1.0, {-3, 3, -3, 3}, 0.05);
  CHECK(rv.min_violation < 0.0);
}

TEST_CASE("sharpness scan is independent of the thread count")
{
  auto const p = example_quadratic_dual().problem;
  Box2 const box{-1, 1, -1, 1};
  auto const a = verify_inf_sharpness(p, 0.5, box, 0.005, true, 1);
  auto const b = verify_inf_sharpness(p, 0.5, box, 0.005, true, 4);
  CHECK(a.min_violation == b.min_violation);
  CHECK(a.witness_x == b.witness_x);
  CHECK(a.witness_y == b.witness_y);
  REQUIRE(a.contour.size() == b.contour.size());
  CHECK(a.contour.size() == 401 * 401);
  for (std::size_t k = 0; k < a.contour.size(); k += 997) { CHECK(a.contour[k].value == b.contour[k].value); }
}

TEST_CASE("distance to a finite set")
{
  std::vector<PrimalDual> const S{{vec1(0), vec1(0)}};
  CHECK(dist_to_set(PrimalDual{vec1(3), vec1(4)}, S) == 5.0);
  CHECK(dist_to_set(PrimalDual{vec1(0), vec1(0)}, S) == 0.0);
  std::vector<PrimalDual> const two{{vec1(0), vec1(0)}, {vec1(1), vec1(0)}};
  CHECK(dist_to_set(PrimalDual{vec1(0.6), vec1(0)}, two) == doctest::Approx(0.4));
  CHECK_THROWS_AS(dist_to_set(PrimalDual{vec1(0), vec1(0)}, {}), std::invalid_argument);

  Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    PrimalDual const z{vec1(rng.uniform(-3, 3)), vec1(rng.uniform(-3, 3))};
    double const d = dist_to_set(z, two);
    CHECK(d >= 0.0);
    for (auto const &s : two) {
      CHECK(d <= std::sqrt((z.x - s.x).squaredNorm() + (z.y - s.y).squaredNorm()) + 1e-12);
    }
  }
  CHECK(dist_to_set(vec2(1, 1), std::vector<Vec>{vec2(1, 1)}) == 0.0);
}

TEST_CASE("radius report constants")
{
  StepConfig const cfg{0.35, 0.25, 1.0};
  auto const r = radius_report(2.0, 0.9, 1.0, cfg, Regime::DualFirst);
  CHECK(std::abs(r.A - 0.00599) <= 1e-4);
  CHECK(r.ball_radius == doctest::Approx(0.9 / (2.0 - r.A)));
  CHECK(r.ball_radius == doctest::Approx(0.4514).epsilon(1e-4));

  auto const sym = radius_report(0.0, 1.0, 1.0, {0.4, 0.4, 0.0}, Regime::DualFirst);
  CHECK(sym.A == doctest::Approx(sym.A1));

  CHECK_THROWS_AS(radius_report(2.0, 0.9, 1.0, {0.5, 0.25, 1.0}, Regime::DualFirst), StepsizeViolation);

  Rng rng(12);
  int checked = 0;
  for (int k = 0; k < 2000 && checked < 300; ++k) {
    double const rho = rng.uniform(0, 3);
    double const L = rng.uniform(0.1, 3);
    StepConfig const c{rng.uniform(0.01, 1), rng.uniform(0.01, 1), rng.uniform()};
    auto const regime = k % 2 == 0 ? Regime::DualFirst : Regime::PrimalFirst;
    if (!validate_steps(c, rho, L, regime).ok) { continue; }
    auto const o = oracle::constants(rho, 0.7, L, c.sigma, c.tau, c.theta);
    auto const rep = radius_report(rho, 0.7, L, c, regime);
    CHECK(rep.A == doctest::Approx(o.A).epsilon(1e-13));
    CHECK(rep.A1 == doctest::Approx(o.A1).epsilon(1e-13));
    CHECK(rep.ball_radius ==
          doctest::Approx(regime == Regime::DualFirst ? o.radius_dual : o.radius_primal).epsilon(1e-13));
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("rate constant B")
{
  StepConfig const cfg{0.35, 0.25, 1.0};
  auto const r = radius_report(2.0, 0.9, 1.0, cfg, Regime::DualFirst);
  CHECK(rate_constant_B(r, 0.9, 1e-9, 0.35, 0.25) < 1e-6);
  double const half = rate_constant_B(r, 0.9, r.ball_radius / 2, 0.35, 0.25);
  CHECK(half < 1.0);
  CHECK(half == doctest::Approx(oracle::rate_B(r.A, 0.9, r.ball_radius / 2, 0.35, 0.25)));
  CHECK(rate_constant_B(r, 0.9, r.ball_radius * 0.999, 0.35, 0.25) < 1.0);
  CHECK_THROWS_AS(rate_constant_B(r, 0.9, r.ball_radius, 0.35, 0.25), OutOfBall);
}

TEST_CASE("epsilon bounds")
{
  auto const e0 = epsilon_bounds(0.8, 2.0, 1.5, 0.1, 0.3, 0.0);
  double const c = 0.1 * 2.0 + std::sqrt(0.03) * 1.5;
  CHECK(e0.feasible);
  CHECK(e0.E_minus == 0.0);
  CHECK(e0.E_plus == doctest::Approx(2 * 0.1 * 0.8 / c));

  double const eps = std::sqrt(0.1);
  auto const interval = feasible_sigma_interval(1.0, 2.0, 1.0, 0.5, eps);
  REQUIRE(interval.has_value());
  CHECK(std::abs(interval->first - 0.0555) <= 1e-3);
  CHECK(std::abs(interval->second - 0.304806) <= 1e-3);
  CHECK_FALSE(epsilon_bounds(1.0, 2.0, 1.0, 0.05, 0.5, eps).feasible);
  CHECK(epsilon_bounds(1.0, 2.0, 1.0, 0.1, 0.5, eps).feasible);

  // At the feasibility boundary the two bounds meet.
  auto const at = epsilon_bounds(1.0, 2.0, 1.0, interval->first + 1e-12, 0.5, eps);
  CHECK(at.feasible);
  CHECK(std::abs(at.E_plus - at.E_minus) <= 1e-4);

  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    double const s = rng.uniform(0.01, 0.4);
    double const t = rng.uniform(0.01, 1);
    auto const e = epsilon_bounds(0.99, 2.0, 1.3, s, t, 1e-3);
    if (!e.feasible) { continue; }
    double plus, minus;
    oracle::e_bounds(0.99, 2.0, 1.3, s, t, 1e-6, plus, minus);
    CHECK(e.E_plus == doctest::Approx(plus).epsilon(1e-12));
    CHECK(e.E_minus == doctest::Approx(minus).epsilon(1e-9));
    CHECK(e.E_minus <= e.E_plus);
  }
}

TEST_CASE("reduction of a weakly convex g")
{
  auto const f = abs_value();
  auto const [F0, G0] = reduce_fully_weakly_convex(f, l1_norm(), identity_map(1));
  CHECK(F0.name() == f.name());
  CHECK(F0.rho() == 0.0);
  CHECK(G0.name() == "l1");

  auto const g = abs_norm_sq_shift(1.0);
  auto const [F, G] = reduce_fully_weakly_convex(abs_quadratic(-1, 2), g, identity_map(1));
  CHECK(F.rho() == doctest::Approx(2.0 + 2.0));
  CHECK(G.rho() == 0.0);
  CHECK(G(vec1(0.5)) == doctest::Approx(g(vec1(0.5)) + 0.25));
  CHECK(F(vec1(0.5)) == doctest::Approx(std::abs(-1.5 * 1.5) - 0.25));

  ProxFunction neg_sq("-|y|^2", 2.0, [](Vec const &y) { return -y.squaredNorm(); });
  auto const [F2, G2] = reduce_fully_weakly_convex(zero_function(), neg_sq, identity_map(2));
  Rng rng(3);
  for (int k = 0; k < 20; ++k) { CHECK(std::abs(G2(testing::random_vec(rng, 2, -5, 5))) <= 1e-12); }

  // Prox of F against the numeric minimizer when L is a multiple of I.
  auto const [Fs, Gs] = reduce_fully_weakly_convex(abs_value(), abs_norm_sq_shift(1.0), scalar_map(1, 0.5));
  CHECK(Fs.rho() == doctest::Approx(0.5));
  for (int k = 0; k < 50; ++k) {
    double const gamma = rng.uniform(0.05, 1.9);
    double const v = rng.uniform(-3, 3);
    double const oracle = brute_force_prox([](double u) { return std::abs(u) - 0.25 * u * u; }, gamma, v, -20, 20);
    CHECK(std::abs(Fs.prox(gamma, v) - oracle) <= 1e-6);
  }

  Mat A(2, 2);
  A << 1, 2, 0, 1;
  auto const [Fm, Gm] = reduce_fully_weakly_convex(l1_norm(), abs_norm_sq_shift(1.0), matrix_map(A));
  CHECK_FALSE(Fm.has_prox());
}

TEST_CASE("weak convexity of the grid gap")
{
  Box2 const box{-2, 2, -2, 2};
  CHECK(gap_weak_convexity_check(example_abs_split().problem, 0.0, 100, 1, box, 0.02) <= 1e-9);
  CHECK(gap_weak_convexity_check(example_wc_quartic().problem, 2.0, 100, 2, box, 0.02) <= 1e-9);
  CHECK_THROWS_AS(gap_weak_convexity_check(vector_problem(), 0.0, 1, 1, box, 0.1), Unsupported);
}
