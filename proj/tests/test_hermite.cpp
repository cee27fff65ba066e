#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <random>
#include <thread>

#include "doctest.h"
#include "wcomp/hermite.hpp"

using namespace wcomp;

namespace {

// Independent oracle: solve the 3x3 linear system of the right-end
// interpolation conditions by Gaussian elimination with partial pivoting.
std::array<double, 3> tail_coeffs_oracle(const EndData& l, const EndData& r, double L) {
  double A[3][4] = {
      {L * L * L, L * L * L * L, L * L * L * L * L,
       (r.f - l.f) - l.g * L - 0.5 * l.H * L * L},
      {3 * L * L, 4 * L * L * L, 5 * L * L * L * L, (r.g - l.g) - l.H * L},
      {6 * L, 12 * L * L, 20 * L * L * L, r.H - l.H},
  };
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row)
      if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
    std::swap(A[piv], A[col]);
    for (int row = col + 1; row < 3; ++row) {
      const double m = A[row][col] / A[col][col];
      for (int j = col; j < 4; ++j) A[row][j] -= m * A[col][j];
    }
  }
  std::array<double, 3> c{};
  for (int row = 2; row >= 0; --row) {
    double acc = A[row][3];
    for (int j = row + 1; j < 3; ++j) acc -= A[row][j] * c[static_cast<size_t>(j)];
    c[static_cast<size_t>(row)] = acc / A[row][row];
  }
  return c;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

void check_interpolation_conditions(const QuinticSegment& q, const EndData& l, const EndData& r) {
  CHECK(rel_err(q.eval(0, 0), l.f - r.f) < 1e-10);
  CHECK(rel_err(q.eval(0, 1), l.g) < 1e-10);
  CHECK(rel_err(q.eval(0, 2), l.H) < 1e-10);
  CHECK(rel_err(q.eval(q.length, 0), 0.0) < 1e-10);
  CHECK(rel_err(q.eval(q.length, 1), r.g) < 1e-10);
  CHECK(rel_err(q.eval(q.length, 2), r.H) < 1e-10);
}

}  // namespace

TEST_CASE("identical end data gives the zero polynomial") {
  const QuinticSegment q = solve_hermite({1, 0, 0}, {1, 0, 0}, 1.0);
  for (double c : {q.c0, q.c1, q.c2, q.c3, q.c4, q.c5}) CHECK(c == 0.0);
}

TEST_CASE("closed-form coefficients match the 3x3 elimination oracle") {
  SUBCASE("first segment of the slow example, eps=0.25 alpha=1") {
    const EndData l{1.0, -0.5, 2.0};
    const EndData r{0.9375, -0.46875, 1.7578125};
    const QuinticSegment q = solve_hermite(l, r, 0.25);
    CHECK(q.c0 == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(q.c1 == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(q.c2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.c3 == doctest::Approx(29.515625).epsilon(1e-12));
    CHECK(q.c4 == doctest::Approx(-206.125).epsilon(1e-12));
    CHECK(q.c5 == doctest::Approx(352.25).epsilon(1e-12));
    const auto oracle = tail_coeffs_oracle(l, r, 0.25);
    CHECK(rel_err(q.c3, oracle[0]) < 1e-10);
    CHECK(rel_err(q.c4, oracle[1]) < 1e-10);
    CHECK(rel_err(q.c5, oracle[2]) < 1e-10);
    check_interpolation_conditions(q, l, r);
  }
  SUBCASE("first segment of the steepest-descent example, eps=0.1") {
    const EndData l{1.0, -0.2, 0.0};
    const EndData r{0.995, -0.199, 0.0};
    const QuinticSegment q = solve_hermite(l, r, 0.05);
    CHECK(q.c0 == doctest::Approx(0.005).epsilon(1e-14));
    CHECK(q.c1 == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(q.c2 == 0.0);
    CHECK(q.c3 == doctest::Approx(398.4).epsilon(1e-12));
    CHECK(q.c4 == doctest::Approx(-11944.0).epsilon(1e-12));
    CHECK(q.c5 == doctest::Approx(95520.0).epsilon(1e-12));
    const auto oracle = tail_coeffs_oracle(l, r, 0.05);
    CHECK(rel_err(q.c3, oracle[0]) < 1e-10);
    CHECK(rel_err(q.c4, oracle[1]) < 1e-10);
    CHECK(rel_err(q.c5, oracle[2]) < 1e-10);
    check_interpolation_conditions(q, l, r);
  }
}

TEST_CASE("random end data: oracle agreement and interpolation conditions") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> len(0.01, 3.0);
  for (int i = 0; i < 300; ++i) {
    const EndData l{val(rng), val(rng), val(rng)};
    const EndData r{val(rng), val(rng), val(rng)};
    const double L = len(rng);
    const QuinticSegment q = solve_hermite(l, r, L);
    const auto oracle = tail_coeffs_oracle(l, r, L);
    CHECK(rel_err(q.c3, oracle[0]) < 1e-8);
    CHECK(rel_err(q.c4, oracle[1]) < 1e-8);
    CHECK(rel_err(q.c5, oracle[2]) < 1e-8);
    check_interpolation_conditions(q, l, r);
  }
}

TEST_CASE("invalid segment inputs") {
  CHECK_THROWS_AS(solve_hermite({1, 0, 0}, {1, 0, 0}, 0.0), InvalidSegment);
  CHECK_THROWS_AS(solve_hermite({1, 0, 0}, {1, 0, 0}, -1.0), InvalidSegment);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_hermite({nan, 0, 0}, {1, 0, 0}, 1.0), InvalidInput);
  CHECK_THROWS_AS(solve_hermite({1, 0, 0}, {1, std::numeric_limits<double>::infinity(), 0}, 1.0),
                  InvalidInput);
}

namespace {

PiecewiseObjective demo_objective() {
  return build_objective({{0.0, 1.0, -0.5, 2.0}, {0.25, 0.9375, -0.46875, 1.7578125}});
}

}  // namespace

TEST_CASE("evaluation reproduces knots exactly and tails are flat") {
  const PiecewiseObjective f = demo_objective();
  CHECK(f.axis_eval(0.0, 0) == 1.0);
  CHECK(f.axis_eval(0.0, 1) == -0.5);
  CHECK(f.axis_eval(0.0, 2) == 2.0);
  CHECK(f.axis_eval(0.25, 0) == 0.9375);
  CHECK(f.axis_eval(0.25, 1) == -0.46875);
  CHECK(f.axis_eval(0.25, 2) == 1.7578125);

  CHECK(f.axis_eval(-5.0, 0) == 1.0);
  CHECK(f.axis_eval(-5.0, 1) == 0.0);
  CHECK(f.axis_eval(-5.0, 2) == 0.0);
  CHECK(f.axis_eval(-5.0, 3) == 0.0);
  CHECK(f.axis_eval(9.0, 0) == 0.9375);
  CHECK(f.axis_eval(9.0, 1) == 0.0);
}

TEST_CASE("midpoint value equals an independent Horner evaluation") {
  const PiecewiseObjective f = demo_objective();
  const double c[6] = {0.0625, -0.5, 1.0, 29.515625, -206.125, 352.25};
  const double s = 0.125;
  double horner = 0.0;
  for (int i = 5; i >= 0; --i) horner = horner * s + c[i];
  CHECK(f.axis_eval(0.125, 0) == doctest::Approx(horner + 0.9375).epsilon(1e-13));
}

TEST_CASE("dimension mismatch is rejected") {
  const PiecewiseObjective f = demo_objective();
  CHECK_THROWS_AS(value_at(f, Vec(0.1, 0.2)), InvalidInput);
  CHECK_THROWS_AS(eval(f, Vec(0.1, 0.2), 1), InvalidInput);
  CHECK_THROWS_AS(f.axis_eval(0.1, 4), InvalidInput);
}

TEST_CASE("knot continuity check passes clean and localizes a fault") {
  PiecewiseObjective f = demo_objective();
  const ContinuityReport clean = check_knot_continuity(f, 1e-10);
  CHECK(clean.pass);

  f.segments[1].c4 += 1e-3;
  const ContinuityReport bad = check_knot_continuity(f, 1e-10);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_knot == 2);  // right end of the perturbed segment
}

TEST_CASE("separable 2-D objective: both parts checked, eval sums parts") {
  PiecewiseObjective fx = demo_objective();
  auto fy = std::make_shared<PiecewiseObjective>(
      build_objective({{0.0, 1.0, -0.02, 0.04}, {0.5, 0.995, -0.0199, 0.0396}}));
  fx.dim = 2;
  fx.partner = fy;
  CHECK(value_at(fx, Vec(0.0, 0.0)) == 2.0);
  const Vec g = gradient_at(fx, Vec(0.0, 0.0));
  CHECK(g[0] == -0.5);
  CHECK(g[1] == -0.02);
  const SymMat h = hessian_at(fx, Vec(0.25, 0.5));
  CHECK(h.a == 1.7578125);
  CHECK(h.b == 0.0);
  CHECK(h.c == 0.0396);
  CHECK(check_knot_continuity(fx, 1e-10).pass);

  auto broken = std::make_shared<PiecewiseObjective>(*fy);
  broken->segments[0].c3 += 1e-3;
  fx.partner = broken;
  CHECK_FALSE(check_knot_continuity(fx, 1e-10).pass);
}

TEST_CASE("JSON round trip is bit-faithful and deterministic") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::vector<Knot> knots;
  double x = -0.3;
  for (int i = 0; i < 6; ++i) {
    knots.push_back({x, val(rng), val(rng), val(rng)});
    x += 0.1 + 0.5 * (val(rng) + 3.0);
  }
  PiecewiseObjective f = build_objective(knots);
  f.dim = 2;
  f.partner = std::make_shared<PiecewiseObjective>(demo_objective());

  const std::string text = objective_to_json(f);
  const PiecewiseObjective g = objective_from_json(text);
  REQUIRE(g.knots.size() == f.knots.size());
  for (size_t i = 0; i < f.knots.size(); ++i) {
    CHECK(g.knots[i].x == f.knots[i].x);
    CHECK(g.knots[i].f == f.knots[i].f);
    CHECK(g.knots[i].g == f.knots[i].g);
    CHECK(g.knots[i].H == f.knots[i].H);
  }
  for (size_t i = 0; i < f.segments.size(); ++i) {
    CHECK(g.segments[i].c5 == f.segments[i].c5);
    CHECK(g.segments[i].length == f.segments[i].length);
    CHECK(g.segments[i].base_offset == f.segments[i].base_offset);
  }
  REQUIRE(g.partner);
  CHECK(g.partner->knots[1].H == 2.0);
  CHECK(objective_to_json(g) == text);
}

TEST_CASE("hex-float helpers round trip awkward values") {
  for (double v : {0.1, -0.0, 1e-300, 123456.789, 2.2250738585072014e-308}) {
    CHECK(from_hexfloat(to_hexfloat(v)) == v);
  }
}

TEST_CASE("concurrent read-only evaluation is consistent") {
  const PiecewiseObjective f = demo_objective();
  std::array<double, 8> sums{};
  {
    std::vector<std::thread> workers;
    for (int t = 0; t < 8; ++t)
      workers.emplace_back([&f, &sums, t]() {
        double acc = 0;
        for (int i = 0; i <= 5000; ++i) acc += f.axis_eval(-0.5 + 2.0 * i / 5000.0, i % 3);
        sums[static_cast<size_t>(t)] = acc;
      });
    for (auto& w : workers) w.join();
  }
  for (int t = 1; t < 8; ++t) CHECK(sums[static_cast<size_t>(t)] == sums[0]);
}
