#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "wcomp/subproblems.hpp"

using namespace wcomp;

namespace {

// ---- independent oracles ---------------------------------------------------

double reg_model(const Vec& g, const SymMat& H, double sigma, double alpha, const Vec& s) {
  const double n = norm(s);
  return dot(g, s) + 0.5 * dot(s, mul(H, s)) + sigma / (2.0 + alpha) * std::pow(n, 2.0 + alpha);
}

double quad_model(const Vec& g, const SymMat& H, const Vec& s) {
  return dot(g, s) + 0.5 * dot(s, mul(H, s));
}

// 1-D: bisect the stationarity equation on each sign branch, keep the better.
double reg_oracle_1d(double g, double H, double sigma, double alpha) {
  auto best = std::pair<double, double>(0.0, 0.0);  // (value, s)
  for (double sign : {1.0, -1.0}) {
    // derivative of m(sign * t) for t >= 0
    auto phi = [&](double t) { return g * sign + H * t + sigma * std::pow(t, 1.0 + alpha); };
    double lo;
    if (phi(0.0) < 0.0) {
      lo = 0.0;
    } else if (H < 0.0) {
      const double t_dip = std::pow(-H / (sigma * (1.0 + alpha)), 1.0 / alpha);
      if (phi(t_dip) >= 0.0) continue;  // branch has no interior minimum
      lo = t_dip;
    } else {
      continue;  // increasing from zero on this branch
    }
    double hi = std::max(1.0, 2.0 * lo);
    while (phi(hi) < 0.0 && hi < 1e12) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    const double s = sign * 0.5 * (lo + hi);
    const double val = reg_model(Vec(g), SymMat(H), sigma, alpha, Vec(s));
    if (val < best.first) best = {val, s};
  }
  return best.second;
}

struct TestEig {
  double l1, l2;  // l1 <= l2
  Vec v1, v2;
};

// independent 2x2 eigensolver via the characteristic polynomial
TestEig test_eig(const SymMat& H) {
  TestEig e;
  const double tr = H.a + H.c, det = H.a * H.c - H.b * H.b;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  e.l1 = tr / 2.0 - disc;
  e.l2 = tr / 2.0 + disc;
  if (std::abs(H.b) > 1e-300) {
    e.v1 = Vec(H.b, e.l1 - H.a);
    e.v2 = Vec(H.b, e.l2 - H.a);
  } else if (H.a <= H.c) {
    e.v1 = Vec(1.0, 0.0);
    e.v2 = Vec(0.0, 1.0);
  } else {
    e.v1 = Vec(0.0, 1.0);
    e.v2 = Vec(1.0, 0.0);
  }
  e.v1 = (1.0 / norm(e.v1)) * e.v1;
  e.v2 = (1.0 / norm(e.v2)) * e.v2;
  return e;
}

// 2-D: bisection in the multiplier on the secular fixed point.
Vec reg_oracle_2d(const Vec& g, const SymMat& H, double sigma, double alpha) {
  const TestEig e = test_eig(H);
  const double g1 = dot(g, e.v1), g2 = dot(g, e.v2);
  const double floor_l = std::max(0.0, -e.l1);
  auto step_norm = [&](double lam) {
    return std::hypot(g1 / (e.l1 + lam), g2 / (e.l2 + lam));
  };
  if (std::abs(g1) <= 1e-13 * std::max(1.0, norm(g)) && e.l1 < 0.0) {
    const double n_bar = std::abs(g2) / (e.l2 + floor_l);
    if (floor_l - sigma * std::pow(n_bar, alpha) >= 0.0) {
      const double target = std::pow(floor_l / sigma, 1.0 / alpha);
      const double tau = std::sqrt(std::max(0.0, target * target - n_bar * n_bar));
      return (-g2 / (e.l2 + floor_l)) * e.v2 + tau * e.v1;
    }
  }
  double lo = floor_l, hi = std::max(1.0, 2.0 * floor_l);
  auto psi = [&](double lam) { return lam - sigma * std::pow(step_norm(lam), alpha); };
  while (psi(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (psi(mid) < 0.0 ? lo : hi) = mid;
  }
  const double lam = hi;
  return (-g1 / (e.l1 + lam)) * e.v1 + (-g2 / (e.l2 + lam)) * e.v2;
}

// 2-D trust region: interior candidate, else bisection on the boundary norm.
Vec trs_oracle_2d(const Vec& g, const SymMat& H, double delta) {
  const TestEig e = test_eig(H);
  const double g1 = dot(g, e.v1), g2 = dot(g, e.v2);
  const double floor_l = std::max(0.0, -e.l1);
  if (e.l1 > 0.0) {
    const Vec interior = (-g1 / e.l1) * e.v1 + (-g2 / e.l2) * e.v2;
    if (norm(interior) <= delta) return interior;
  }
  if (std::abs(g1) <= 1e-13 * std::max(1.0, norm(g)) && e.l1 <= 0.0) {
    const double n_bar = e.l2 + floor_l > 0 ? std::abs(g2) / (e.l2 + floor_l) : 0.0;
    if (n_bar < delta) {
      const double tau = std::sqrt(std::max(0.0, delta * delta - n_bar * n_bar));
      return (e.l2 + floor_l > 0 ? -g2 / (e.l2 + floor_l) : 0.0) * e.v2 + tau * e.v1;
    }
  }
  auto excess = [&](double lam) {
    return std::hypot(g1 / (e.l1 + lam), g2 / (e.l2 + lam)) - delta;
  };
  double lo = floor_l, hi = std::max(1.0, 2.0 * floor_l) + norm(g) / delta;
  while (excess(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double lam = hi;
  return (-g1 / (e.l1 + lam)) * e.v1 + (-g2 / (e.l2 + lam)) * e.v2;
}

// Coarse global scan certifying the solver's value is not beaten anywhere.
void grid_certify_reg(const Vec& g, const SymMat& H, double sigma, double alpha, const Vec& s,
                      double box) {
  const double val = reg_model(g, H, sigma, alpha, s);
  const int n = 160;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= (g.dim == 2 ? n : 0); ++j) {
      Vec cand = g.dim == 2 ? Vec(-box + 2 * box * i / n, -box + 2 * box * j / n)
                            : Vec(-box + 2 * box * i / n);
      CHECK(reg_model(g, H, sigma, alpha, cand) >= val - 1e-8);
    }
}

void grid_certify_trs(const Vec& g, const SymMat& H, double delta, const Vec& s) {
  const double val = quad_model(g, H, s);
  const int n = 160;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= (g.dim == 2 ? n : 0); ++j) {
      Vec cand = g.dim == 2 ? Vec(-delta + 2 * delta * i / n, -delta + 2 * delta * j / n)
                            : Vec(-delta + 2 * delta * i / n);
      if (norm(cand) > delta) cand = (delta / norm(cand)) * cand;
      CHECK(quad_model(g, H, cand) >= val - 1e-8);
    }
}

void check_reg_kkt(const Vec& g, const SymMat& H, double sigma, double alpha,
                   const SubproblemResult& r) {
  const double scale = std::max(1.0, norm(g));
  const Vec resid = g + mul(H, r.step) + r.multiplier * r.step;
  CHECK(norm(resid) <= 1e-10 * scale);
  CHECK(std::abs(r.multiplier - sigma * std::pow(norm(r.step), alpha)) <= 1e-10 * (1 + r.multiplier));
  CHECK(eig_min(H) + r.multiplier >= -1e-12);
}

void check_trs_kkt(const Vec& g, const SymMat& H, double delta, const SubproblemResult& r) {
  const double scale = std::max(1.0, norm(g));
  const Vec resid = g + mul(H, r.step) + r.multiplier * r.step;
  CHECK(norm(resid) <= 1e-10 * scale);
  CHECK(std::abs(r.multiplier * (delta - norm(r.step))) <= 1e-10 * scale);
  CHECK(r.multiplier >= std::max(0.0, -eig_min(H)) - 1e-12);
  CHECK(norm(r.step) <= delta * (1 + 1e-12));
}

}  // namespace

TEST_CASE("regularized step, pinned cases") {
  SUBCASE("flat Hessian") {
    const SubproblemResult r = solve_reg_subproblem(Vec(-1.0), SymMat(0.0), 1.0, 1.0);
    CHECK(r.step[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.multiplier == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("unit Hessian: golden-ratio step") {
    const SubproblemResult r = solve_reg_subproblem(Vec(-1.0), SymMat(1.0), 1.0, 1.0);
    CHECK(r.step[0] == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
    CHECK(r.multiplier == doctest::Approx(r.step[0]).epsilon(1e-12));
  }
  SUBCASE("diagonal 2-D: step on the first axis") {
    const SubproblemResult r =
        solve_reg_subproblem(Vec(-1.0, 0.0), SymMat(2.0, 0.0, 5.0), 1.0, 1.0);
    CHECK(r.step[0] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    CHECK(std::abs(r.step[1]) < 1e-14);
  }
  SUBCASE("alpha=0 with indefinite shifted Hessian is a hard-case error") {
    CHECK_THROWS_AS(solve_reg_subproblem(Vec(-1.0), SymMat(-2.0), 1.0, 0.0), HardCase);
    CHECK_THROWS_AS(solve_reg_subproblem(Vec(-1.0, 0.0), SymMat(-2.0, 0.0, 1.0), 1.0, 0.0),
                    HardCase);
  }
  SUBCASE("alpha=0 well-posed reduces to a shifted solve") {
    const SubproblemResult r = solve_reg_subproblem(Vec(-1.0), SymMat(1.0), 0.5, 0.0);
    CHECK(r.step[0] == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
  }
}

TEST_CASE("trust-region step, pinned cases") {
  SUBCASE("interior Newton step") {
    const SubproblemResult r = solve_trs(Vec(-1.0), SymMat(2.0), 1.0);
    CHECK(r.step[0] == 0.5);
    CHECK(r.multiplier == 0.0);
  }
  SUBCASE("indefinite, boundary with multiplier 2") {
    const SubproblemResult r = solve_trs(Vec(-1.0, 0.0), SymMat(-1.0, 0.0, 1.0), 1.0);
    CHECK(r.step[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(r.step[1]) < 1e-10);
    CHECK(r.multiplier == doctest::Approx(2.0).epsilon(1e-10));
    check_trs_kkt(Vec(-1.0, 0.0), SymMat(-1.0, 0.0, 1.0), 1.0, r);
  }
  SUBCASE("zero gradient hard case takes the eigenvector step") {
    const SubproblemResult r = solve_trs(Vec(0.0, 0.0), SymMat(-1.0, 0.0, 1.0), 1.0);
    CHECK(std::abs(r.step[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.step[1]) < 1e-12);
    CHECK(r.multiplier == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.hard_case);
    check_trs_kkt(Vec(0.0, 0.0), SymMat(-1.0, 0.0, 1.0), 1.0, r);
  }
}

TEST_CASE("randomized oracle battery, >= 100 instances with KKT residuals") {
  std::mt19937 rng(987654321);
  std::uniform_real_distribution<double> gval(-2.0, 2.0);
  std::uniform_real_distribution<double> hval(-3.0, 3.0);
  std::uniform_real_distribution<double> sig(0.3, 3.0);
  std::uniform_real_distribution<double> del(0.2, 2.0);

  int grid_budget = 10;  // the dense scan is expensive; certify a subsample
  for (int i = 0; i < 40; ++i) {
    const double g = gval(rng) + (gval(rng) > 0 ? 0.1 : -0.1);
    const double H = hval(rng);
    const double sigma = sig(rng);
    const double alpha = (i % 2) ? 1.0 : 0.5;
    const SubproblemResult r = solve_reg_subproblem(Vec(g), SymMat(H), sigma, alpha);
    const double oracle = reg_oracle_1d(g, H, sigma, alpha);
    CHECK(std::abs(r.step[0] - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
    check_reg_kkt(Vec(g), SymMat(H), sigma, alpha, r);

    const double delta = del(rng);
    const SubproblemResult t = solve_trs(Vec(g), SymMat(H), delta);
    // direct candidate comparison at 1-D scale
    double best_s = -delta, best_v = quad_model(Vec(g), SymMat(H), Vec(-delta));
    for (double cand : {delta, H > 0 ? -g / H : delta}) {
      if (std::abs(cand) <= delta && quad_model(Vec(g), SymMat(H), Vec(cand)) < best_v) {
        best_v = quad_model(Vec(g), SymMat(H), Vec(cand));
        best_s = cand;
      }
    }
    CHECK(std::abs(t.step[0] - best_s) <= 1e-8 * std::max(1.0, delta));
    check_trs_kkt(Vec(g), SymMat(H), delta, t);
  }

  for (int i = 0; i < 40; ++i) {
    const Vec g(gval(rng), gval(rng));
    const SymMat H(hval(rng), 0.5 * hval(rng), hval(rng));
    const double sigma = sig(rng);
    const double alpha = (i % 2) ? 1.0 : 0.5;
    const SubproblemResult r = solve_reg_subproblem(g, H, sigma, alpha);
    const Vec oracle = reg_oracle_2d(g, H, sigma, alpha);
    CHECK(norm(r.step - oracle) <= 1e-8 * std::max(1.0, norm(oracle)));
    check_reg_kkt(g, H, sigma, alpha, r);
    if (grid_budget > 0) grid_certify_reg(g, H, sigma, alpha, r.step, 3.0 * (1 + norm(r.step)));

    const double delta = del(rng);
    const SubproblemResult t = solve_trs(g, H, delta);
    const Vec toracle = trs_oracle_2d(g, H, delta);
    CHECK(norm(t.step - toracle) <= 1e-8 * std::max(1.0, delta));
    check_trs_kkt(g, H, delta, t);
    if (grid_budget-- > 0) grid_certify_trs(g, H, delta, t.step);
  }

  // crafted hard-case instances: gradient orthogonal to the minimal eigenvector
  for (int i = 0; i < 20; ++i) {
    const double l1 = -0.5 - 2.0 * i / 19.0;
    const double l2 = 0.5 + 2.0 * i / 19.0;
    const SymMat H(l1, 0.0, l2);
    const Vec g(0.0, gval(rng));
    const double delta = 0.4 + del(rng);
    const SubproblemResult t = solve_trs(g, H, delta);
    check_trs_kkt(g, H, delta, t);
    const Vec toracle = trs_oracle_2d(g, H, delta);
    CHECK(std::abs(norm(t.step) - norm(toracle)) <= 1e-8);
    CHECK(std::abs(quad_model(g, H, t.step) - quad_model(g, H, toracle)) <= 1e-8);

    const SubproblemResult r = solve_reg_subproblem(g, H, 1.0, 1.0);
    check_reg_kkt(g, H, 1.0, 1.0, r);
  }
}
