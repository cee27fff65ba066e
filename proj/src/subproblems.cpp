#include "wcomp/subproblems.hpp"

#include <algorithm>
#include <cmath>

namespace wcomp {

namespace {

constexpr int kBisectIters = 200;
constexpr double kHardCaseTol = 1e-13;

double pow_safe(double base, double expo) { return base <= 0 ? 0.0 : std::pow(base, expo); }

// ||(H + lambda I)^{-1} g|| expressed in the eigenbasis.
double shifted_inverse_norm(const EigenPair& e, double g_min, double g_max, double lambda) {
  const double a = g_min / (e.lambda_min + lambda);
  const double b = g_max / (e.lambda_max + lambda);
  return std::hypot(a, b);
}

}  // namespace

double reg_scalar_root(double b, double H, double sigma, double alpha) {
  // chi(t) = (H + sigma t^alpha) t - b is strictly increasing past the point
  // where the shifted coefficient turns nonnegative; bracket and bisect.
  const double t_min = H >= 0 ? 0.0 : std::pow(-H / sigma, 1.0 / alpha);
  auto chi = [&](double t) { return (H + sigma * pow_safe(t, alpha)) * t - b; };
  if (b <= 0.0) return t_min;
  double lo = t_min;
  double hi = std::max(1.0, 2.0 * t_min);
  while (chi(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw Error("regularization root bracketing failed");
  }
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (chi(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

static SubproblemResult reg_1d(double g, double H, double sigma, double alpha) {
  SubproblemResult r;
  if (alpha == 0.0) {
    // quadratic regularization: fixed shift sigma
    if (H + sigma <= 0.0)
      throw HardCase("alpha = 0 regularization with H + sigma not positive definite");
    r.step = Vec(-g / (H + sigma));
    r.multiplier = sigma;
    return r;
  }
  if (g == 0.0) {
    if (H >= 0.0) {
      r.step = Vec(0.0);
      r.multiplier = 0.0;
    } else {
      // two symmetric global minimizers; return the nonnegative one
      r.step = Vec(std::pow(-H / sigma, 1.0 / alpha));
      r.multiplier = -H;
      r.hard_case = true;
    }
    return r;
  }
  const double t = reg_scalar_root(std::abs(g), H, sigma, alpha);
  r.step = Vec(g > 0 ? -t : t);
  r.multiplier = sigma * pow_safe(t, alpha);
  return r;
}

static SubproblemResult reg_2d(const Vec& g, const SymMat& H, double sigma, double alpha) {
  SubproblemResult r;
  const EigenPair e = eig_sym(H);
  const double gn = norm(g);
  const double lambda_floor = std::max(0.0, -e.lambda_min);

  if (alpha == 0.0) {
    if (e.lambda_min + sigma <= 0.0)
      throw HardCase("alpha = 0 regularization with H + sigma I not positive definite");
    r.step = solve_shifted(H, sigma, -g);
    r.multiplier = sigma;
    return r;
  }

  const double g_min = dot(g, e.v_min);
  const double g_max = dot(g, e.v_max);
  const bool g_on_min = std::abs(g_min) > kHardCaseTol * std::max(gn, 1e-300);

  // psi(lambda) = lambda - sigma * n(lambda)^alpha, strictly increasing
  auto psi = [&](double lambda) {
    return lambda - sigma * pow_safe(shifted_inverse_norm(e, g_min, g_max, lambda), alpha);
  };

  if (!g_on_min) {
    // g (numerically) orthogonal to the minimal eigenvector
    const double n_bar = e.lambda_max + lambda_floor > 0
                             ? std::abs(g_max) / (e.lambda_max + lambda_floor)
                             : 0.0;
    if (e.lambda_min < 0.0 && lambda_floor - sigma * pow_safe(n_bar, alpha) >= 0.0) {
      // hard case: multiplier pinned at -lambda_min, eigenvector makes up the norm
      const double target = std::pow(lambda_floor / sigma, 1.0 / alpha);
      Vec s_bar = (e.lambda_max + lambda_floor > 0 ? -g_max / (e.lambda_max + lambda_floor) : 0.0) *
                  e.v_max;
      const double tau = std::sqrt(std::max(0.0, target * target - dot(s_bar, s_bar)));
      r.step = s_bar + tau * e.v_min;
      r.multiplier = lambda_floor;
      r.hard_case = true;
      return r;
    }
  }

  if (gn == 0.0) {
    r.step = zero_vec(2);
    r.multiplier = 0.0;
    return r;
  }

  double lo = lambda_floor;
  double hi = std::max(1.0, 2.0 * lambda_floor);
  while (psi(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw Error("regularization secular bracketing failed");
  }
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (psi(mid) < 0.0 ? lo : hi) = mid;
  }
  const double lambda = hi;  // psi(hi) >= 0 keeps H + lambda I safely PSD
  r.step = solve_shifted(H, lambda, -g);
  r.multiplier = lambda;
  return r;
}

SubproblemResult solve_reg_subproblem(const Vec& g, const SymMat& H, double sigma, double alpha) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw InvalidConfig("sigma must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidConfig("alpha must be in [0, 1]");
  if (!all_finite(g)) throw InvalidInput("non-finite gradient");
  if (g.dim != H.dim) throw InvalidInput("dimension mismatch");
  if (g.dim == 1) return reg_1d(g[0], H.a, sigma, alpha);
  if (g.dim == 2) return reg_2d(g, H, sigma, alpha);
  throw InvalidInput("dim must be 1 or 2");
}

static SubproblemResult trs_1d(double g, double H, double delta) {
  SubproblemResult r;
  if (H > 0.0 && std::abs(g / H) <= delta) {
    r.step = Vec(-g / H);
    r.multiplier = 0.0;
    return r;
  }
  // boundary: pick the end with the lower model value; ties go to +delta
  const double s = g < 0.0 ? delta : (g > 0.0 ? -delta : delta);
  r.step = Vec(s);
  r.multiplier = -g / s - H;
  r.hard_case = (g == 0.0);
  return r;
}

static SubproblemResult trs_2d(const Vec& g, const SymMat& H, double delta) {
  SubproblemResult r;
  const EigenPair e = eig_sym(H);
  const double gn = norm(g);
  const double lambda_floor = std::max(0.0, -e.lambda_min);
  const double g_min = dot(g, e.v_min);
  const double g_max = dot(g, e.v_max);

  if (e.lambda_min > 0.0) {
    const Vec newton = solve_shifted(H, 0.0, -g);
    if (norm(newton) <= delta) {
      r.step = newton;
      r.multiplier = 0.0;
      return r;
    }
  }

  const bool g_on_min = std::abs(g_min) > kHardCaseTol * std::max(gn, 1e-300);
  if (!g_on_min && e.lambda_min <= 0.0) {
    Vec s_bar = (e.lambda_max + lambda_floor > 0 ? -g_max / (e.lambda_max + lambda_floor) : 0.0) *
                e.v_max;
    const double n_bar = norm(s_bar);
    if (e.lambda_min == 0.0 && n_bar <= delta) {
      // semidefinite flat direction; minimal-norm solution with lambda = 0
      r.step = s_bar;
      r.multiplier = 0.0;
      return r;
    }
    if (e.lambda_min < 0.0 && n_bar < delta) {
      // hard case: boundary met by an eigenvector component
      const double tau = std::sqrt(std::max(0.0, delta * delta - dot(s_bar, s_bar)));
      r.step = s_bar + tau * e.v_min;
      r.multiplier = lambda_floor;
      r.hard_case = true;
      return r;
    }
  }

  // boundary solution: ||(H + lambda I)^{-1} g|| = delta, lambda > lambda_floor
  auto excess = [&](double lambda) {
    return shifted_inverse_norm(e, g_min, g_max, lambda) - delta;
  };
  double lo = lambda_floor;
  double hi = std::max(1.0, 2.0 * lambda_floor) + gn / delta;
  while (excess(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw Error("trust-region secular bracketing failed");
  }
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double lambda = hi;
  r.step = solve_shifted(H, lambda, -g);
  r.multiplier = lambda;
  return r;
}

SubproblemResult solve_trs(const Vec& g, const SymMat& H, double delta) {
  if (!(delta > 0) || !std::isfinite(delta)) throw InvalidConfig("delta must be positive");
  if (!all_finite(g)) throw InvalidInput("non-finite gradient");
  if (g.dim != H.dim) throw InvalidInput("dimension mismatch");
  if (g.dim == 1) return trs_1d(g[0], H.a, delta);
  if (g.dim == 2) return trs_2d(g, H, delta);
  throw InvalidInput("dim must be 1 or 2");
}

}  // namespace wcomp
