#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace wcomp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidInput : Error {
  using Error::Error;
};
struct InvalidSegment : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};
struct GeneratorInconsistency : Error {
  using Error::Error;
};
struct HardCase : Error {
  using Error::Error;
};
struct MethodInapplicable : Error {
  using Error::Error;
};
struct IncompleteTrace : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// Multiplicative slack on gradient-tolerance tests.  The adversarial
// constructions terminate with |g| = eps up to a couple of ulp, while the
// margin to the previous iterate is at least eps^{(2+alpha)/(1+alpha)}, so
// any guard in (1e-15, 1e-4) yields the same integer counts.
inline constexpr double kGradTolSlack = 1e-12;

inline bool meets_grad_tol(double gnorm, double eps) {
  return gnorm <= eps * (1.0 + kGradTolSlack);
}

// ceil(x) with a snap to the nearest integer when pow() lands within
// rounding error of one (e.g. 0.04^{-3/2} = 125 exactly in the reals).
inline long ceil_snapped(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-8 * std::max(1.0, std::abs(r))) return static_cast<long>(r);
  return static_cast<long>(std::ceil(x));
}

// ---------------------------------------------------------------------------
// Points and symmetric matrices in dimension 1 or 2.  Everything in this
// project is closed-form at this size; no linear-algebra library is pulled in.

struct Vec {
  int dim = 1;
  std::array<double, 2> v{0.0, 0.0};

  Vec() = default;
  explicit Vec(double x) : dim(1), v{x, 0.0} {}
  Vec(double x, double y) : dim(2), v{x, y} {}

  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r[i] += b[i];
  return r;
}
inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r[i] -= b[i];
  return r;
}
inline Vec operator*(double c, const Vec& a) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r[i] *= c;
  return r;
}
inline Vec operator-(const Vec& a) { return -1.0 * a; }
inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
  return s;
}
inline double norm(const Vec& a) {
  return a.dim == 1 ? std::abs(a[0]) : std::hypot(a[0], a[1]);
}
inline Vec zero_vec(int dim) {
  Vec r;
  r.dim = dim;
  return r;
}
inline bool all_finite(const Vec& a) {
  for (int i = 0; i < a.dim; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

// Symmetric matrix [[a, b], [b, c]]; dim 1 uses only a.
struct SymMat {
  int dim = 1;
  double a = 0, b = 0, c = 0;

  SymMat() = default;
  explicit SymMat(double h) : dim(1), a(h) {}
  SymMat(double a_, double b_, double c_) : dim(2), a(a_), b(b_), c(c_) {}
};

inline Vec mul(const SymMat& m, const Vec& x) {
  if (m.dim == 1) return Vec(m.a * x[0]);
  return Vec(m.a * x[0] + m.b * x[1], m.b * x[0] + m.c * x[1]);
}

inline double eig_min(const SymMat& m) {
  if (m.dim == 1) return m.a;
  const double mid = 0.5 * (m.a + m.c);
  const double rad = std::hypot(0.5 * (m.a - m.c), m.b);
  return mid - rad;
}
inline double eig_max(const SymMat& m) {
  if (m.dim == 1) return m.a;
  const double mid = 0.5 * (m.a + m.c);
  const double rad = std::hypot(0.5 * (m.a - m.c), m.b);
  return mid + rad;
}

struct EigenPair {
  double lambda_min = 0, lambda_max = 0;
  Vec v_min, v_max;  // orthonormal, first nonzero component positive
};

// Closed-form 2x2 symmetric eigendecomposition (dim 1 degenerates trivially).
inline EigenPair eig_sym(const SymMat& m) {
  EigenPair e;
  if (m.dim == 1) {
    e.lambda_min = e.lambda_max = m.a;
    e.v_min = Vec(1.0);
    e.v_max = Vec(1.0);
    return e;
  }
  const double mid = 0.5 * (m.a + m.c);
  const double rad = std::hypot(0.5 * (m.a - m.c), m.b);
  e.lambda_min = mid - rad;
  e.lambda_max = mid + rad;
  if (rad == 0.0 || (m.b == 0.0 && m.a <= m.c)) {
    e.v_min = Vec(1.0, 0.0);
    e.v_max = Vec(0.0, 1.0);
  } else if (m.b == 0.0) {
    e.v_min = Vec(0.0, 1.0);
    e.v_max = Vec(1.0, 0.0);
  } else {
    Vec u(m.b, e.lambda_min - m.a);
    Vec w(m.b, e.lambda_max - m.a);
    const double nu = norm(u), nw = norm(w);
    e.v_min = (1.0 / nu) * u;
    e.v_max = (1.0 / nw) * w;
  }
  // canonical sign: first nonzero component positive
  for (Vec* p : {&e.v_min, &e.v_max}) {
    Vec& x = *p;
    if (x[0] < 0 || (x[0] == 0 && x[1] < 0)) x = -x;
  }
  return e;
}

// Solve (m + shift*I) x = rhs by Cramer's rule; caller guarantees definiteness.
inline Vec solve_shifted(const SymMat& m, double shift, const Vec& rhs) {
  if (m.dim == 1) {
    const double d = m.a + shift;
    if (d == 0.0) throw MethodInapplicable("singular 1x1 system");
    return Vec(rhs[0] / d);
  }
  const double a = m.a + shift, c = m.c + shift, b = m.b;
  const double det = a * c - b * b;
  if (det == 0.0) throw MethodInapplicable("singular 2x2 system");
  return Vec((rhs[0] * c - rhs[1] * b) / det, (rhs[1] * a - rhs[0] * b) / det);
}

// ---------------------------------------------------------------------------
// Bit-faithful double <-> text. Hex-float for the JSON payloads, shortest-ish
// decimal (%.17g round-trips) for CSV.

inline std::string to_hexfloat(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", x);
  return buf;
}

inline double from_hexfloat(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw InvalidInput("unparseable float: " + s);
  return x;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace wcomp
