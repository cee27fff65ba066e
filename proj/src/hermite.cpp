#include "wcomp/hermite.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace wcomp {

double QuinticSegment::eval(double s, int order) const {
  switch (order) {
    case 0:
      return ((((c5 * s + c4) * s + c3) * s + c2) * s + c1) * s + c0;
    case 1:
      return (((5 * c5 * s + 4 * c4) * s + 3 * c3) * s + 2 * c2) * s + c1;
    case 2:
      return ((20 * c5 * s + 12 * c4) * s + 6 * c3) * s + 2 * c2;
    case 3:
      return (60 * c5 * s + 24 * c4) * s + 6 * c3;
    default:
      throw InvalidInput("derivative order must be 0..3");
  }
}

QuinticSegment solve_hermite(const EndData& left, const EndData& right, double length) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidSegment("segment length must be positive");
  for (double v : {left.f, left.g, left.H, right.f, right.g, right.H})
    if (!std::isfinite(v)) throw InvalidInput("non-finite end data");

  QuinticSegment q;
  q.length = length;
  q.base_offset = right.f;
  q.c0 = left.f - right.f;
  q.c1 = left.g;
  q.c2 = 0.5 * left.H;

  const double L = length;
  const double df = right.f - left.f;
  const double dg = right.g - left.g;
  const double dH = right.H - left.H;
  // residuals of the end conditions at s = L after the left-end terms
  const double r0 = df - left.g * L - 0.5 * left.H * L * L;
  const double r1 = dg - left.H * L;
  const double r2 = dH;

  const double L2 = L * L, L3 = L2 * L, L4 = L3 * L, L5 = L4 * L;
  q.c3 = 10 * r0 / L3 - 4 * r1 / L2 + 0.5 * r2 / L;
  q.c4 = -15 * r0 / L4 + 7 * r1 / L3 - r2 / L2;
  q.c5 = 6 * r0 / L5 - 3 * r1 / L4 + 0.5 * r2 / L3;
  return q;
}

void PiecewiseObjective::validate() const {
  if (knots.size() < 2) throw InvalidInput("objective needs at least two knots");
  if (segments.size() != knots.size() - 1)
    throw InvalidInput("segment count must be knot count - 1");
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i].x < knots[i + 1].x))
      throw InvalidInput("knots must be strictly increasing in x");
  }
  for (const Knot& k : knots)
    for (double v : {k.x, k.f, k.g, k.H})
      if (!std::isfinite(v)) throw InvalidInput("non-finite knot data");
  for (const QuinticSegment& s : segments)
    if (!(s.length > 0)) throw InvalidInput("non-positive segment length");
  if (dim == 2 && !partner) throw InvalidInput("dim-2 objective needs a partner");
  if (dim != 1 && dim != 2) throw InvalidInput("dim must be 1 or 2");
  if (partner) partner->validate();
}

double PiecewiseObjective::axis_eval(double x, int order) const {
  if (order < 0 || order > 3) throw InvalidInput("derivative order must be 0..3");
  if (x < knots.front().x) return order == 0 ? left_tail_value : 0.0;
  if (x >= knots.back().x) return order == 0 ? right_tail_value : 0.0;
  // ties at a knot resolve to the segment starting there
  const auto it = std::upper_bound(knots.begin(), knots.end(), x,
                                   [](double v, const Knot& k) { return v < k.x; });
  const size_t j = static_cast<size_t>(it - knots.begin()) - 1;
  const QuinticSegment& seg = segments[j];
  const double s = x - knots[j].x;
  const double p = seg.eval(s, order);
  return order == 0 ? p + seg.base_offset : p;
}

static void require_dim(const PiecewiseObjective& f, const Vec& p) {
  if (p.dim != f.dim) throw InvalidInput("point dimension does not match objective");
}

double value_at(const PiecewiseObjective& f, const Vec& p) {
  require_dim(f, p);
  double v = f.axis_eval(p[0], 0);
  if (f.dim == 2) v += f.partner->axis_eval(p[1], 0);
  return v;
}

Vec gradient_at(const PiecewiseObjective& f, const Vec& p) {
  require_dim(f, p);
  if (f.dim == 1) return Vec(f.axis_eval(p[0], 1));
  return Vec(f.axis_eval(p[0], 1), f.partner->axis_eval(p[1], 1));
}

SymMat hessian_at(const PiecewiseObjective& f, const Vec& p) {
  require_dim(f, p);
  if (f.dim == 1) return SymMat(f.axis_eval(p[0], 2));
  return SymMat(f.axis_eval(p[0], 2), 0.0, f.partner->axis_eval(p[1], 2));
}

Vec third_derivative_at(const PiecewiseObjective& f, const Vec& p) {
  require_dim(f, p);
  if (f.dim == 1) return Vec(f.axis_eval(p[0], 3));
  return Vec(f.axis_eval(p[0], 3), f.partner->axis_eval(p[1], 3));
}

Vec eval(const PiecewiseObjective& f, const Vec& p, int order) {
  switch (order) {
    case 0: {
      Vec r = zero_vec(f.dim);
      r[0] = value_at(f, p);
      return r;
    }
    case 1:
      return gradient_at(f, p);
    case 2: {
      const SymMat h = hessian_at(f, p);
      return f.dim == 1 ? Vec(h.a) : Vec(h.a, h.c);
    }
    case 3:
      return third_derivative_at(f, p);
    default:
      throw InvalidInput("derivative order must be 0..3");
  }
}

PiecewiseObjective build_objective(const std::vector<Knot>& interior) {
  if (interior.size() < 2) throw InvalidInput("need at least two knots");
  PiecewiseObjective f;
  const Knot& first = interior.front();
  const Knot& last = interior.back();
  f.knots.reserve(interior.size() + 2);
  f.knots.push_back({first.x - 1.0, first.f, 0.0, 0.0});
  f.knots.insert(f.knots.end(), interior.begin(), interior.end());
  f.knots.push_back({last.x + 1.0, last.f, 0.0, 0.0});
  f.left_tail_value = first.f;
  f.right_tail_value = last.f;
  f.segments.reserve(f.knots.size() - 1);
  for (size_t i = 0; i + 1 < f.knots.size(); ++i) {
    const Knot& a = f.knots[i];
    const Knot& b = f.knots[i + 1];
    f.segments.push_back(solve_hermite({a.f, a.g, a.H}, {b.f, b.g, b.H}, b.x - a.x));
  }
  f.validate();
  return f;
}

static ContinuityReport check_axis(const PiecewiseObjective& f, double tol) {
  ContinuityReport rep;
  double worst = 0;
  auto consider = [&](int knot_idx, int order, double lhs, double rhs) {
    const double gap = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    double* slot = order == 0 ? &rep.max_value_gap : order == 1 ? &rep.max_grad_gap : &rep.max_hess_gap;
    *slot = std::max(*slot, gap);
    if (gap > worst) {
      worst = gap;
      rep.worst_knot = knot_idx;
    }
  };
  const int n = static_cast<int>(f.knots.size());
  for (int j = 0; j < n; ++j) {
    for (int order = 0; order <= 2; ++order) {
      double left, right;
      if (j == 0) {
        left = order == 0 ? f.left_tail_value : 0.0;
      } else {
        const QuinticSegment& s = f.segments[static_cast<size_t>(j - 1)];
        left = s.eval(s.length, order) + (order == 0 ? s.base_offset : 0.0);
      }
      if (j == n - 1) {
        right = order == 0 ? f.right_tail_value : 0.0;
      } else {
        const QuinticSegment& s = f.segments[static_cast<size_t>(j)];
        right = s.eval(0.0, order) + (order == 0 ? s.base_offset : 0.0);
      }
      consider(j, order, left, right);
    }
  }
  rep.pass = rep.max_value_gap <= tol && rep.max_grad_gap <= tol && rep.max_hess_gap <= tol;
  return rep;
}

ContinuityReport check_knot_continuity(const PiecewiseObjective& f, double tol) {
  ContinuityReport rep = check_axis(f, tol);
  if (f.dim == 2) {
    const ContinuityReport p = check_axis(*f.partner, tol);
    rep.max_value_gap = std::max(rep.max_value_gap, p.max_value_gap);
    rep.max_grad_gap = std::max(rep.max_grad_gap, p.max_grad_gap);
    rep.max_hess_gap = std::max(rep.max_hess_gap, p.max_hess_gap);
    rep.pass = rep.pass && p.pass;
    if (!p.pass && rep.pass == false && p.worst_knot >= 0) rep.worst_knot = p.worst_knot;
  }
  return rep;
}

double second_derivative_bound(const PiecewiseObjective& f) {
  double bound = 0;
  for (const QuinticSegment& s : f.segments) {
    const double L = s.length;
    bound = std::max(bound, 2 * std::abs(s.c2) + 6 * std::abs(s.c3) * L +
                                12 * std::abs(s.c4) * L * L + 20 * std::abs(s.c5) * L * L * L);
  }
  if (f.partner) bound = std::max(bound, second_derivative_bound(*f.partner));
  return bound;
}

// --- serialization ---------------------------------------------------------

using nlohmann::json;

static json axis_to_json(const PiecewiseObjective& f) {
  json j;
  j["dim"] = f.dim;
  json knots = json::array();
  for (const Knot& k : f.knots) {
    knots.push_back({{"x", to_hexfloat(k.x)},
                     {"f", to_hexfloat(k.f)},
                     {"g", to_hexfloat(k.g)},
                     {"H", to_hexfloat(k.H)}});
  }
  j["knots"] = knots;
  json segs = json::array();
  for (const QuinticSegment& s : f.segments) {
    segs.push_back({{"c0", to_hexfloat(s.c0)},
                    {"c1", to_hexfloat(s.c1)},
                    {"c2", to_hexfloat(s.c2)},
                    {"c3", to_hexfloat(s.c3)},
                    {"c4", to_hexfloat(s.c4)},
                    {"c5", to_hexfloat(s.c5)},
                    {"length", to_hexfloat(s.length)},
                    {"base", to_hexfloat(s.base_offset)}});
  }
  j["segments"] = segs;
  j["tails"] = {{"left", to_hexfloat(f.left_tail_value)},
                {"right", to_hexfloat(f.right_tail_value)}};
  if (f.partner) j["partner"] = axis_to_json(*f.partner);
  return j;
}

static PiecewiseObjective axis_from_json(const json& j) {
  PiecewiseObjective f;
  f.dim = j.at("dim").get<int>();
  for (const json& k : j.at("knots")) {
    f.knots.push_back({from_hexfloat(k.at("x").get<std::string>()),
                       from_hexfloat(k.at("f").get<std::string>()),
                       from_hexfloat(k.at("g").get<std::string>()),
                       from_hexfloat(k.at("H").get<std::string>())});
  }
  for (const json& s : j.at("segments")) {
    QuinticSegment q;
    q.c0 = from_hexfloat(s.at("c0").get<std::string>());
    q.c1 = from_hexfloat(s.at("c1").get<std::string>());
    q.c2 = from_hexfloat(s.at("c2").get<std::string>());
    q.c3 = from_hexfloat(s.at("c3").get<std::string>());
    q.c4 = from_hexfloat(s.at("c4").get<std::string>());
    q.c5 = from_hexfloat(s.at("c5").get<std::string>());
    q.length = from_hexfloat(s.at("length").get<std::string>());
    q.base_offset = from_hexfloat(s.at("base").get<std::string>());
    f.segments.push_back(q);
  }
  f.left_tail_value = from_hexfloat(j.at("tails").at("left").get<std::string>());
  f.right_tail_value = from_hexfloat(j.at("tails").at("right").get<std::string>());
  if (j.contains("partner"))
    f.partner = std::make_shared<PiecewiseObjective>(axis_from_json(j.at("partner")));
  f.validate();
  return f;
}

std::string objective_to_json(const PiecewiseObjective& f) { return axis_to_json(f).dump(2) + "\n"; }

PiecewiseObjective objective_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad objective JSON: ") + e.what());
  }
  return axis_from_json(j);
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path + " failed: " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void save_objective(const std::string& path, const PiecewiseObjective& f) {
  atomic_write(path, objective_to_json(f));
}

PiecewiseObjective load_objective(const std::string& path) {
  return objective_from_json(read_file(path));
}

}  // namespace wcomp
