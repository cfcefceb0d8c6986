#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace eigenobs {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 5-point Gauss-Legendre on [-1, 1]
constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665,
                           0.5688888888888889, 0.4786286704993665,
                           0.2369268850561891};

double wrap(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0.0) r += period;
  return r;
}

}  // namespace

Domain Domain::disk(double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::Argument, "disk radius must be positive");
  Domain d;
  d.kind_ = DomainKind::Disk;
  d.radius_ = radius;
  d.area_ = kPi * radius * radius;
  d.boundary_length_ = 2.0 * kPi * radius;
  return d;
}

Domain Domain::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    fail(ErrorKind::Argument, "ellipse semi-axes must be positive");
  Domain d;
  d.kind_ = DomainKind::Ellipse;
  d.a_ = a;
  d.b_ = b;
  d.area_ = kPi * a * b;
  d.build_ellipse_table();
  return d;
}

Domain Domain::square(double side) {
  if (!(side > 0.0)) fail(ErrorKind::Argument, "square side must be positive");
  Domain d;
  d.kind_ = DomainKind::Square;
  d.side_ = side;
  d.area_ = side * side;
  d.boundary_length_ = 4.0 * side;
  return d;
}

Domain Domain::boundary_graph(std::function<double(double)> g,
                              std::function<double(double)> dg, double width,
                              double height) {
  if (!g || !dg) fail(ErrorKind::Argument, "graph callables required");
  if (!(width > 0.0) || !(height > 0.0))
    fail(ErrorKind::Argument, "graph extent must be positive");
  if (std::abs(g(0.0)) > 1e-12 || std::abs(dg(0.0)) > 1e-12)
    fail(ErrorKind::Argument, "graph must satisfy g(0) = 0 and g'(0) = 0");
  Domain d;
  d.kind_ = DomainKind::BoundaryGraph;
  d.g_ = std::move(g);
  d.dg_ = std::move(dg);
  d.gwidth_ = width;
  d.gheight_ = height;

  const int n = 4096;
  auto table = std::make_shared<std::vector<double>>(n + 1, 0.0);
  const double dx = 2.0 * width / n;
  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x0 = -width + i * dx;
    double len = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double x = x0 + 0.5 * dx * (1.0 + kGx[q]);
      const double gp = d.dg_(x);
      len += kGw[q] * std::sqrt(1.0 + gp * gp);
      area += kGw[q] * (height - d.g_(x));
    }
    (*table)[i + 1] = (*table)[i] + 0.5 * dx * len;
  }
  d.arc_table_ = table;
  d.area_ = 0.5 * dx * area;
  if (!(d.area_ > 0.0)) fail(ErrorKind::Argument, "graph domain has no area");
  const double graph_len = table->back();
  d.boundary_length_ = graph_len + (height - d.g_(width)) + 2.0 * width +
                       (height - d.g_(-width));
  return d;
}

double Domain::ellipse_speed(double t) const {
  const double sx = -a_ * std::sin(t);
  const double sy = b_ * std::cos(t);
  return std::hypot(sx, sy);
}

void Domain::build_ellipse_table() {
  const int n = 4096;
  auto table = std::make_shared<std::vector<double>>(n + 1, 0.0);
  const double dt = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    const double t0 = i * dt;
    double len = 0.0;
    for (int q = 0; q < 5; ++q)
      len += kGw[q] * ellipse_speed(t0 + 0.5 * dt * (1.0 + kGx[q]));
    (*table)[i + 1] = (*table)[i] + 0.5 * dt * len;
  }
  arc_table_ = table;
  boundary_length_ = table->back();
}

double Domain::ellipse_arc_from_angle(double t) const {
  t = wrap(t, 2.0 * kPi);
  const auto& cum = *arc_table_;
  const int n = static_cast<int>(cum.size()) - 1;
  const double dt = 2.0 * kPi / n;
  int idx = std::min(n - 1, static_cast<int>(t / dt));
  const double t0 = idx * dt;
  double len = 0.0;
  const double w = t - t0;
  if (w > 0.0) {
    for (int q = 0; q < 5; ++q)
      len += kGw[q] * ellipse_speed(t0 + 0.5 * w * (1.0 + kGx[q]));
    len *= 0.5 * w;
  }
  return cum[idx] + len;
}

double Domain::ellipse_angle_from_arc(double s) const {
  s = wrap(s, boundary_length_);
  const auto& cum = *arc_table_;
  const int n = static_cast<int>(cum.size()) - 1;
  const double dt = 2.0 * kPi / n;
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  int idx = std::max(0, static_cast<int>(it - cum.begin()) - 1);
  idx = std::min(idx, n - 1);
  double t = idx * dt +
             dt * (s - cum[idx]) / std::max(cum[idx + 1] - cum[idx], 1e-300);
  for (int k = 0; k < 30; ++k) {
    const double f = ellipse_arc_from_angle(t) - s;
    const double step = f / ellipse_speed(t);
    t -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return wrap(t, 2.0 * kPi);
}

double Domain::inradius() const {
  switch (kind_) {
    case DomainKind::Disk:
      return radius_;
    case DomainKind::Ellipse:
      return std::min(a_, b_);
    case DomainKind::Square:
      return 0.5 * side_;
    case DomainKind::BoundaryGraph: {
      // grid search with refinement against a dense boundary sample
      const int nb = 2048;
      std::vector<Vec2> bnd(nb);
      for (int i = 0; i < nb; ++i)
        bnd[i] = boundary_point(boundary_length_ * (i + 0.5) / nb).position;
      auto clearance = [&](Vec2 p) {
        if (level(p) <= 0.0) return -1.0;
        double d = std::numeric_limits<double>::max();
        for (const auto& q : bnd) d = std::min(d, dist(p, q));
        return d;
      };
      Vec2 lo{-gwidth_, -gheight_}, hi{gwidth_, 2.0 * gheight_};
      Vec2 best{0.0, 0.5 * gheight_};
      double best_d = clearance(best);
      for (int round = 0; round < 4; ++round) {
        const int m = 24;
        Vec2 nlo = lo, nhi = hi;
        for (int i = 0; i <= m; ++i)
          for (int j = 0; j <= m; ++j) {
            Vec2 p{lo.x + (hi.x - lo.x) * i / m, lo.y + (hi.y - lo.y) * j / m};
            const double d = clearance(p);
            if (d > best_d) {
              best_d = d;
              best = p;
            }
          }
        const double sx = (hi.x - lo.x) / m, sy = (hi.y - lo.y) / m;
        nlo = {best.x - 2.0 * sx, best.y - 2.0 * sy};
        nhi = {best.x + 2.0 * sx, best.y + 2.0 * sy};
        lo = nlo;
        hi = nhi;
      }
      return best_d;
    }
  }
  fail(ErrorKind::Argument, "unknown domain kind");
}

double Domain::faber_krahn_threshold() const {
  const double rho = inradius();
  return area_ - rho * rho * kPi;
}

double Domain::graph_anchor_param() const {
  if (kind_ != DomainKind::BoundaryGraph)
    fail(ErrorKind::Unsupported, "anchor parameter only for graph domains");
  const auto& cum = *arc_table_;
  const int n = static_cast<int>(cum.size()) - 1;
  return cum[n / 2];  // x = 0 is the table midpoint
}

BoundaryPoint Domain::boundary_point(double s) const {
  if (!std::isfinite(s)) fail(ErrorKind::Argument, "arc parameter not finite");
  s = wrap(s, boundary_length_);
  BoundaryPoint bp;
  bp.s = s;
  switch (kind_) {
    case DomainKind::Disk: {
      const double th = s / radius_;
      bp.position = {radius_ * std::cos(th), radius_ * std::sin(th)};
      bp.normal = {std::cos(th), std::sin(th)};
      bp.tangent = {-std::sin(th), std::cos(th)};
      return bp;
    }
    case DomainKind::Ellipse: {
      const double t = ellipse_angle_from_arc(s);
      bp.position = {a_ * std::cos(t), b_ * std::sin(t)};
      const double sp = ellipse_speed(t);
      bp.tangent = {-a_ * std::sin(t) / sp, b_ * std::cos(t) / sp};
      Vec2 nr{b_ * std::cos(t), a_ * std::sin(t)};
      const double nn = norm(nr);
      bp.normal = {nr.x / nn, nr.y / nn};
      return bp;
    }
    case DomainKind::Square: {
      const double L = side_;
      const int sideidx = std::min(3, static_cast<int>(s / L));
      const double u = s - sideidx * L;
      switch (sideidx) {
        case 0:
          bp.position = {u, 0.0};
          bp.normal = {0.0, -1.0};
          bp.tangent = {1.0, 0.0};
          break;
        case 1:
          bp.position = {L, u};
          bp.normal = {1.0, 0.0};
          bp.tangent = {0.0, 1.0};
          break;
        case 2:
          bp.position = {L - u, L};
          bp.normal = {0.0, 1.0};
          bp.tangent = {-1.0, 0.0};
          break;
        default:
          bp.position = {0.0, L - u};
          bp.normal = {-1.0, 0.0};
          bp.tangent = {0.0, -1.0};
          break;
      }
      return bp;
    }
    case DomainKind::BoundaryGraph: {
      const auto& cum = *arc_table_;
      const int n = static_cast<int>(cum.size()) - 1;
      const double graph_len = cum[n];
      const double right_len = gheight_ - g_(gwidth_);
      const double top_len = 2.0 * gwidth_;
      if (s <= graph_len) {
        // invert the cumulative graph arc length
        const auto it = std::upper_bound(cum.begin(), cum.end(), s);
        int idx = std::max(0, static_cast<int>(it - cum.begin()) - 1);
        idx = std::min(idx, n - 1);
        const double dx = 2.0 * gwidth_ / n;
        double x = -gwidth_ + idx * dx +
                   dx * (s - cum[idx]) /
                       std::max(cum[idx + 1] - cum[idx], 1e-300);
        for (int k = 0; k < 30; ++k) {
          const double gp = dg_(x);
          const double speed = std::sqrt(1.0 + gp * gp);
          // local arc-length defect
          const double si = cum[idx] +
                            [&] {
                              const double x0 = -gwidth_ + idx * dx;
                              double len = 0.0;
                              const double w = x - x0;
                              for (int q = 0; q < 5; ++q) {
                                const double xx =
                                    x0 + 0.5 * w * (1.0 + kGx[q]);
                                const double dp = dg_(xx);
                                len += kGw[q] * std::sqrt(1.0 + dp * dp);
                              }
                              return 0.5 * w * len;
                            }();
          const double step = (si - s) / speed;
          x -= step;
          if (std::abs(step) < 1e-14) break;
        }
        const double gp = dg_(x);
        const double sp = std::sqrt(1.0 + gp * gp);
        bp.position = {x, g_(x)};
        bp.tangent = {1.0 / sp, gp / sp};
        bp.normal = {gp / sp, -1.0 / sp};
        return bp;
      }
      double u = s - graph_len;
      if (u <= right_len) {
        bp.position = {gwidth_, g_(gwidth_) + u};
        bp.normal = {1.0, 0.0};
        bp.tangent = {0.0, 1.0};
        return bp;
      }
      u -= right_len;
      if (u <= top_len) {
        bp.position = {gwidth_ - u, gheight_};
        bp.normal = {0.0, 1.0};
        bp.tangent = {-1.0, 0.0};
        return bp;
      }
      u -= top_len;
      bp.position = {-gwidth_, gheight_ - u};
      bp.normal = {-1.0, 0.0};
      bp.tangent = {0.0, -1.0};
      return bp;
    }
  }
  fail(ErrorKind::Argument, "unknown domain kind");
}

Vec2 Domain::project_to_boundary(Vec2 p) const {
  switch (kind_) {
    case DomainKind::Disk: {
      const double r = norm(p);
      if (r == 0.0) return {radius_, 0.0};
      return {radius_ * p.x / r, radius_ * p.y / r};
    }
    case DomainKind::Ellipse: {
      double t = std::atan2(p.y / b_, p.x / a_);
      for (int k = 0; k < 60; ++k) {
        const Vec2 c{a_ * std::cos(t), b_ * std::sin(t)};
        const Vec2 d1{-a_ * std::sin(t), b_ * std::cos(t)};
        const Vec2 d2{-a_ * std::cos(t), -b_ * std::sin(t)};
        const double f = dot(c - p, d1);
        const double fp = dot(d1, d1) + dot(c - p, d2);
        if (std::abs(fp) < 1e-300) break;
        const double step = f / fp;
        t -= step;
        if (std::abs(step) < 1e-15) break;
      }
      return {a_ * std::cos(t), b_ * std::sin(t)};
    }
    case DomainKind::Square: {
      const double L = side_;
      Vec2 q{std::clamp(p.x, 0.0, L), std::clamp(p.y, 0.0, L)};
      const bool inside =
          p.x > 0.0 && p.x < L && p.y > 0.0 && p.y < L;
      if (!inside) return q;
      const double d[4] = {q.y, L - q.x, L - q.y, q.x};
      const int k = static_cast<int>(std::min_element(d, d + 4) - d);
      switch (k) {
        case 0: return {q.x, 0.0};
        case 1: return {L, q.y};
        case 2: return {q.x, L};
        default: return {0.0, q.y};
      }
    }
    case DomainKind::BoundaryGraph: {
      const int nb = 4096;
      double bd = std::numeric_limits<double>::max();
      Vec2 best{};
      for (int i = 0; i < nb; ++i) {
        const Vec2 q = boundary_point(boundary_length_ * i / nb).position;
        const double d = dist(p, q);
        if (d < bd) {
          bd = d;
          best = q;
        }
      }
      return best;
    }
  }
  fail(ErrorKind::Argument, "unknown domain kind");
}

double Domain::boundary_param(Vec2 p) const {
  switch (kind_) {
    case DomainKind::Disk:
      return wrap(radius_ * std::atan2(p.y, p.x), boundary_length_);
    case DomainKind::Ellipse: {
      const Vec2 q = project_to_boundary(p);
      const double t = std::atan2(q.y / b_, q.x / a_);
      return ellipse_arc_from_angle(t);
    }
    case DomainKind::Square: {
      const Vec2 q = project_to_boundary(p);
      const double L = side_;
      const double d[4] = {q.y, L - q.x, L - q.y, q.x};
      const int k = static_cast<int>(std::min_element(d, d + 4) - d);
      switch (k) {
        case 0: return wrap(q.x, boundary_length_);
        case 1: return wrap(L + q.y, boundary_length_);
        case 2: return wrap(3.0 * L - q.x, boundary_length_);
        default: return wrap(4.0 * L - q.y, boundary_length_);
      }
    }
    case DomainKind::BoundaryGraph: {
      const int nb = 4096;
      double bd = std::numeric_limits<double>::max();
      double bs = 0.0;
      for (int i = 0; i < nb; ++i) {
        const double s = boundary_length_ * i / nb;
        const double d = dist(p, boundary_point(s).position);
        if (d < bd) {
          bd = d;
          bs = s;
        }
      }
      return bs;
    }
  }
  fail(ErrorKind::Argument, "unknown domain kind");
}

double Domain::level(Vec2 p) const {
  switch (kind_) {
    case DomainKind::Disk:
      return radius_ * radius_ - p.x * p.x - p.y * p.y;
    case DomainKind::Ellipse:
      return 1.0 - p.x * p.x / (a_ * a_) - p.y * p.y / (b_ * b_);
    case DomainKind::Square:
      return std::min(std::min(p.x, side_ - p.x),
                      std::min(p.y, side_ - p.y));
    case DomainKind::BoundaryGraph:
      return p.y - g_(p.x);
  }
  fail(ErrorKind::Argument, "unknown domain kind");
}

Vec2 Domain::level_gradient(Vec2 p) const {
  switch (kind_) {
    case DomainKind::Disk:
      return {-2.0 * p.x, -2.0 * p.y};
    case DomainKind::Ellipse:
      return {-2.0 * p.x / (a_ * a_), -2.0 * p.y / (b_ * b_)};
    case DomainKind::Square: {
      const double d[4] = {p.y, side_ - p.x, side_ - p.y, p.x};
      const int k = static_cast<int>(std::min_element(d, d + 4) - d);
      switch (k) {
        case 0: return {0.0, 1.0};
        case 1: return {-1.0, 0.0};
        case 2: return {0.0, -1.0};
        default: return {1.0, 0.0};
      }
    }
    case DomainKind::BoundaryGraph:
      return {-dg_(p.x), 1.0};
  }
  fail(ErrorKind::Argument, "unknown domain kind");
}

// ---------------------------------------------------------------------------
// StraighteningMap

StraighteningMap::StraighteningMap(const Domain& domain, double s0, double r0)
    : domain_(domain) {
  anchor_ = domain_.boundary_point(s0);
  e1_ = anchor_.tangent;
  e2_ = {-anchor_.normal.x, -anchor_.normal.y};

  double cap = 0.25 * domain_.boundary_length();
  switch (domain_.kind()) {
    case DomainKind::Disk:
      cap = std::min(cap, 0.7 * domain_.param_radius());
      break;
    case DomainKind::Ellipse: {
      // smallest curvature radius of the ellipse
      const double a = domain_.param_a(), b = domain_.param_b();
      const double rc = std::min(a, b) * std::min(a, b) / std::max(a, b);
      cap = std::min(cap, 0.7 * rc);
      break;
    }
    case DomainKind::Square: {
      const double L = domain_.param_side();
      const double u = std::fmod(anchor_.s, L);
      const double corner = std::min(u, L - u);
      if (corner <= 1e-12)
        fail(ErrorKind::Numeric,
             "straightening cannot be anchored at a square corner");
      cap = std::min(cap, 0.9 * corner);
      break;
    }
    case DomainKind::BoundaryGraph:
      break;
  }
  if (domain_.kind() == DomainKind::BoundaryGraph) {
    const double x0 = anchor_.position.x;
    const double w = domain_.graph_width();
    const double corner = std::min(w - x0, x0 + w);
    if (corner <= 1e-12)
      fail(ErrorKind::Numeric, "anchor too close to the graph edge");
    cap = std::min(cap, 0.9 * corner);
  }
  r0_ = (r0 > 0.0) ? r0 : cap;
  if (!(r0_ > 0.0)) fail(ErrorKind::Argument, "initial radius must be positive");

  double r = r0_;
  for (int k = 0; k < 40; ++k) {
    if (validate(r)) {
      r1_ = r;
      return;
    }
    r *= 0.5;
  }
  fail(ErrorKind::Numeric,
       "straightening construction failed: no valid radius at this anchor");
}

Vec2 StraighteningMap::to_local(Vec2 x) const {
  const Vec2 d = x - anchor_.position;
  return {dot(d, e1_), dot(d, e2_)};
}

Vec2 StraighteningMap::to_world(Vec2 y) const {
  return anchor_.position + y.x * e1_ + y.y * e2_;
}

double StraighteningMap::graph(double t) const {
  double u = 0.0;
  for (int it = 0; it < 80; ++it) {
    const Vec2 p = to_world({t, u});
    const double L = domain_.level(p);
    const double dLdu = dot(domain_.level_gradient(p), e2_);
    if (std::abs(dLdu) < 1e-300)
      fail(ErrorKind::Numeric, "degenerate level gradient in local graph");
    const double step = L / dLdu;
    u -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(u))) return u;
  }
  fail(ErrorKind::Numeric, "local graph solve did not converge");
}

double StraighteningMap::graph_d1(double t) const {
  const double u = graph(t);
  const Vec2 p = to_world({t, u});
  const Vec2 gL = domain_.level_gradient(p);
  const double den = dot(gL, e2_);
  if (std::abs(den) < 1e-300)
    fail(ErrorKind::Numeric, "degenerate level gradient in local graph");
  return -dot(gL, e1_) / den;
}

double StraighteningMap::graph_d2(double t) const {
  const double dt = 1e-6;
  return (graph_d1(t + dt) - graph_d1(t - dt)) / (2.0 * dt);
}

Vec2 StraighteningMap::forward(Vec2 y) const {
  const double gp = graph_d1(y.x);
  const double g0 = graph(y.x);
  return to_world({y.x - y.y * gp, y.y + g0});
}

double StraighteningMap::jacobian_det(Vec2 y) const {
  const double gp = graph_d1(y.x);
  const double gpp = graph_d2(y.x);
  return 1.0 - y.y * gpp + gp * gp;
}

std::optional<Vec2> StraighteningMap::inverse(Vec2 x) const {
  const Vec2 loc = to_local(x);
  Vec2 y{loc.x, 0.0};
  {
    // initial guess: undo the vertical shift at the local abscissa
    const double g0 = graph(loc.x);
    y = {loc.x, loc.y - g0};
  }
  for (int it = 0; it < 60; ++it) {
    const double gp = graph_d1(y.x);
    const double g0 = graph(y.x);
    const double gpp = graph_d2(y.x);
    const Vec2 f{y.x - y.y * gp - loc.x, y.y + g0 - loc.y};
    // DF = [[1 - y2 g'', -g'], [g', 1]]
    const double a11 = 1.0 - y.y * gpp, a12 = -gp, a21 = gp, a22 = 1.0;
    const double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-14) return std::nullopt;
    const Vec2 step{(a22 * f.x - a12 * f.y) / det,
                    (-a21 * f.x + a11 * f.y) / det};
    y = y - step;
    if (std::abs(y.x) > 4.0 * r0_ + 1.0 || std::abs(y.y) > 4.0 * r0_ + 1.0)
      return std::nullopt;
    if (std::abs(step.x) + std::abs(step.y) <=
        1e-14 * std::max(1.0, std::abs(y.x) + std::abs(y.y)))
      return y;
  }
  return std::nullopt;
}

bool StraighteningMap::validate(double r) {
  const int n = 50;
  double maxdf = 0.0, maxdg = 0.0;
  try {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Vec2 y{-r + 2.0 * r * i / n, r * j / n};
        if (y.x * y.x + y.y * y.y > r * r) continue;
        const double det = jacobian_det(y);
        if (!(det > 0.0)) return false;
        maxdf = std::max(maxdf, det);
        maxdg = std::max(maxdg, 1.0 / det);
        const Vec2 x = forward(y);
        // image must stay inside the closed domain (first-order signed dist)
        const double lv = domain_.level(x);
        const double gn = norm(domain_.level_gradient(x));
        if (gn > 0.0 && lv / gn < -1e-8 * std::max(1.0, r)) return false;
        const auto back = inverse(x);
        if (!back) return false;
        if (dist(*back, y) > 1e-8) return false;
      }
    }
  } catch (const Error&) {
    return false;
  }
  max_det_f_ = maxdf;
  max_det_g_ = maxdg;
  return true;
}

// ---------------------------------------------------------------------------
// Bump profiles and regions

BumpProfile BumpProfile::cos2() {
  BumpProfile p;
  p.name = "cos2";
  p.h = [](double u) {
    if (std::abs(u) > 0.5) return 0.0;
    const double c = std::cos(kPi * u);
    return c * c;
  };
  p.volume = 0.5;
  return p;
}

BumpProfile BumpProfile::poly4() {
  BumpProfile p;
  p.name = "poly4";
  p.h = [](double u) {
    if (std::abs(u) > 0.5) return 0.0;
    const double w = 1.0 - 4.0 * u * u;
    return w * w;
  };
  p.volume = 8.0 / 15.0;
  return p;
}

BumpProfile BumpProfile::by_name(const std::string& name) {
  if (name == "cos2") return cos2();
  if (name == "poly4") return poly4();
  fail(ErrorKind::Argument, "unknown bump profile '" + name + "'");
}

double BumpObstacleSpec::eta_hat() const {
  const double two_eta_hat =
      std::min(width, width * width * profile.volume * std::sqrt(3.0) / 2.0);
  return 0.5 * two_eta_hat;
}

double BumpObstacleSpec::height(double eta, double y1) const {
  return (eta / (width * profile.volume)) * profile.h(y1 / width);
}

StraightRegion bump_region(const BumpObstacleSpec& spec, double eta) {
  if (!(spec.width > 0.0)) fail(ErrorKind::Argument, "bump width must be positive");
  if (eta < 0.0 || eta >= 2.0 * spec.eta_hat())
    fail(ErrorKind::Argument, "eta outside the admissible range");
  StraightRegion r;
  r.width = spec.width;
  r.eta = eta;
  r.height = [spec, eta](double y1) { return spec.height(eta, y1); };
  return r;
}

bool StraightRegion::contains(Vec2 y) const {
  if (std::abs(y.x) > width) return false;
  if (y.y < -1e-12) return false;
  return y.y <= height(y.x) + 1e-12;
}

double mapped_region_area(const BumpObstacleSpec& spec,
                          const StraighteningMap& map, double eta,
                          int columns) {
  if (eta <= 0.0) return 0.0;
  // integrate |det DF| over R_{r,eta}; the integrand is linear in y2, so each
  // column contributes (1 + g'^2) T - g'' T^2 / 2 exactly
  const double r = spec.width;
  const double half = 0.5 * r;  // profile support
  const double dy = 2.0 * half / columns;
  double area = 0.0;
  for (int i = 0; i < columns; ++i) {
    const double y1 = -half + (i + 0.5) * dy;
    const double T = spec.height(eta, y1);
    if (T <= 0.0) continue;
    const double gp = map.graph_d1(y1);
    const double gpp = map.graph_d2(y1);
    const double col = (1.0 + gp * gp) * T - 0.5 * gpp * T * T;
    if (!(col > -1e-14))
      fail(ErrorKind::Numeric, "Jacobian not positive over the bump region");
    area += col * dy;
  }
  return area;
}

double match_volume(const BumpObstacleSpec& spec, const StraighteningMap& map) {
  const double eps = spec.target_volume;
  if (eps < 0.0) fail(ErrorKind::Argument, "target volume must be nonnegative");
  if (eps == 0.0) return 0.0;
  if (spec.width > map.validity_radius())
    fail(ErrorKind::Argument,
         "bump width exceeds the straightening validity radius");
  const double ehat = spec.eta_hat();
  const double reachable = mapped_region_area(spec, map, ehat);
  if (eps > reachable)
    fail(ErrorKind::Range,
         "target volume exceeds the reachable volume at this width; enlarge "
         "the width");
  double lo = std::max(0.0, 0.99 * eps / map.max_det_forward());
  double hi = std::min(ehat, 1.01 * eps * map.max_det_inverse());
  // make sure the bracket straddles the target
  for (int k = 0; k < 60 && mapped_region_area(spec, map, lo) > eps; ++k)
    lo *= 0.5;
  for (int k = 0; k < 60 && hi < ehat && mapped_region_area(spec, map, hi) < eps;
       ++k)
    hi = std::min(ehat, 1.25 * hi);
  double eta = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    eta = 0.5 * (lo + hi);
    const double a = mapped_region_area(spec, map, eta);
    if (std::abs(a - eps) <= 1e-6 * eps) return eta;
    if (a < eps)
      lo = eta;
    else
      hi = eta;
  }
  const double a = mapped_region_area(spec, map, eta);
  if (std::abs(a - eps) <= 1e-5 * eps) return eta;
  fail(ErrorKind::Numeric, "volume-matching bisection did not converge");
}

// ---------------------------------------------------------------------------
// ObstacleRegion

ObstacleRegion ObstacleRegion::bump(const BumpObstacleSpec& spec,
                                    const StraighteningMap& map) {
  ObstacleRegion reg;
  reg.parametric_ = true;
  reg.spec_ = std::make_shared<BumpObstacleSpec>(spec);
  reg.map_ = std::make_shared<StraighteningMap>(map);
  reg.eta_ = match_volume(spec, map);
  reg.volume_ = spec.target_volume;
  reg.bound_center_ = map.anchor().position;
  double br = 0.0;
  for (const auto& q : reg.boundary_samples(256))
    br = std::max(br, dist(q, reg.bound_center_));
  reg.bound_radius_ = 1.1 * br + 1e-12;
  return reg;
}

ObstacleRegion ObstacleRegion::cells(std::vector<std::array<Vec2, 3>> triangles) {
  ObstacleRegion reg;
  reg.parametric_ = false;
  reg.tris_ = std::move(triangles);
  double area = 0.0;
  for (const auto& t : reg.tris_)
    area += 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
  reg.volume_ = area;
  return reg;
}

bool ObstacleRegion::contains(Vec2 x) const {
  if (parametric_) {
    if (dist(x, bound_center_) > bound_radius_ + spec_->width) return false;
    const auto y = map_->inverse(x);
    if (!y) return false;
    if (std::abs(y->x) > spec_->width) return false;
    if (y->y < -1e-12) return false;
    return y->y <= spec_->height(eta_, y->x) + 1e-12;
  }
  for (const auto& t : tris_) {
    const double d1 = cross(t[1] - t[0], x - t[0]);
    const double d2 = cross(t[2] - t[1], x - t[1]);
    const double d3 = cross(t[0] - t[2], x - t[2]);
    const double tol = -1e-12;
    if (d1 >= tol && d2 >= tol && d3 >= tol) return true;
  }
  return false;
}

double ObstacleRegion::quadrature_volume(int n) const {
  if (!parametric_) return volume_;  // cell areas are exact
  const auto samples = boundary_samples(512);
  double x0 = samples[0].x, x1 = samples[0].x, y0 = samples[0].y,
         y1 = samples[0].y;
  for (const auto& q : samples) {
    x0 = std::min(x0, q.x);
    x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y);
    y1 = std::max(y1, q.y);
  }
  const double mx = 0.02 * (x1 - x0) + 1e-12, my = 0.02 * (y1 - y0) + 1e-12;
  x0 -= mx;
  x1 += mx;
  y0 -= my;
  y1 += my;
  const double cw = (x1 - x0) / n, ch = (y1 - y0) / n;
  long hits = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (contains({x0 + (i + 0.5) * cw, y0 + (j + 0.5) * ch})) ++hits;
  return hits * cw * ch;
}

std::vector<Vec2> ObstacleRegion::boundary_samples(int n) const {
  std::vector<Vec2> out;
  if (parametric_) {
    const double r = spec_->width;
    const int ntop = n / 2, nbase = n - n / 2;
    out.reserve(n);
    for (int i = 0; i < ntop; ++i) {
      const double y1 = -0.5 * r + r * (i + 0.5) / ntop;
      out.push_back(map_->forward({y1, spec_->height(eta_, y1)}));
    }
    for (int i = 0; i < nbase; ++i) {
      const double y1 = -r + 2.0 * r * (i + 0.5) / nbase;
      out.push_back(map_->forward({y1, 0.0}));
    }
    return out;
  }
  // free form: edges that appear exactly once bound the cell union
  std::map<std::pair<std::pair<double, double>, std::pair<double, double>>, int>
      count;
  auto key = [](Vec2 a, Vec2 b) {
    auto pa = std::make_pair(a.x, a.y);
    auto pb = std::make_pair(b.x, b.y);
    return pa < pb ? std::make_pair(pa, pb) : std::make_pair(pb, pa);
  };
  for (const auto& t : tris_)
    for (int e = 0; e < 3; ++e) ++count[key(t[e], t[(e + 1) % 3])];
  for (const auto& [k, c] : count) {
    if (c != 1) continue;
    const Vec2 a{k.first.first, k.first.second};
    const Vec2 b{k.second.first, k.second.second};
    out.push_back(a);
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::vector<std::pair<Vec2, double>> ObstacleRegion::mass_points() const {
  std::vector<std::pair<Vec2, double>> pts;
  if (parametric_) {
    const double r = spec_->width;
    const int m = 128, nv = 16;
    const double dy1 = r / m;  // support width r
    for (int i = 0; i < m; ++i) {
      const double y1 = -0.5 * r + (i + 0.5) * dy1;
      const double T = spec_->height(eta_, y1);
      if (T <= 0.0) continue;
      for (int j = 0; j < nv; ++j) {
        const Vec2 y{y1, T * (j + 0.5) / nv};
        pts.emplace_back(map_->forward(y),
                         map_->jacobian_det(y) * dy1 * T / nv);
      }
    }
    return pts;
  }
  for (const auto& t : tris_) {
    const double area = 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
    pts.emplace_back((1.0 / 3.0) * (t[0] + t[1] + t[2]), area);
  }
  return pts;
}

double ObstacleRegion::anchor_param() const {
  if (!parametric_) fail(ErrorKind::Argument, "anchor only for bump regions");
  return spec_->anchor_s;
}

double ObstacleRegion::width() const {
  if (!parametric_) fail(ErrorKind::Argument, "width only for bump regions");
  return spec_->width;
}

double ObstacleRegion::eta() const {
  if (!parametric_) fail(ErrorKind::Argument, "eta only for bump regions");
  return eta_;
}

const BumpObstacleSpec& ObstacleRegion::spec() const {
  if (!parametric_) fail(ErrorKind::Argument, "spec only for bump regions");
  return *spec_;
}

const StraighteningMap& ObstacleRegion::map() const {
  if (!parametric_) fail(ErrorKind::Argument, "map only for bump regions");
  return *map_;
}

std::string ObstacleRegion::to_json() const {
  nlohmann::json j;
  if (parametric_) {
    j["type"] = "bump";
    j["params"] = {{"anchor_s", spec_->anchor_s},
                   {"width", spec_->width},
                   {"profile", spec_->profile.name},
                   {"eta", eta_}};
  } else {
    j["type"] = "cells";
    j["params"] = {{"cell_count", tris_.size()}};
  }
  j["volume"] = volume_;
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& q : boundary_samples(512))
    samples.push_back({q.x, q.y});
  j["boundary_samples"] = samples;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Hausdorff distances

double directed_hausdorff(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty())
    fail(ErrorKind::Argument, "Hausdorff distance of an empty set");
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::max();
    for (const auto& q : b) best = std::min(best, dist(p, q));
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff_distance(const PointSet& a, const PointSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace eigenobs
