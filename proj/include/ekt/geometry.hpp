#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "ekt/space.hpp"

namespace ekt {

// ---------------------------------------------------------------------------
// Chart domains and the conformal factor of the base surface M^2(kappa).
// ---------------------------------------------------------------------------

/// Conformal factor of the disk model of M^2(kappa) at (x,y).
inline Real lambda_kappa(Real kappa, Real x, Real y) {
  const Real den = 1.0 + 0.25 * kappa * (x * x + y * y);
  if (!(den > 0.0)) throw DomainError("point outside Omega_kappa");
  return 1.0 / den;
}

inline bool in_domain(const Chart& chart, const Vec3& p) {
  switch (chart.tag) {
    case ChartTag::Cartan:
    case ChartTag::BergerSphere:
      return 1.0 + 0.25 * chart.metric_kappa() * (p.x() * p.x() + p.y() * p.y()) > 0.0;
    case ChartTag::HalfSpace:
      return p.y() > 0.0;
    case ChartTag::ConformalProduct:
      return p.squaredNorm() > 0.0;
  }
  return false;
}

inline void require_domain(const Chart& chart, const Vec3& p) {
  if (!in_domain(chart, p)) throw DomainError("point outside chart domain");
}

// ---------------------------------------------------------------------------
// Metric, analytic metric derivatives, Christoffel symbols.
// ---------------------------------------------------------------------------

/// Chart metric in the coordinate basis (dx, dy, dz).
inline Mat3 metric_at(const AmbientPoint& p) {
  const Chart& c = p.chart;
  require_domain(c, p.coords);
  const Real kappa = c.metric_kappa(), tau = c.metric_tau();
  Mat3 g;
  switch (c.tag) {
    case ChartTag::Cartan:
    case ChartTag::BergerSphere: {
      const Real x = p.coords.x(), y = p.coords.y();
      const Real lam = lambda_kappa(kappa, x, y);
      const Real a = tau * lam * y, b = -tau * lam * x;  // dz + a dx + b dy
      g << lam * lam + a * a, a * b, a,
           a * b, lam * lam + b * b, b,
           a, b, 1.0;
      return g;
    }
    case ChartTag::HalfSpace: {
      const Real y = p.coords.y(), s2 = -kappa;
      const Real q = 1.0 / (s2 * y * y), cc = 2.0 * tau / (kappa * y);
      g << q + cc * cc, 0.0, cc,
           0.0, q, 0.0,
           cc, 0.0, 1.0;
      return g;
    }
    case ChartTag::ConformalProduct: {
      const Real r2 = p.coords.squaredNorm();
      return Mat3::Identity() / r2;
    }
  }
  throw UnsupportedChart("metric_at");
}

/// Analytic coordinate derivatives of the metric: out[k] = d g / d x^k.
inline std::array<Mat3, 3> metric_derivs_at(const AmbientPoint& p) {
  const Chart& c = p.chart;
  require_domain(c, p.coords);
  const Real kappa = c.metric_kappa(), tau = c.metric_tau();
  std::array<Mat3, 3> dg{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  switch (c.tag) {
    case ChartTag::Cartan:
    case ChartTag::BergerSphere: {
      const Real x = p.coords.x(), y = p.coords.y();
      const Real lam = lambda_kappa(kappa, x, y);
      const Real lx = -lam * lam * 0.5 * kappa * x, ly = -lam * lam * 0.5 * kappa * y;
      const Real a = tau * lam * y, b = -tau * lam * x;
      const Real ax = tau * lx * y, ay = tau * (lam + ly * y);
      const Real bx = -tau * (lam + lx * x), by = -tau * ly * x;
      auto fill = [&](Mat3& m, Real dl, Real da, Real db) {
        m << 2.0 * lam * dl + 2.0 * a * da, da * b + a * db, da,
             da * b + a * db, 2.0 * lam * dl + 2.0 * b * db, db,
             da, db, 0.0;
      };
      fill(dg[0], lx, ax, bx);
      fill(dg[1], ly, ay, by);
      return dg;
    }
    case ChartTag::HalfSpace: {
      const Real y = p.coords.y(), s2 = -kappa;
      const Real cc = 2.0 * tau / (kappa * y);
      const Real qy = -2.0 / (s2 * y * y * y), cy = -2.0 * tau / (kappa * y * y);
      dg[1] << qy + 2.0 * cc * cy, 0.0, cy,
               0.0, qy, 0.0,
               cy, 0.0, 0.0;
      return dg;
    }
    case ChartTag::ConformalProduct: {
      const Real r2 = p.coords.squaredNorm();
      for (int k = 0; k < 3; ++k) dg[k] = (-2.0 * p.coords[k] / (r2 * r2)) * Mat3::Identity();
      return dg;
    }
  }
  throw UnsupportedChart("metric_derivs_at");
}

/// Central-difference metric derivatives; cross-check for the analytic path.
inline std::array<Mat3, 3> metric_derivs_fd(const AmbientPoint& p, Real scale = 1e-6) {
  std::array<Mat3, 3> dg;
  const Real h = scale * (1.0 + p.coords.norm());
  for (int k = 0; k < 3; ++k) {
    Vec3 hi = p.coords, lo = p.coords;
    hi[k] += h;
    lo[k] -= h;
    dg[k] = (metric_at({p.chart, hi}) - metric_at({p.chart, lo})) / (2.0 * h);
  }
  return dg;
}

/// Christoffel symbols Gamma[k](i,j) of the chart metric.
inline std::array<Mat3, 3> christoffels_at(const AmbientPoint& p) {
  const Mat3 g = metric_at(p);
  const std::array<Mat3, 3> dg = metric_derivs_at(p);
  const Mat3 ginv = g.inverse();
  std::array<Mat3, 3> gamma{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Real sum = 0.0;
        for (int l = 0; l < 3; ++l)
          sum += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * sum;
      }
  return gamma;
}

// ---------------------------------------------------------------------------
// Inner products, Killing field, frames, cross product.
// ---------------------------------------------------------------------------

inline Real inner(const TangentVector& u, const TangentVector& v) {
  return u.components.dot(metric_at(u.base) * v.components);
}

inline Real norm(const TangentVector& u) { return std::sqrt(inner(u, u)); }

/// Coordinate components of the unit Killing field xi at p.
inline Vec3 killing_at(const AmbientPoint& p) {
  if (p.chart.tag == ChartTag::ConformalProduct) return p.coords;  // radial, unit in g
  return Vec3(0.0, 0.0, 1.0);
}

/// Closed-form orthonormal frame (E1, E2, E3 = xi); Cartan and HalfSpace only.
inline FramePacket frame_at(const AmbientPoint& p) {
  const Chart& c = p.chart;
  require_domain(c, p.coords);
  const Real kappa = c.metric_kappa(), tau = c.metric_tau();
  FramePacket f;
  switch (c.tag) {
    case ChartTag::Cartan:
    case ChartTag::BergerSphere: {
      const Real x = p.coords.x(), y = p.coords.y();
      const Real lam = lambda_kappa(kappa, x, y);
      f.E1 = {p, Vec3(1.0 / lam, 0.0, -tau * y)};
      f.E2 = {p, Vec3(0.0, 1.0 / lam, tau * x)};
      f.E3 = {p, Vec3(0.0, 0.0, 1.0)};
      return f;
    }
    case ChartTag::HalfSpace: {
      const Real y = p.coords.y(), s = std::sqrt(-kappa);
      f.E1 = {p, Vec3(s * y, 0.0, 2.0 * tau / s)};
      f.E2 = {p, Vec3(0.0, s * y, 0.0)};
      f.E3 = {p, Vec3(0.0, 0.0, 1.0)};
      return f;
    }
    default:
      throw UnsupportedChart("frame_at: no closed-form frame for this chart");
  }
}

/// Metric cross product: <u x v, w> = vol(u, v, w), with the volume form of
/// the coordinate orientation (the frames above are positively oriented).
inline TangentVector cross(const TangentVector& u, const TangentVector& v) {
  const Mat3 g = metric_at(u.base);
  const Vec3 e = u.components.cross(v.components);
  const Real sq = std::sqrt(g.determinant());
  return {u.base, sq * g.inverse() * e};
}

/// Orthonormal fallback frame with E3 = xi, available on every chart;
/// E2 = E3 x E1 keeps the coordinate orientation.
inline FramePacket gram_schmidt_frame(const AmbientPoint& p) {
  const Mat3 g = metric_at(p);
  auto dot = [&](const Vec3& a, const Vec3& b) { return a.dot(g * b); };
  Vec3 e3 = killing_at(p);
  e3 /= std::sqrt(dot(e3, e3));
  Vec3 e1 = Vec3::UnitX();
  if (std::abs(dot(e1, e3)) > 0.9 * std::sqrt(dot(e1, e1))) e1 = Vec3::UnitY();
  for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize once
    e1 -= dot(e1, e3) * e3;
    e1 /= std::sqrt(dot(e1, e1));
  }
  Vec3 e2 = cross({p, e3}, {p, e1}).components;
  e2 /= std::sqrt(dot(e2, e2));
  return FramePacket{{p, e1}, {p, e2}, {p, e3}};
}

// ---------------------------------------------------------------------------
// Covariant derivative.
// ---------------------------------------------------------------------------

using VectorField = std::function<Vec3(const Vec3&)>;  // coordinate components

namespace detail {

/// Connection coefficients in the closed-form frame: nabla_{E_i} E_j =
/// sum_k table(i,j,k) E_k.
inline std::array<Mat3, 3> frame_connection_table(const AmbientPoint& p) {
  const Chart& c = p.chart;
  const Real kappa = c.metric_kappa(), tau = c.metric_tau();
  // table[i](j,k): coefficient of E_k in nabla_{E_i} E_j
  std::array<Mat3, 3> t{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  if (c.tag == ChartTag::Cartan || c.tag == ChartTag::BergerSphere) {
    const Real kx = 0.5 * kappa * p.coords.x(), ky = 0.5 * kappa * p.coords.y();
    t[0](0, 1) = ky;
    t[0](1, 0) = -ky;
    t[0](1, 2) = tau;
    t[0](2, 1) = -tau;
    t[1](0, 1) = -kx;
    t[1](0, 2) = -tau;
    t[1](1, 0) = kx;
    t[1](2, 0) = tau;
    t[2](0, 1) = -tau;
    t[2](1, 0) = tau;
  } else if (c.tag == ChartTag::HalfSpace) {
    const Real s = std::sqrt(-kappa);
    t[0](0, 1) = s;
    t[0](1, 0) = -s;
    t[0](1, 2) = tau;
    t[0](2, 1) = -tau;
    t[1](0, 2) = -tau;
    t[1](2, 0) = tau;
    t[2](0, 1) = -tau;
    t[2](1, 0) = tau;
  } else {
    throw UnsupportedChart("frame connection table");
  }
  return t;
}

inline Vec3 frame_coefficients(const FramePacket& f, const Vec3& v) {
  Mat3 cols;
  cols.col(0) = f.E1.components;
  cols.col(1) = f.E2.components;
  cols.col(2) = f.E3.components;
  return cols.colPivHouseholderQr().solve(v);
}

}  // namespace detail

/// nabla_X Y for a coordinate-component field Y. Cartan/HalfSpace use the
/// closed-form frame and its connection table; other charts use Christoffel
/// symbols from the analytic metric derivatives. Field samples are taken on
/// a central-difference stencil around the base point.
inline TangentVector covariant_derivative(const TangentVector& X, const VectorField& Y,
                                          Real fd_scale = 1e-6) {
  const AmbientPoint& p = X.base;
  const Real h = fd_step(p.coords.norm(), fd_scale);
  auto sample = [&](const Vec3& q) {
    if (!in_domain(p.chart, q)) throw DomainError("covariant_derivative stencil left the chart");
    return Y(q);
  };
  if (p.chart.tag == ChartTag::Cartan || p.chart.tag == ChartTag::BergerSphere ||
      p.chart.tag == ChartTag::HalfSpace) {
    const FramePacket f = frame_at(p);
    const auto table = detail::frame_connection_table(p);
    const Vec3 xc = detail::frame_coefficients(f, X.components);
    const std::array<Vec3, 3> frame_dirs{f.E1.components, f.E2.components, f.E3.components};
    Vec3 out = Vec3::Zero();
    const Vec3 y0 = detail::frame_coefficients(f, sample(p.coords));
    Mat3 basis;
    basis.col(0) = f.E1.components;
    basis.col(1) = f.E2.components;
    basis.col(2) = f.E3.components;
    for (int i = 0; i < 3; ++i) {
      if (xc[i] == 0.0) continue;
      // directional derivative of the frame coefficients of Y along E_i
      const Vec3 qp = p.coords + h * frame_dirs[i], qm = p.coords - h * frame_dirs[i];
      const Vec3 yp = detail::frame_coefficients(frame_at({p.chart, qp}), sample(qp));
      const Vec3 ym = detail::frame_coefficients(frame_at({p.chart, qm}), sample(qm));
      const Vec3 dy = (yp - ym) / (2.0 * h);
      Vec3 coeff = dy;
      for (int j = 0; j < 3; ++j) coeff += y0[j] * table[i].row(j).transpose();
      out += xc[i] * (basis * coeff);
    }
    return {p, out};
  }
  const auto gamma = christoffels_at(p);
  Vec3 out = Vec3::Zero();
  const Vec3 y0 = sample(p.coords);
  for (int i = 0; i < 3; ++i) {
    Vec3 qp = p.coords, qm = p.coords;
    qp[i] += h;
    qm[i] -= h;
    const Vec3 dy = (sample(qp) - sample(qm)) / (2.0 * h);
    out += X.components[i] * dy;
  }
  for (int k = 0; k < 3; ++k) out[k] += X.components.dot(gamma[k] * y0);
  return {p, out};
}

// ---------------------------------------------------------------------------
// Curvature.
// ---------------------------------------------------------------------------

/// Closed-form curvature tensor R(X,Y,Z,W) of E(kappa,tau):
///   -tau^2 <XxY, ZxW> - (kappa - 4 tau^2) <XxY, xi> <ZxW, xi>.
inline Real curvature(const TangentVector& X, const TangentVector& Y, const TangentVector& Z,
                      const TangentVector& W) {
  const AmbientPoint& p = X.base;
  const Real kappa = p.chart.metric_kappa(), tau = p.chart.metric_tau();
  const TangentVector xy = cross(X, Y), zw = cross(Z, W);
  const TangentVector xi{p, killing_at(p)};
  return -tau * tau * inner(xy, zw) -
         (kappa - 4.0 * tau * tau) * inner(xy, xi) * inner(zw, xi);
}

/// Sectional curvature of span(X, Y).
inline Real sectional_curvature(const TangentVector& X, const TangentVector& Y) {
  const Real gram = inner(X, X) * inner(Y, Y) - inner(X, Y) * inner(X, Y);
  if (gram < 1e-14) throw DegenerateImmersion("sectional curvature of a degenerate plane");
  return -curvature(X, Y, X, Y) / gram;
}

inline Real scalar_curvature(const AmbientPoint& p) {
  const FramePacket f = (p.chart.tag == ChartTag::ConformalProduct) ? gram_schmidt_frame(p)
                                                                    : frame_at(p);
  return 2.0 * (sectional_curvature(f.E1, f.E2) + sectional_curvature(f.E1, f.E3) +
                sectional_curvature(f.E2, f.E3));
}

// ---------------------------------------------------------------------------
// Base geodesics of M^2(kappa) in disk-model coordinates (closed form).
// ---------------------------------------------------------------------------

namespace detail {

/// Embedding of the disk model into the round sphere / hyperboloid of
/// curvature kappa (plane for kappa = 0), plus its differential.
struct BaseModel {
  Real kappa, m;  // m = sqrt(|kappa|)
  explicit BaseModel(Real k) : kappa(k), m(std::sqrt(std::abs(k))) {}

  Vec3 embed(Real x, Real y) const {
    const Real r2 = x * x + y * y, D = 4.0 + kappa * r2;
    return Vec3(4.0 * x / D, 4.0 * y / D, (4.0 - kappa * r2) / (m * D));
  }
  Vec3 dembed(Real x, Real y, Real dx, Real dy) const {
    const Real r2 = x * x + y * y, D = 4.0 + kappa * r2;
    const Real dD = 2.0 * kappa * (x * dx + y * dy);
    Vec3 n(4.0 * x, 4.0 * y, (4.0 - kappa * r2) / m);
    Vec3 dn(4.0 * dx, 4.0 * dy, -2.0 * kappa * (x * dx + y * dy) / m);
    return dn / D - n * dD / (D * D);
  }
  Vec2 project(const Vec3& P) const {
    const Real R = 1.0 / m, den = R + P.z();
    if (den < 1e-9 * R)  // antipode of the chart origin: the missing fiber
      throw DomainError("base geodesic reached the missing point of the chart");
    return Vec2(2.0 * P.x() / (m * den), 2.0 * P.y() / (m * den));
  }
};

}  // namespace detail

/// Point and unit tangent of the arclength-s point of the base geodesic of
/// M^2(kappa) through (p, d); d must be unit for the base metric.
inline void base_geodesic(Real kappa, const Vec2& p, const Vec2& d, Real s, Vec2* point,
                          Vec2* tangent = nullptr) {
  if (kappa == 0.0) {
    if (point) *point = p + s * d;
    if (tangent) *tangent = d;
    return;
  }
  const detail::BaseModel M(kappa);
  const Vec3 P = M.embed(p.x(), p.y());
  const Vec3 T = M.dembed(p.x(), p.y(), d.x(), d.y());
  const Real th = s * M.m;
  Vec3 G, Gp;
  if (kappa > 0.0) {
    G = P * std::cos(th) + T * (std::sin(th) / M.m);
    Gp = -P * M.m * std::sin(th) + T * std::cos(th);
  } else {
    G = P * std::cosh(th) + T * (std::sinh(th) / M.m);
    Gp = P * M.m * std::sinh(th) + T * std::cosh(th);
  }
  const Vec2 q = M.project(G);
  if (point) *point = q;
  if (tangent) {
    // differentiate the projection along the curve
    const Real R = 1.0 / M.m, den = R + G.z();
    Vec2 dq(2.0 * (Gp.x() * den - G.x() * Gp.z()) / (M.m * den * den),
            2.0 * (Gp.y() * den - G.y() * Gp.z()) / (M.m * den * den));
    *tangent = dq;
  }
}

// ---------------------------------------------------------------------------
// Geodesics and horizontal lifts in E(kappa,tau).
// ---------------------------------------------------------------------------

namespace detail {

/// dz along a horizontal curve: dz = lambda * tau * (x dy - y dx).
inline Real lift_form(Real kappa, Real tau, Real x, Real y, Real dx, Real dy) {
  return tau * lambda_kappa(kappa, x, y) * (x * dy - y * dx);
}

/// Simpson integration of the lift form along a closed-form base geodesic.
inline Real lift_increment(Real kappa, Real tau, const Vec2& p, const Vec2& d, Real s0, Real s1,
                           int subdiv = 8) {
  Real acc = 0.0;
  const Real hh = (s1 - s0) / subdiv;
  auto f = [&](Real s) {
    Vec2 q, t;
    base_geodesic(kappa, p, d, s, &q, &t);
    return lift_form(kappa, tau, q.x(), q.y(), t.x(), t.y());
  };
  for (int i = 0; i < subdiv; ++i) {
    const Real a = s0 + i * hh, b = a + hh;
    acc += hh / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return acc;
}

}  // namespace detail

/// Fixed-step RK4 geodesic integration. Vertical initial data short-circuits
/// to the fiber line; horizontal data in a Cartan-coordinate chart
/// short-circuits to the horizontal lift of the closed-form base geodesic.
inline std::vector<AmbientPoint> geodesic(const AmbientPoint& p0, const TangentVector& v0,
                                          Real length, int steps) {
  if (steps < 1) throw SpecError("geodesic: steps must be >= 1");
  if (std::abs(norm(v0) - 1.0) > 1e-10) throw SpecError("geodesic: |v0| must be 1");
  const Chart& chart = p0.chart;
  std::vector<AmbientPoint> out;
  out.reserve(steps + 1);

  const TangentVector xi{p0, killing_at(p0)};
  const Real vert = inner(v0, xi);
  const Vec3 horiz = v0.components - vert * xi.components;
  const bool is_vertical = horiz.norm() < 1e-12;
  const bool is_horizontal = std::abs(vert) < 1e-12;

  if (is_vertical) {
    const Real sgn = vert > 0.0 ? 1.0 : -1.0;
    for (int i = 0; i <= steps; ++i) {
      const Real s = sgn * length * i / steps;
      if (chart.tag == ChartTag::ConformalProduct)
        out.emplace_back(chart, Vec3(p0.coords * std::exp(s)));
      else
        out.emplace_back(chart, Vec3(p0.coords + s * Vec3::UnitZ()));
    }
    return out;
  }

  if (is_horizontal &&
      (chart.tag == ChartTag::Cartan || chart.tag == ChartTag::BergerSphere)) {
    const Real kappa = chart.metric_kappa(), tau = chart.metric_tau();
    // Base direction: unit-speed projection of v0.
    const Real lam = lambda_kappa(kappa, p0.coords.x(), p0.coords.y());
    Vec2 d(v0.components.x(), v0.components.y());
    d /= lam * d.norm();
    const Vec2 b0(p0.coords.x(), p0.coords.y());
    Real z = p0.coords.z();
    out.emplace_back(p0);
    for (int i = 1; i <= steps; ++i) {
      const Real s0 = length * (i - 1) / steps, s1 = length * i / steps;
      z += detail::lift_increment(kappa, tau, b0, d, s0, s1);
      Vec2 q;
      base_geodesic(kappa, b0, d, s1, &q);
      if (!in_domain(chart, Vec3(q.x(), q.y(), z)))
        throw DomainError("geodesic left the chart domain");
      out.emplace_back(chart, Vec3(q.x(), q.y(), z));
    }
    return out;
  }

  // General RK4 on the geodesic equation in chart coordinates.
  struct State {
    Vec3 x, v;
  };
  auto accel = [&](const State& st) {
    if (!st.x.allFinite() || st.x.norm() > 1e12 || !in_domain(chart, st.x))
      throw DomainError("geodesic left the chart domain");
    const auto gamma = christoffels_at({chart, st.x});
    Vec3 a;
    for (int k = 0; k < 3; ++k) a[k] = -st.v.dot(gamma[k] * st.v);
    return State{st.v, a};
  };
  State st{p0.coords, v0.components};
  const Real h = length / steps;
  out.emplace_back(p0);
  for (int i = 0; i < steps; ++i) {
    const State k1 = accel(st);
    const State k2 = accel({st.x + 0.5 * h * k1.x, st.v + 0.5 * h * k1.v});
    const State k3 = accel({st.x + 0.5 * h * k2.x, st.v + 0.5 * h * k2.v});
    const State k4 = accel({st.x + h * k3.x, st.v + h * k3.v});
    st.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    st.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    if (!in_domain(chart, st.x)) throw DomainError("geodesic left the chart domain");
    out.emplace_back(chart, st.x);
  }
  return out;
}

struct LiftResult {
  std::vector<AmbientPoint> points;
  Real vertical_gap = 0.0;  // z(end) - z(start); holonomy of a closed loop
};

/// Horizontal lift of a base polyline in Omega_kappa, starting at height z0.
/// Per-segment midpoint rule for the connection form (second order in the
/// polyline spacing).
inline LiftResult horizontal_lift(const Chart& chart, const std::vector<Vec2>& base, Real z0) {
  if (chart.tag != ChartTag::Cartan && chart.tag != ChartTag::BergerSphere)
    throw UnsupportedChart("horizontal_lift expects Cartan coordinates");
  if (base.size() < 2) throw SpecError("horizontal_lift: need at least two base points");
  const Real kappa = chart.metric_kappa(), tau = chart.metric_tau();
  LiftResult res;
  Real z = z0;
  res.points.emplace_back(chart, Vec3(base[0].x(), base[0].y(), z));
  for (size_t i = 1; i < base.size(); ++i) {
    const Vec2 mid = 0.5 * (base[i] + base[i - 1]);
    const Vec2 dd = base[i] - base[i - 1];
    z += detail::lift_form(kappa, tau, mid.x(), mid.y(), dd.x(), dd.y());
    res.points.emplace_back(chart, Vec3(base[i].x(), base[i].y(), z));
  }
  res.vertical_gap = z - z0;
  return res;
}

// ---------------------------------------------------------------------------
// Chart isometries.
// ---------------------------------------------------------------------------

/// 4-vector representation of a Berger-sphere point stored in Cartan
/// coordinates: (Re z, Im z, Re w, Im w) on the unit sphere of C^2.
inline Vec4 berger_embed(const SpaceParams& params, const Vec3& p) {
  const Real kappa = params.kappa, tau = params.tau;
  if (!(kappa > 0.0) || tau == 0.0) throw SpecError("berger_embed requires kappa>0, tau!=0");
  const Real lam = lambda_kappa(kappa, p.x(), p.y());
  const Real sq = std::sqrt(lam), w = sq * 0.5 * std::sqrt(kappa);
  const Real phi = kappa * p.z() / (4.0 * tau), c = std::cos(phi), s = std::sin(phi);
  return Vec4(w * (p.y() * c - p.x() * s), w * (p.y() * s + p.x() * c), sq * c, sq * s);
}

/// Berger metric on (tangent vectors of) the unit sphere of C^2 = R^4.
inline Real berger_metric_4d(const SpaceParams& params, const Vec4& p, const Vec4& X,
                             const Vec4& Y) {
  const Real kappa = params.kappa, tau = params.tau;
  const Vec4 xi = (kappa / (4.0 * tau)) * Vec4(-p[1], p[0], -p[3], p[2]);
  const Real corr = (16.0 * tau * tau / (kappa * kappa)) * (4.0 * tau * tau / kappa - 1.0);
  return (4.0 / kappa) * (X.dot(Y) + corr * X.dot(xi) * Y.dot(xi));
}

/// Length scale of chart_map: |d(chart_map) v| = scale * |v|.
inline Real chart_map_scale(const Chart& source, ChartTag target) {
  if (source.tag == ChartTag::Cartan && target == ChartTag::ConformalProduct)
    return std::sqrt(source.params.kappa);
  return 1.0;
}

/// Supported chart transitions:
///   Cartan -> HalfSpace        (kappa < 0; principal arccos branch, smooth
///                               on the open disk)
///   Cartan -> BergerSphere     (kappa > 0, tau != 0; Berger points keep
///                               Cartan coordinates, see berger_embed)
///   Cartan (kappa>0, tau=0) -> ConformalProduct (homothety to kappa=1, then
///                               (p, t) -> e^t p; lengths scale by sqrt(kappa))
inline AmbientPoint chart_map(const AmbientPoint& p, const Chart& target) {
  const Chart& src = p.chart;
  require_domain(src, p.coords);
  if (src.tag == ChartTag::Cartan && target.tag == ChartTag::HalfSpace) {
    const Real kappa = src.params.kappa, tau = src.params.tau;
    if (!(kappa < 0.0)) throw UnsupportedPair("Cartan->HalfSpace needs kappa < 0");
    if (target.params.kappa != kappa || target.params.tau != tau)
      throw UnsupportedPair("chart_map does not change (kappa, tau)");
    const Real m = std::sqrt(-kappa);
    const Real x = p.coords.x(), y = p.coords.y(), z = p.coords.z();
    const Real B = (2.0 / m + x) * (2.0 / m + x) + y * y;
    if (B <= 0.0) throw DomainError("chart_map singular point");
    const Real X = (4.0 / m) * y / B;
    const Real Y = (-4.0 / kappa - x * x - y * y) / B;
    const Real Z = z + (4.0 * tau / kappa) * std::acos(y / std::sqrt(B));
    if (!(Y > 0.0)) throw DomainError("image left the half-space");
    return {target, Vec3(X, Y, Z)};
  }
  if (src.tag == ChartTag::Cartan && target.tag == ChartTag::BergerSphere) {
    if (!(src.params.kappa > 0.0) || src.params.tau == 0.0)
      throw UnsupportedPair("Cartan->BergerSphere needs kappa > 0, tau != 0");
    return {target, p.coords};
  }
  if (src.tag == ChartTag::Cartan && target.tag == ChartTag::ConformalProduct) {
    const Real kappa = src.params.kappa;
    if (!(kappa > 0.0) || src.params.tau != 0.0)
      throw UnsupportedPair("Cartan->ConformalProduct needs kappa > 0, tau = 0");
    const Real rk = std::sqrt(kappa);
    const Real u = rk * p.coords.x(), v = rk * p.coords.y();
    const Real D = 4.0 + u * u + v * v;
    const Vec3 sphere(4.0 * u / D, 4.0 * v / D, (4.0 - u * u - v * v) / D);
    return {target, Vec3(std::exp(rk * p.coords.z()) * sphere)};
  }
  throw UnsupportedPair("chart_map: unsupported source/target pair");
}

}  // namespace ekt
