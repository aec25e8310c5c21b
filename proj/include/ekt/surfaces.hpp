#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>

#include "ekt/geometry.hpp"

namespace ekt {

namespace detail {

/// Adaptive Gauss-Kronrod with absolute tolerance 1e-10. Integrands handed
/// here are already regularized (no endpoint singularities).
template <typename F>
Real integrate(F&& f, Real a, Real b, Real abstol = 1e-10) {
  if (a == b) return 0.0;
  Real error = 0.0;
  const Real v = boost::math::quadrature::gauss_kronrod<Real, 15>::integrate(
      std::forward<F>(f), a, b, 12, abstol, &error);
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vertical graphs over Omega_kappa.
// ---------------------------------------------------------------------------

/// Scalar field u over a sub-rectangle of Omega_kappa, graphed as
/// (x, y, u(x,y)) in Cartan coordinates. Derivatives come from `grad` when
/// supplied, otherwise from central differences of `u`.
struct GraphFunction {
  Chart chart;  // Cartan coordinates
  std::function<Real(Real, Real)> u;
  std::function<Vec2(Real, Real)> grad;  // optional
  Real x0 = -0.5, x1 = 0.5, y0 = -0.5, y1 = 0.5;

  Vec2 gradient(Real x, Real y) const {
    if (grad) return grad(x, y);
    const Real hx = fd_step(x, 1e-6), hy = fd_step(y, 1e-6);
    return Vec2((u(x + hx, y) - u(x - hx, y)) / (2.0 * hx),
                (u(x, y + hy) - u(x, y - hy)) / (2.0 * hy));
  }
};

/// Components (p, q) of the generalized gradient of a graph:
/// p = u_x + tau lambda y, q = u_y - tau lambda x.
inline Vec2 generalized_gradient(const GraphFunction& gf, Real x, Real y) {
  if (x < gf.x0 || x > gf.x1 || y < gf.y0 || y > gf.y1)
    throw DomainError("generalized_gradient outside the graph domain");
  const Real kappa = gf.chart.metric_kappa(), tau = gf.chart.metric_tau();
  const Real lam = lambda_kappa(kappa, x, y);
  const Vec2 du = gf.gradient(x, y);
  return Vec2(du.x() + tau * lam * y, du.y() - tau * lam * x);
}

/// Mean curvature of the graph in divergence form. With (p, q) the
/// generalized-gradient components and W^2 = 1 + (p^2+q^2)/lambda^2 the area
/// element, H = (d_x(p/W) + d_y(q/W)) / (2 lambda^2); the outer derivatives
/// are central differences.
inline Real graph_mean_curvature(const GraphFunction& gf, Real x, Real y) {
  const Real kappa = gf.chart.metric_kappa();
  auto flux = [&](Real xx, Real yy) {
    const Vec2 pq = generalized_gradient(gf, xx, yy);
    const Real lam = lambda_kappa(kappa, xx, yy);
    const Real W = std::sqrt(1.0 + pq.squaredNorm() / (lam * lam));
    return Vec2(pq.x() / W, pq.y() / W);
  };
  const Real hx = fd_step(x, 1e-4), hy = fd_step(y, 1e-4);
  const Real div = (flux(x + hx, y).x() - flux(x - hx, y).x()) / (2.0 * hx) +
                   (flux(x, y + hy).y() - flux(x, y - hy).y()) / (2.0 * hy);
  const Real lam = lambda_kappa(kappa, x, y);
  return 0.5 * div / (lam * lam);
}

/// The graph of u = 0: union of the horizontal geodesics through the origin.
inline GraphFunction umbrella_graph(const SpaceParams& params, Real extent = 0.5) {
  GraphFunction gf;
  gf.chart = cartan_chart(params.kappa, params.tau);
  gf.u = [](Real, Real) { return 0.0; };
  gf.grad = [](Real, Real) { return Vec2::Zero(); };
  gf.x0 = gf.y0 = -extent;
  gf.x1 = gf.y1 = extent;
  return gf;
}

/// Minimal graph ruled by the horizontal geodesics orthogonal to the x-axis:
/// u = tau x y for kappa = 0, u = (2 tau / kappa) atan(2xy / (4/kappa + x^2 - y^2))
/// for kappa < 0.
inline GraphFunction invariant_graph(const SpaceParams& params, Real extent = 0.4) {
  const Real kappa = params.kappa, tau = params.tau;
  if (kappa > 0.0) throw ParamError("invariant_graph: closed form needs kappa <= 0");
  GraphFunction gf;
  gf.chart = cartan_chart(kappa, tau);
  if (kappa == 0.0) {
    gf.u = [tau](Real x, Real y) { return tau * x * y; };
    gf.grad = [tau](Real x, Real y) { return Vec2(tau * y, tau * x); };
  } else {
    gf.u = [kappa, tau](Real x, Real y) {
      const Real D = 4.0 / kappa + x * x - y * y;
      return (2.0 * tau / kappa) * std::atan2(2.0 * x * y, D);
    };
    gf.grad = [kappa, tau](Real x, Real y) {
      const Real D = 4.0 / kappa + x * x - y * y, N = 2.0 * x * y;
      const Real den = D * D + N * N;
      // d/d* atan2(N, D) = (N' D - N D') / (D^2 + N^2)
      return Vec2((2.0 * y * D - N * 2.0 * x) / den * (2.0 * tau / kappa),
                  (2.0 * x * D + N * 2.0 * y) / den * (2.0 * tau / kappa));
    };
  }
  gf.x0 = gf.y0 = -extent;
  gf.x1 = gf.y1 = extent;
  return gf;
}

// ---------------------------------------------------------------------------
// Parametric immersions.
// ---------------------------------------------------------------------------

struct ParametricSurface {
  Chart chart;
  std::function<Vec3(Real, Real)> map;
  std::function<Vec3(Real, Real)> du, dv;  // optional analytic first derivatives
  Real u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
  Real mean_curvature_ref = 0.0;  // the family's target H
  Real fd = 1e-5;                 // step scale for missing derivatives

  Vec3 d_u(Real u, Real v) const {
    if (du) return du(u, v);
    const Real h = fd_step(u, fd);
    return (map(u + h, v) - map(u - h, v)) / (2.0 * h);
  }
  Vec3 d_v(Real u, Real v) const {
    if (dv) return dv(u, v);
    const Real h = fd_step(v, fd);
    return (map(u, v + h) - map(u, v - h)) / (2.0 * h);
  }
};

namespace detail {

/// First derivatives and coordinate second derivatives of the immersion.
/// Second derivatives are differences of first derivatives (analytic ones
/// when available), which keeps them accurate near 1e-10.
struct Jet2 {
  Vec3 X, Xu, Xv, Xuu, Xuv, Xvv;
};

inline Jet2 jet2(const ParametricSurface& s, Real u, Real v) {
  Jet2 j;
  j.X = s.map(u, v);
  j.Xu = s.d_u(u, v);
  j.Xv = s.d_v(u, v);
  const Real hu = fd_step(u, s.du ? 1e-6 : 1e-4);
  const Real hv = fd_step(v, s.dv ? 1e-6 : 1e-4);
  j.Xuu = (s.d_u(u + hu, v) - s.d_u(u - hu, v)) / (2.0 * hu);
  j.Xvv = (s.d_v(u, v + hv) - s.d_v(u, v - hv)) / (2.0 * hv);
  j.Xuv = (s.d_u(u, v + hv) - s.d_u(u, v - hv)) / (2.0 * hv);
  return j;
}

struct FundamentalForms {
  Mat2 I;    // induced metric in the (u, v) basis
  Mat2 II;   // second fundamental form w.r.t. N = Xu x Xv / | |
  Vec3 N;    // unit normal, coordinate components
  Jet2 jet;
};

inline FundamentalForms fundamental_forms(const ParametricSurface& s, Real u, Real v) {
  FundamentalForms f;
  f.jet = jet2(s, u, v);
  const AmbientPoint p{s.chart, f.jet.X};
  const Mat3 g = metric_at(p);
  f.I << f.jet.Xu.dot(g * f.jet.Xu), f.jet.Xu.dot(g * f.jet.Xv),
         f.jet.Xu.dot(g * f.jet.Xv), f.jet.Xv.dot(g * f.jet.Xv);
  if (f.I.determinant() < 1e-12)
    throw DegenerateImmersion("first fundamental form is singular");
  TangentVector n = cross({p, f.jet.Xu}, {p, f.jet.Xv});
  n.components /= norm(n);
  f.N = n.components;
  // II_ab = < nabla_{X_a} X_b, N > = < d2 X + Gamma(dX, dX), N >
  const auto gamma = christoffels_at(p);
  auto christoffel_term = [&](const Vec3& a, const Vec3& b) {
    Vec3 out;
    for (int k = 0; k < 3; ++k) out[k] = a.dot(gamma[k] * b);
    return out;
  };
  const Vec3 Duu = f.jet.Xuu + christoffel_term(f.jet.Xu, f.jet.Xu);
  const Vec3 Duv = f.jet.Xuv + christoffel_term(f.jet.Xu, f.jet.Xv);
  const Vec3 Dvv = f.jet.Xvv + christoffel_term(f.jet.Xv, f.jet.Xv);
  f.II << Duu.dot(g * f.N), Duv.dot(g * f.N),
          Duv.dot(g * f.N), Dvv.dot(g * f.N);
  return f;
}

}  // namespace detail

/// Mean curvature from the first and second fundamental forms, with respect
/// to the normal N = (X_u x X_v) / |X_u x X_v|. Independent of the
/// closed-form families: everything is rebuilt from derivatives of the map
/// and the ambient connection.
inline Real numeric_mean_curvature(const ParametricSurface& s, Real u, Real v) {
  const auto f = detail::fundamental_forms(s, u, v);
  return 0.5 * (f.I.inverse() * f.II).trace();
}

// ---------------------------------------------------------------------------
// Closed-form families.
// ---------------------------------------------------------------------------

/// Rotationally invariant H-surface about the z-axis of the Cartan chart:
/// X(u,v) = (v cos u, v sin u, z(v)). Half an H-sphere when 4H^2+kappa > 0,
/// an entire graph otherwise. The height integrand has an endpoint
/// singularity at v = 1/|H|; the parameter domain stops short of it (and of
/// the chart radius when kappa < 0) by `clip`.
inline ParametricSurface surface_S(const SpaceParams& params, Real clip = 1e-4) {
  const Real kappa = params.kappa, tau = params.tau, H = params.H;
  Real vmax = std::numeric_limits<Real>::infinity();
  if (H != 0.0) vmax = std::min(vmax, 1.0 / std::abs(H));
  if (kappa < 0.0) vmax = std::min(vmax, 2.0 / std::sqrt(-kappa));
  if (!std::isfinite(vmax)) vmax = 4.0;  // H = 0, kappa >= 0: flat umbrella, any window
  if (vmax <= 2.0 * clip) throw ParamError("surface_S: empty parameter domain");

  // z'(v), the raw integrand
  auto zp = [kappa, tau, H](Real v) {
    if (H == 0.0) return 0.0;
    return -4.0 * H * v * std::sqrt(1.0 + tau * tau * v * v) /
           ((4.0 + kappa * v * v) * std::sqrt(1.0 - H * H * v * v));
  };
  // height via the substitution v = sin(w)/H, which removes the endpoint
  // singularity at v = 1/H
  auto z_of = [kappa, tau, H](Real v) {
    if (H == 0.0) return 0.0;
    const Real aH = std::abs(H);
    const Real wmax = std::asin(std::min(1.0, aH * v));
    auto f = [&](Real w) {
      const Real s = std::sin(w) / aH;
      return -4.0 * H * s * std::sqrt(1.0 + tau * tau * s * s) /
             ((4.0 + kappa * s * s) * aH);
    };
    return detail::integrate(f, 0.0, wmax);
  };

  ParametricSurface s;
  s.chart = cartan_chart(kappa, tau, H);
  s.mean_curvature_ref = H;
  s.map = [z_of](Real u, Real v) {
    return Vec3(v * std::cos(u), v * std::sin(u), z_of(v));
  };
  s.du = [](Real u, Real v) { return Vec3(-v * std::sin(u), v * std::cos(u), 0.0); };
  s.dv = [zp](Real u, Real v) { return Vec3(std::cos(u), std::sin(u), zp(v)); };
  s.u0 = 0.0;
  s.u1 = 2.0 * M_PI;
  s.v0 = std::min(0.05, 0.1 * vmax);
  s.v1 = vmax - clip;
  return s;
}

/// Screw-motion invariant H-surface (helicoids when H = 0, rotational
/// catenoids when tau = 0); requires subcritical mean curvature
/// 4H^2 + kappa < 0. X(u,v) = (v cos u, v sin u, 4 tau u / kappa + z(v)).
inline ParametricSurface surface_C(const SpaceParams& params, Real sign = 1.0,
                                   Real clip = 1e-4) {
  const Real kappa = params.kappa, tau = params.tau, H = params.H;
  if (!(4.0 * H * H + kappa < 0.0)) throw ParamError("surface_C needs 4H^2 + kappa < 0");
  const Real s0 = 4.0 * H / std::abs(kappa);
  const Real vmax = 2.0 / std::sqrt(-kappa);

  auto zp = [kappa, tau, H](Real v) {
    if (H == 0.0) return 0.0;
    return 16.0 * H * std::sqrt(16.0 * tau * tau + kappa * kappa * v * v) /
           (kappa * v * (4.0 + kappa * v * v) *
            std::sqrt(kappa * kappa * v * v - 16.0 * H * H));
  };
  // height via s = s0 cosh(w): removes the 1/sqrt singularity at s = s0
  auto z_of = [kappa, tau, H, s0](Real v) {
    if (H == 0.0) return 0.0;
    const Real wmax = std::acosh(std::max(1.0, v / s0));
    auto f = [&](Real w) {
      const Real s = s0 * std::cosh(w);
      return 16.0 * H * std::sqrt(16.0 * tau * tau + kappa * kappa * s * s) /
             (kappa * s * (4.0 + kappa * s * s) * std::abs(kappa));
    };
    return detail::integrate(f, 0.0, wmax);
  };

  ParametricSurface s;
  s.chart = cartan_chart(kappa, tau, H);
  s.mean_curvature_ref = H;
  const Real pitch = 4.0 * tau / kappa;
  s.map = [z_of, pitch, sign](Real u, Real v) {
    return Vec3(v * std::cos(u), v * std::sin(u), pitch * u + sign * z_of(v));
  };
  s.du = [pitch](Real u, Real v) {
    return Vec3(-v * std::sin(u), v * std::cos(u), pitch);
  };
  s.dv = [zp, sign](Real u, Real v) {
    return Vec3(std::cos(u), std::sin(u), sign * zp(v));
  };
  s.u0 = 0.0;
  s.u1 = 2.0 * M_PI;
  s.v0 = (H == 0.0 ? 0.05 * vmax : s0 + clip);
  s.v1 = vmax - clip;
  if (s.v0 >= s.v1) throw ParamError("surface_C: empty parameter domain");
  return s;
}

/// Parabolic helicoid in the half-space chart: X(u,v) = (u, v, a log v) with
/// a = 2H sqrt(-kappa + 4 tau^2) / (-kappa sqrt(-4H^2 - kappa)). Entire
/// H-graph with constant angle function; requires 4H^2 + kappa < 0 (kappa<0).
inline ParametricSurface surface_P(const SpaceParams& params) {
  const Real kappa = params.kappa, tau = params.tau, H = params.H;
  if (!(kappa < 0.0) || !(4.0 * H * H + kappa < 0.0))
    throw ParamError("surface_P needs kappa < 0 and 4H^2 + kappa < 0");
  const Real a = 2.0 * H * std::sqrt(-kappa + 4.0 * tau * tau) /
                 (-kappa * std::sqrt(-4.0 * H * H - kappa));
  ParametricSurface s;
  s.chart = half_space_chart(kappa, tau, H);
  s.mean_curvature_ref = H;
  // u runs along -x so the reference normal X_u x X_v reports +H
  s.map = [a](Real u, Real v) { return Vec3(-u, v, a * std::log(v)); };
  s.du = [](Real, Real) { return Vec3(-1.0, 0.0, 0.0); };
  s.dv = [a](Real, Real v) { return Vec3(0.0, 1.0, a / v); };
  s.u0 = -1.0;
  s.u1 = 1.0;
  s.v0 = 0.5;
  s.v1 = 2.0;
  return s;
}

/// Ruled minimal surface of the Berger sphere with pitch c, as the
/// 4-vector immersion (cos u e^{i c v}, sin u e^{i v}).
inline Vec4 spherical_helicoid_embed(Real c, Real u, Real v) {
  return Vec4(std::cos(u) * std::cos(c * v), std::cos(u) * std::sin(c * v),
              std::sin(u) * std::cos(v), std::sin(u) * std::sin(v));
}

/// The same surface in the Cartan coordinates of the Berger chart (the
/// preimage under the covering map), valid away from the removed fiber
/// u = 0:  (x, y) = (2/sqrt(kappa)) cot(u) (sin((c-1)v), cos((c-1)v)),
/// z = 4 tau v / kappa.
inline ParametricSurface spherical_helicoid(Real c, const SpaceParams& params) {
  const Real kappa = params.kappa, tau = params.tau;
  if (!(kappa > 0.0) || tau == 0.0)
    throw ParamError("spherical_helicoid needs a Berger context (kappa > 0, tau != 0)");
  const Real rk = 2.0 / std::sqrt(kappa), zc = 4.0 * tau / kappa;
  ParametricSurface s;
  s.chart = berger_chart(kappa, tau);
  s.mean_curvature_ref = 0.0;
  s.map = [rk, zc, c](Real u, Real v) {
    const Real ct = std::cos(u) / std::sin(u), phi = (c - 1.0) * v;
    return Vec3(rk * ct * std::sin(phi), rk * ct * std::cos(phi), zc * v);
  };
  s.du = [rk, c](Real u, Real v) {
    const Real dct = -1.0 / (std::sin(u) * std::sin(u)), phi = (c - 1.0) * v;
    return Vec3(rk * dct * std::sin(phi), rk * dct * std::cos(phi), 0.0);
  };
  s.dv = [rk, zc, c](Real u, Real v) {
    const Real ct = std::cos(u) / std::sin(u), phi = (c - 1.0) * v;
    return Vec3(rk * ct * std::cos(phi) * (c - 1.0), -rk * ct * std::sin(phi) * (c - 1.0),
                zc);
  };
  s.u0 = 0.35;
  s.u1 = 1.25;
  s.v0 = -0.8;
  s.v1 = 0.8;
  return s;
}

/// Induced metric of a 4-vector immersion of the Berger sphere, in the
/// (u, v) basis; derivatives by central differences.
inline Mat2 berger_first_form(const SpaceParams& params,
                              const std::function<Vec4(Real, Real)>& map, Real u, Real v) {
  const Real hu = fd_step(u, 1e-6), hv = fd_step(v, 1e-6);
  const Vec4 p = map(u, v);
  const Vec4 Xu = (map(u + hu, v) - map(u - hu, v)) / (2.0 * hu);
  const Vec4 Xv = (map(u, v + hv) - map(u, v - hv)) / (2.0 * hv);
  Mat2 I;
  I << berger_metric_4d(params, p, Xu, Xu), berger_metric_4d(params, p, Xu, Xv),
       berger_metric_4d(params, p, Xu, Xv), berger_metric_4d(params, p, Xv, Xv);
  return I;
}

}  // namespace ekt
