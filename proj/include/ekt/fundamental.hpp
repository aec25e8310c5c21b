#pragma once

#include <complex>
#include <vector>

#include "ekt/surfaces.hpp"

namespace ekt {

/// Fundamental data of an immersion at a point, expressed in the
/// Gram-Schmidt orthonormal tangent basis (e1 = X_u/|X_u|, e2 orthogonal,
/// oriented so that (e1, e2, N) is positively oriented). In that basis J is
/// the standard +90 degree rotation; `orientation` records its sign.
struct FundamentalSample {
  Mat2 A = Mat2::Zero();  // shape operator w.r.t. N = X_u x X_v / | |
  Vec2 T = Vec2::Zero();  // tangent part of xi
  Real nu = 0.0;          // angle function <xi, N>
  Real orientation = 1.0;
};

/// Conjugation data between E(kappa_s, tau_s) and E(kappa_t, tau_t):
/// kappa - 4 tau^2 invariant and tau_t + i H_t = e^{i theta}(tau_s + i H_s).
struct ConjugateSpec {
  SpaceParams source;  // (kappa~, tau~, H~)
  SpaceParams target;  // (kappa, tau, H)
  Real theta = 0.0;

  ConjugateSpec(const SpaceParams& src, const SpaceParams& tgt, Real th)
      : source(src), target(tgt), theta(th) {
    const Real inv_s = src.kappa - 4.0 * src.tau * src.tau;
    const Real inv_t = tgt.kappa - 4.0 * tgt.tau * tgt.tau;
    if (std::abs(inv_s - inv_t) > 1e-12)
      throw SpecError("conjugate spec: kappa - 4 tau^2 must match");
    const std::complex<Real> rot =
        std::polar(1.0, th) * std::complex<Real>(src.tau, src.H);
    if (std::abs(rot - std::complex<Real>(tgt.tau, tgt.H)) > 1e-12)
      throw SpecError("conjugate spec: tau + iH must rotate by theta");
  }
};

namespace detail {

/// Gauss curvature by the Brioschi formula from E, F, G sampled on a 3x3
/// stencil (index (1,1) is the center; first index steps u, second steps v).
inline Real brioschi_K(const Mat3& E, const Mat3& F, const Mat3& G, Real hu, Real hv) {
  const Real E0 = E(1, 1), F0 = F(1, 1), G0 = G(1, 1);
  const Real Eu = (E(2, 1) - E(0, 1)) / (2 * hu), Ev = (E(1, 2) - E(1, 0)) / (2 * hv);
  const Real Gu = (G(2, 1) - G(0, 1)) / (2 * hu), Gv = (G(1, 2) - G(1, 0)) / (2 * hv);
  const Real Fu = (F(2, 1) - F(0, 1)) / (2 * hu), Fv = (F(1, 2) - F(1, 0)) / (2 * hv);
  const Real Evv = (E(1, 2) - 2 * E0 + E(1, 0)) / (hv * hv);
  const Real Guu = (G(2, 1) - 2 * G0 + G(0, 1)) / (hu * hu);
  const Real Fuv = (F(2, 2) - F(2, 0) - F(0, 2) + F(0, 0)) / (4 * hu * hv);
  Mat3 M1, M2;
  M1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
        Fv - 0.5 * Gu, E0, F0,
        0.5 * Gv, F0, G0;
  M2 << 0.0, 0.5 * Ev, 0.5 * Gu,
        0.5 * Ev, E0, F0,
        0.5 * Gu, F0, G0;
  const Real det_I = E0 * G0 - F0 * F0;
  return (M1.determinant() - M2.determinant()) / (det_I * det_I);
}

struct PointData {
  FundamentalForms forms;
  Vec2 e1, e2;        // orthonormal tangent basis, (u,v) components
  Mat2 A_mixed;       // shape operator, coordinate (1,1) tensor
  Mat2 J_mixed;       // +90 rotation, coordinate (1,1) tensor
  Vec2 T_coord;       // tangent part of xi, contravariant components
  Real nu = 0.0;
  AmbientPoint p;
};

inline PointData point_data(const ParametricSurface& s, Real u, Real v) {
  PointData d;
  d.forms = fundamental_forms(s, u, v);
  d.p = AmbientPoint{s.chart, d.forms.jet.X};
  const Mat2& I = d.forms.I;
  d.A_mixed = I.inverse() * d.forms.II;
  // Gram-Schmidt in the (u,v) coordinate basis
  d.e1 = Vec2(1.0 / std::sqrt(I(0, 0)), 0.0);
  Vec2 w(0.0, 1.0);
  w -= (w.dot(I * d.e1)) * d.e1;
  d.e2 = w / std::sqrt(w.dot(I * w));
  // J maps e1 -> e2, e2 -> -e1
  d.J_mixed = d.e2 * (I * d.e1).transpose() - d.e1 * (I * d.e2).transpose();
  const Mat3 g = metric_at(d.p);
  const Vec3 xi = killing_at(d.p);
  const Vec2 xi_flat(d.forms.jet.Xu.dot(g * xi), d.forms.jet.Xv.dot(g * xi));
  d.T_coord = I.inverse() * xi_flat;
  d.nu = d.forms.N.dot(g * xi);
  return d;
}

}  // namespace detail

/// Angle function nu = <xi, N> of a parametric immersion.
inline Real angle_function(const ParametricSurface& s, Real u, Real v) {
  return detail::point_data(s, u, v).nu;
}

/// Fundamental data (A, T, J, nu) at a parameter point.
inline FundamentalSample fundamental_data(const ParametricSurface& s, Real u, Real v) {
  const detail::PointData d = detail::point_data(s, u, v);
  FundamentalSample out;
  Eigen::Matrix<Real, 2, 2> B;  // columns: e1, e2 in (u,v) coordinates
  B.col(0) = d.e1;
  B.col(1) = d.e2;
  out.A = B.transpose() * d.forms.II * B;  // II(e_a, e_b) = <A e_a, e_b>
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  const Mat3 g = metric_at(d.p);
  const Vec3 xi = killing_at(d.p);
  const Vec3 E1 = d.e1.x() * d.forms.jet.Xu + d.e1.y() * d.forms.jet.Xv;
  const Vec3 E2 = d.e2.x() * d.forms.jet.Xu + d.e2.y() * d.forms.jet.Xv;
  out.T = Vec2(xi.dot(g * E1), xi.dot(g * E2));
  out.nu = d.nu;
  out.orientation = 1.0;
  return out;
}

/// Transformed fundamental data:
///   A -> Rot_theta (A - H_s id) + H_t id,  T -> Rot_theta T,  nu -> nu.
inline FundamentalSample daniel_transform(const FundamentalSample& d, const ConjugateSpec& spec) {
  Mat2 J;
  J << 0.0, -1.0, 1.0, 0.0;
  const Mat2 rot = std::cos(spec.theta) * Mat2::Identity() + std::sin(spec.theta) * J;
  FundamentalSample out;
  out.A = rot * (d.A - spec.source.H * Mat2::Identity()) + spec.target.H * Mat2::Identity();
  out.T = rot * d.T;
  out.nu = d.nu;
  out.orientation = d.orientation;
  return out;
}

// ---------------------------------------------------------------------------
// Grid-based compatibility residuals.
// ---------------------------------------------------------------------------

struct GaussCodazziReport {
  Real gauss = 0.0;      // (i)  K = det A + tau^2 + (kappa - 4 tau^2) nu^2
  Real codazzi = 0.0;    // (ii) along the two grid directions
  Real nabla_T = 0.0;    // (iii)
  Real nabla_nu = 0.0;   // (iv)
  Real unit = 0.0;       // (v)  |T|^2 + nu^2 = 1
  Real hu = 0.0, hv = 0.0;

  Real max_residual() const {
    return std::max({gauss, codazzi, nabla_T, nabla_nu, unit});
  }
};

/// Pointwise residuals of the compatibility equations over an (nu x nv) grid
/// of the parameter rectangle. K comes from the Brioschi formula applied to
/// the induced metric (not from the Gauss equation itself) and the intrinsic
/// derivatives are central differences on the grid, so every equation is an
/// honest check.
inline GaussCodazziReport gauss_codazzi_residuals(const ParametricSurface& s, int nu_grid,
                                                  int nv_grid) {
  if (nu_grid < 5 || nv_grid < 5) throw SpecError("gauss_codazzi_residuals: grid too small");
  const Real kappa = s.chart.metric_kappa(), tau = s.chart.metric_tau();
  const Real kt = kappa - 4.0 * tau * tau;
  const Real hu = (s.u1 - s.u0) / (nu_grid - 1), hv = (s.v1 - s.v0) / (nv_grid - 1);

  std::vector<detail::PointData> grid(size_t(nu_grid) * nv_grid);
  auto at = [&](int i, int j) -> detail::PointData& { return grid[size_t(i) * nv_grid + j]; };
  for (int i = 0; i < nu_grid; ++i)
    for (int j = 0; j < nv_grid; ++j)
      at(i, j) = detail::point_data(s, s.u0 + i * hu, s.v0 + j * hv);

  GaussCodazziReport rep;
  rep.hu = hu;
  rep.hv = hv;
  for (int i = 2; i < nu_grid - 2; ++i) {
    for (int j = 2; j < nv_grid - 2; ++j) {
      const detail::PointData& c = at(i, j);
      const Mat2& I = c.forms.I;
      const Mat2 Iinv = I.inverse();

      // materialize into concrete types: Eigen expressions must not outlive
      // the temporaries returned by f
      auto du_of = [&](auto&& f) {
        using T = std::decay_t<decltype(f(at(0, 0)))>;
        const T hi = f(at(i + 1, j)), lo = f(at(i - 1, j));
        return T((hi - lo) / (2.0 * hu));
      };
      auto dv_of = [&](auto&& f) {
        using T = std::decay_t<decltype(f(at(0, 0)))>;
        const T hi = f(at(i, j + 1)), lo = f(at(i, j - 1));
        return T((hi - lo) / (2.0 * hv));
      };

      // first fundamental form derivatives -> intrinsic Christoffels
      const Mat2 Iu = du_of([](const detail::PointData& d) { return d.forms.I; });
      const Mat2 Iv = dv_of([](const detail::PointData& d) { return d.forms.I; });
      const Mat2 dI[2] = {Iu, Iv};
      Mat2 gam[2];  // gam[c](a,b) = Gamma^c_{ab}
      for (int cc = 0; cc < 2; ++cc)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            Real sum = 0.0;
            for (int dd = 0; dd < 2; ++dd)
              sum += Iinv(cc, dd) * (dI[a](b, dd) + dI[b](a, dd) - dI[dd](a, b));
            gam[cc](a, b) = 0.5 * sum;
          }

      // Brioschi K from the induced metric on the 3x3 neighborhood
      Mat3 Eg, Fg, Gg;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          const Mat2& In = at(i + a, j + b).forms.I;
          Eg(a + 1, b + 1) = In(0, 0);
          Fg(a + 1, b + 1) = In(0, 1);
          Gg(a + 1, b + 1) = In(1, 1);
        }
      const Real K = detail::brioschi_K(Eg, Fg, Gg, hu, hv);

      // (i) Gauss
      rep.gauss = std::max(
          rep.gauss, std::abs(K - (c.A_mixed.determinant() + tau * tau + kt * c.nu * c.nu)));

      // (ii) Codazzi along (du, dv)
      const Mat2 Au = du_of([](const detail::PointData& d) { return d.A_mixed; });
      const Mat2 Av = dv_of([](const detail::PointData& d) { return d.A_mixed; });
      Vec2 cod;
      for (int componentk = 0; componentk < 2; ++componentk) {
        Real lhs = Au(componentk, 1) - Av(componentk, 0);
        for (int dd = 0; dd < 2; ++dd)
          lhs += gam[componentk](0, dd) * c.A_mixed(dd, 1) -
                 gam[componentk](1, dd) * c.A_mixed(dd, 0);
        cod[componentk] = lhs;
      }
      const Vec2 T_flat = I * c.T_coord;
      const Vec2 rhs = kt * c.nu * Vec2(T_flat.y(), -T_flat.x());
      rep.codazzi = std::max(rep.codazzi, (cod - rhs).norm());

      // (iii) nabla_a T = nu (A - tau J) d_a
      const Vec2 Tu = du_of([](const detail::PointData& d) { return d.T_coord; });
      const Vec2 Tv = dv_of([](const detail::PointData& d) { return d.T_coord; });
      const Vec2 dT[2] = {Tu, Tv};
      for (int a = 0; a < 2; ++a) {
        Vec2 cov = dT[a];
        for (int componentk = 0; componentk < 2; ++componentk) {
          Real corr = 0.0;
          for (int dd = 0; dd < 2; ++dd) corr += gam[componentk](a, dd) * c.T_coord[dd];
          cov[componentk] += corr;
        }
        const Vec2 want = c.nu * (c.A_mixed.col(a) - tau * c.J_mixed.col(a));
        rep.nabla_T = std::max(rep.nabla_T, (cov - want).norm());
      }

      // (iv) grad nu = -(A + tau J) T
      const Real nuu = du_of([](const detail::PointData& d) { return d.nu; });
      const Real nuv = dv_of([](const detail::PointData& d) { return d.nu; });
      const Vec2 grad_nu = Iinv * Vec2(nuu, nuv);
      const Vec2 want = -(c.A_mixed * c.T_coord + tau * c.J_mixed * c.T_coord);
      rep.nabla_nu = std::max(rep.nabla_nu, (grad_nu - want).norm());

      // (v)
      rep.unit = std::max(rep.unit,
                          std::abs(c.T_coord.dot(I * c.T_coord) + c.nu * c.nu - 1.0));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Abresch-Rosenberg-type scalar and the stability operator.
// ---------------------------------------------------------------------------

namespace detail {

/// K and grad nu from a local 5-point stencil around (u, v).
struct LocalIntrinsics {
  Real K = 0.0;
  Real grad_nu_sq = 0.0;
  Real nu = 0.0;
};

inline LocalIntrinsics local_intrinsics(const ParametricSurface& s, Real u, Real v, Real h) {
  Mat3 Eg, Fg, Gg;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      const Mat2 In = fundamental_forms(s, u + a * h, v + b * h).I;
      Eg(a + 1, b + 1) = In(0, 0);
      Fg(a + 1, b + 1) = In(0, 1);
      Gg(a + 1, b + 1) = In(1, 1);
    }
  LocalIntrinsics out;
  out.K = brioschi_K(Eg, Fg, Gg, h, h);
  const Mat2 I0 = fundamental_forms(s, u, v).I;
  const Real nu_uu = angle_function(s, u + h, v), nu_um = angle_function(s, u - h, v);
  const Real nu_vp = angle_function(s, u, v + h), nu_vm = angle_function(s, u, v - h);
  const Vec2 dnu((nu_uu - nu_um) / (2 * h), (nu_vp - nu_vm) / (2 * h));
  out.grad_nu_sq = dnu.dot(I0.inverse() * dnu);
  out.nu = angle_function(s, u, v);
  return out;
}

}  // namespace detail

/// The scalar whose vanishing marks a zero Abresch-Rosenberg-type
/// differential, reported premultiplied by (kappa - 4 tau^2) so no division
/// appears:
///   q = 1/4 (4H^2+kappa - (kappa-4tau^2) nu^2)
///         (4H^2+kappa + 3 (kappa-4tau^2) nu^2 - 4K)
///       - (kappa - 4 tau^2) |grad nu|^2.
inline Real abresch_rosenberg_q(const ParametricSurface& s, Real u, Real v, Real h = 1e-3) {
  const Real kappa = s.chart.metric_kappa(), tau = s.chart.metric_tau();
  const Real kt = kappa - 4.0 * tau * tau;
  if (std::abs(kt) < 1e-14)
    throw SpecError("abresch_rosenberg_q undefined in space forms (kappa = 4 tau^2)");
  const Real H = s.mean_curvature_ref;
  const Real crit = 4.0 * H * H + kappa;
  const auto loc = detail::local_intrinsics(s, u, v, h * (1.0 + std::abs(u) + std::abs(v)));
  return 0.25 * (crit - kt * loc.nu * loc.nu) *
             (crit + 3.0 * kt * loc.nu * loc.nu - 4.0 * loc.K) -
         kt * loc.grad_nu_sq;
}

struct StabilityField {
  std::vector<Real> values;  // L f at interior grid nodes, row-major
  int nu_grid = 0, nv_grid = 0, margin = 2;
  Real max_abs() const {
    Real m = 0.0;
    for (Real x : values) m = std::max(m, std::abs(x));
    return m;
  }
};

/// Apply the stability (Jacobi) operator
///   L f = Delta f - (2K - 4H^2 - kappa - (kappa - 4 tau^2) nu^2) f
/// on a parameter grid; Delta is the Laplace-Beltrami operator of the
/// induced metric discretized with central differences.
inline StabilityField stability_apply(const ParametricSurface& s,
                                      const std::function<Real(Real, Real)>& f, int nu_grid,
                                      int nv_grid) {
  if (nu_grid < 5 || nv_grid < 5) throw SpecError("stability_apply: grid too small");
  const Real kappa = s.chart.metric_kappa(), tau = s.chart.metric_tau();
  const Real H = s.mean_curvature_ref;
  const Real kt = kappa - 4.0 * tau * tau;
  const Real hu = (s.u1 - s.u0) / (nu_grid - 1), hv = (s.v1 - s.v0) / (nv_grid - 1);

  struct Node {
    Mat2 I;
    Real sq = 0.0, f = 0.0, nu = 0.0;
    Vec2 flux = Vec2::Zero();
  };
  std::vector<Node> grid(size_t(nu_grid) * nv_grid);
  auto at = [&](int i, int j) -> Node& { return grid[size_t(i) * nv_grid + j]; };
  for (int i = 0; i < nu_grid; ++i)
    for (int j = 0; j < nv_grid; ++j) {
      const Real u = s.u0 + i * hu, v = s.v0 + j * hv;
      Node& n = at(i, j);
      const auto forms = detail::fundamental_forms(s, u, v);
      n.I = forms.I;
      n.sq = std::sqrt(n.I.determinant());
      n.nu = forms.N.dot(metric_at({s.chart, forms.jet.X}) * killing_at({s.chart, forms.jet.X}));
      n.f = f(u, v);
    }
  for (int i = 1; i < nu_grid - 1; ++i)
    for (int j = 1; j < nv_grid - 1; ++j) {
      Node& n = at(i, j);
      const Vec2 df((at(i + 1, j).f - at(i - 1, j).f) / (2.0 * hu),
                    (at(i, j + 1).f - at(i, j - 1).f) / (2.0 * hv));
      n.flux = n.sq * (n.I.inverse() * df);
    }
  StabilityField out;
  out.nu_grid = nu_grid;
  out.nv_grid = nv_grid;
  for (int i = 2; i < nu_grid - 2; ++i)
    for (int j = 2; j < nv_grid - 2; ++j) {
      const Node& n = at(i, j);
      const Real div = (at(i + 1, j).flux.x() - at(i - 1, j).flux.x()) / (2.0 * hu) +
                       (at(i, j + 1).flux.y() - at(i, j - 1).flux.y()) / (2.0 * hv);
      const Real lap = div / n.sq;
      // K on the same grid so the whole residual decays with the spacing
      Mat3 Eg, Fg, Gg;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          const Mat2& In = at(i + a, j + b).I;
          Eg(a + 1, b + 1) = In(0, 0);
          Fg(a + 1, b + 1) = In(0, 1);
          Gg(a + 1, b + 1) = In(1, 1);
        }
      const Real K = detail::brioschi_K(Eg, Fg, Gg, hu, hv);
      const Real potential = 2.0 * K - 4.0 * H * H - kappa - kt * n.nu * n.nu;
      out.values.push_back(lap - potential * n.f);
    }
  return out;
}

}  // namespace ekt
