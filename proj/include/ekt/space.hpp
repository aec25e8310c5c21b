#pragma once

#include <cmath>

#include "ekt/core.hpp"

namespace ekt {

/// Parameters of a homogeneous 3-manifold E(kappa,tau): base curvature kappa,
/// bundle curvature tau, and an optional target mean curvature H carried
/// along for conjugation contexts.
struct SpaceParams {
  Real kappa = 0.0;
  Real tau = 0.0;
  Real H = 0.0;

  Real critical_gap() const { return 4.0 * H * H + kappa; }
};

/// A minimal/CMC conjugation context: the sister space of an H-surface in
/// E(kappa,0) is E(4H^2+kappa, H). The constructor enforces that relation.
struct ConjugatePair {
  SpaceParams target;  // (kappa, 0, H), the product-space side
  SpaceParams source;  // (4H^2+kappa, H, 0), the minimal side

  ConjugatePair(Real kappa, Real H) {
    target = SpaceParams{kappa, 0.0, H};
    source = SpaceParams{4.0 * H * H + kappa, H, 0.0};
  }
  ConjugatePair(const SpaceParams& tgt, const SpaceParams& src) : target(tgt), source(src) {
    if (std::abs(src.kappa - (4.0 * tgt.H * tgt.H + tgt.kappa)) > 1e-12 ||
        std::abs(src.tau - tgt.H) > 1e-12)
      throw SpecError("conjugate pair requires kappa_tilde = 4H^2 + kappa and tau_tilde = H");
  }
};

enum class ChartTag {
  Cartan,            // Omega_kappa x R, the common coordinate model
  HalfSpace,         // kappa < 0, upper half-space coordinates
  BergerSphere,      // kappa > 0, tau != 0; points stored as Cartan coordinates
  ConformalProduct,  // S^2 x R as (R^3 minus origin, euclidean/|p|^2); kappa normalized to 1
};

struct Chart {
  ChartTag tag = ChartTag::Cartan;
  SpaceParams params;

  Chart() = default;
  Chart(ChartTag t, SpaceParams p) : tag(t), params(p) {
    switch (tag) {
      case ChartTag::Cartan:
        break;
      case ChartTag::HalfSpace:
        if (!(params.kappa < 0)) throw SpecError("HalfSpace chart requires kappa < 0");
        break;
      case ChartTag::BergerSphere:
        if (!(params.kappa > 0) || params.tau == 0)
          throw SpecError("BergerSphere chart requires kappa > 0 and tau != 0");
        break;
      case ChartTag::ConformalProduct:
        if (params.tau != 0 || !(params.kappa > 0))
          throw SpecError("ConformalProduct chart requires tau = 0 and kappa > 0");
        params.kappa = 1.0;  // normalized; other kappa reached by homothety
        break;
    }
  }

  /// Effective (kappa, tau) of the metric the chart actually carries.
  /// BergerSphere points live in Cartan coordinates, so the Cartan metric
  /// applies; ConformalProduct is normalized to the unit sphere.
  Real metric_kappa() const { return tag == ChartTag::ConformalProduct ? 1.0 : params.kappa; }
  Real metric_tau() const { return tag == ChartTag::ConformalProduct ? 0.0 : params.tau; }

  bool operator==(const Chart& o) const {
    return tag == o.tag && params.kappa == o.params.kappa && params.tau == o.params.tau;
  }
};

inline Chart cartan_chart(Real kappa, Real tau, Real H = 0.0) {
  return Chart(ChartTag::Cartan, SpaceParams{kappa, tau, H});
}
inline Chart half_space_chart(Real kappa, Real tau, Real H = 0.0) {
  return Chart(ChartTag::HalfSpace, SpaceParams{kappa, tau, H});
}
inline Chart conformal_product_chart() {
  return Chart(ChartTag::ConformalProduct, SpaceParams{1.0, 0.0, 0.0});
}
inline Chart berger_chart(Real kappa, Real tau) {
  return Chart(ChartTag::BergerSphere, SpaceParams{kappa, tau, 0.0});
}

struct AmbientPoint {
  Chart chart;
  Vec3 coords = Vec3::Zero();

  AmbientPoint() = default;
  AmbientPoint(Chart c, Vec3 x) : chart(c), coords(std::move(x)) {}
};

struct TangentVector {
  AmbientPoint base;
  Vec3 components = Vec3::Zero();  // coordinates in the chart basis (dx, dy, dz)

  TangentVector() = default;
  TangentVector(AmbientPoint p, Vec3 v) : base(std::move(p)), components(std::move(v)) {}
};

/// Orthonormal frame at a point; E3 is always the unit Killing field xi.
struct FramePacket {
  TangentVector E1, E2, E3;
  static constexpr int xi_index = 2;
};

}  // namespace ekt
