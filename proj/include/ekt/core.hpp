#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ekt {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Base of all library errors; `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define EKT_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& detail) : Error(#Name, detail) {} \
  }

EKT_DEFINE_ERROR(DomainError);
EKT_DEFINE_ERROR(UnsupportedChart);
EKT_DEFINE_ERROR(UnsupportedPair);
EKT_DEFINE_ERROR(ParamError);
EKT_DEFINE_ERROR(DegenerateImmersion);
EKT_DEFINE_ERROR(SpecError);
EKT_DEFINE_ERROR(KindError);
EKT_DEFINE_ERROR(GeodesicMismatch);
EKT_DEFINE_ERROR(TopologyError);
EKT_DEFINE_ERROR(RollbackError);
EKT_DEFINE_ERROR(StallError);
EKT_DEFINE_ERROR(OpenMeshError);
EKT_DEFINE_ERROR(NoBracket);
EKT_DEFINE_ERROR(ConfigError);

#undef EKT_DEFINE_ERROR

/// Fixed-shape pairwise tree reduction. The summation order depends only on
/// the number of terms, never on thread count, so parallel callers stay
/// bitwise deterministic.
inline Real tree_sum(const std::vector<Real>& terms) {
  if (terms.empty()) return 0.0;
  std::vector<Real> level = terms;
  while (level.size() > 1) {
    std::vector<Real> next((level.size() + 1) / 2);
    for (size_t i = 0; i < next.size(); ++i) {
      const size_t a = 2 * i, b = 2 * i + 1;
      next[i] = b < level.size() ? level[a] + level[b] : level[a];
    }
    level.swap(next);
  }
  return level[0];
}

inline Real fd_step(Real base, Real scale = 1e-6) { return scale * (1.0 + std::abs(base)); }

}  // namespace ekt
