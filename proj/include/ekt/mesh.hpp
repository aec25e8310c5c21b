#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ekt/geometry.hpp"

namespace ekt {

// ---------------------------------------------------------------------------
// Constraints: closed-form idempotent projections.
// ---------------------------------------------------------------------------

struct Constraint {
  enum class Kind {
    LinearPlane,         // plane through the origin with the given normal
    OriginSphere,        // sphere of radius `value` centered at the origin
    CartanSlice,         // z = value
    CartanVerticalPlane  // preimage of a base geodesic through the chart
                         // origin: (x, y) . normal = 0, z free
  };
  Kind kind = Kind::LinearPlane;
  Vec3 normal = Vec3::UnitZ();
  Real value = 0.0;

  static Constraint plane(const Vec3& n) { return {Kind::LinearPlane, n.normalized(), 0.0}; }
  static Constraint sphere(Real r) { return {Kind::OriginSphere, Vec3::UnitZ(), r}; }
  static Constraint slice(Real z0) { return {Kind::CartanSlice, Vec3::UnitZ(), z0}; }
  static Constraint vertical_plane(Real nx, Real ny) {
    Constraint c{Kind::CartanVerticalPlane, Vec3(nx, ny, 0.0), 0.0};
    c.normal.normalize();
    return c;
  }

  Vec3 project(const Vec3& p) const {
    switch (kind) {
      case Kind::LinearPlane:
        return p - p.dot(normal) * normal;
      case Kind::OriginSphere: {
        const Real n = p.norm();
        if (n < 1e-300) throw DomainError("sphere constraint: point at the origin");
        return (value / n) * p;
      }
      case Kind::CartanSlice:
        return Vec3(p.x(), p.y(), value);
      case Kind::CartanVerticalPlane:
        return p - p.dot(normal) * normal;
    }
    return p;
  }

  /// Unit normal of the constraint surface at an on-constraint point.
  Vec3 surface_normal(const Vec3& p) const {
    switch (kind) {
      case Kind::LinearPlane:
      case Kind::CartanVerticalPlane:
        return normal;
      case Kind::OriginSphere:
        return p.normalized();
      case Kind::CartanSlice:
        return Vec3::UnitZ();
    }
    return normal;
  }

  Real violation(const Vec3& p) const { return (p - project(p)).norm(); }
};

// ---------------------------------------------------------------------------
// Triangulated surface.
// ---------------------------------------------------------------------------

struct MeshVertex {
  Vec3 p = Vec3::Zero();
  std::vector<int> constraints;  // indices into TriMesh::constraints
  bool fixed = false;
  bool boundary = false;  // derived: touches a boundary edge
};

struct EdgeInfo {
  int v0 = -1, v1 = -1;
  int facet_count = 0;
  std::array<int, 2> facets{-1, -1};
  std::array<int, 2> opposite{-1, -1};  // vertex opposite the edge in each facet
};

struct TriMesh {
  Chart chart;
  std::vector<MeshVertex> vertices;
  std::vector<std::array<int, 3>> facets;
  std::vector<Constraint> constraints;
  Real facet_floor = 1e-12;

  static uint64_t edge_key(int a, int b) {
    return (uint64_t(std::min(a, b)) << 32) | uint64_t(std::max(a, b));
  }
};

inline std::unordered_map<uint64_t, EdgeInfo> build_edges(const TriMesh& m) {
  std::unordered_map<uint64_t, EdgeInfo> edges;
  edges.reserve(m.facets.size() * 2);
  for (int f = 0; f < int(m.facets.size()); ++f) {
    const auto& t = m.facets[f];
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3], c = t[(e + 2) % 3];
      EdgeInfo& info = edges[TriMesh::edge_key(a, b)];
      info.v0 = std::min(a, b);
      info.v1 = std::max(a, b);
      if (info.facet_count < 2) {
        info.facets[info.facet_count] = f;
        info.opposite[info.facet_count] = c;
      }
      info.facet_count++;
    }
  }
  return edges;
}

/// Re-derive per-vertex boundary flags from the facet graph.
inline void update_boundary_flags(TriMesh& m) {
  for (auto& v : m.vertices) v.boundary = false;
  for (const auto& [key, info] : build_edges(m))
    if (info.facet_count == 1) {
      m.vertices[info.v0].boundary = true;
      m.vertices[info.v1].boundary = true;
    }
}

/// Constraint ids shared by both endpoints (the set the edge lies on).
inline std::vector<int> edge_constraints(const TriMesh& m, int a, int b) {
  std::vector<int> out;
  for (int c : m.vertices[a].constraints)
    for (int d : m.vertices[b].constraints)
      if (c == d) out.push_back(c);
  return out;
}

/// Apply the constraint projections of `ids` cyclically until stationary
/// (planes and slices first, spheres last; one pass is exact for the
/// combinations used here).
inline Vec3 project_to_constraints(const TriMesh& m, const std::vector<int>& ids, Vec3 p) {
  if (ids.empty()) return p;
  std::vector<int> order(ids);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool sa = m.constraints[a].kind == Constraint::Kind::OriginSphere;
    const bool sb = m.constraints[b].kind == Constraint::Kind::OriginSphere;
    return !sa && sb;
  });
  for (int pass = 0; pass < 50; ++pass) {
    Real worst = 0.0;
    for (int id : order) {
      p = m.constraints[id].project(p);
    }
    for (int id : order) worst = std::max(worst, m.constraints[id].violation(p));
    if (worst < 1e-13) break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Measures.
// ---------------------------------------------------------------------------

/// Riemannian facet area: one-point quadrature with the metric at the
/// coordinate centroid.
inline Real facet_area(const TriMesh& m, const std::array<int, 3>& t) {
  const Vec3& A = m.vertices[t[0]].p;
  const Vec3& B = m.vertices[t[1]].p;
  const Vec3& C = m.vertices[t[2]].p;
  const Vec3 centroid = (A + B + C) / 3.0;
  if (!in_domain(m.chart, centroid)) throw DomainError("facet centroid left the chart");
  const Mat3 g = metric_at({m.chart, centroid});
  const Vec3 e1 = B - A, e2 = C - A;
  const Real g11 = e1.dot(g * e1), g22 = e2.dot(g * e2), g12 = e1.dot(g * e2);
  const Real d = g11 * g22 - g12 * g12;
  return 0.5 * std::sqrt(std::max(0.0, d));
}

inline std::vector<Real> facet_areas(const TriMesh& m) {
  std::vector<Real> areas(m.facets.size());
  for (size_t f = 0; f < m.facets.size(); ++f) areas[f] = facet_area(m, m.facets[f]);
  return areas;
}

inline Real riemannian_area(const TriMesh& m) { return tree_sum(facet_areas(m)); }

/// Riemannian edge length (midpoint metric).
inline Real edge_length(const TriMesh& m, int a, int b) {
  const Vec3 e = m.vertices[b].p - m.vertices[a].p;
  const Vec3 mid = 0.5 * (m.vertices[a].p + m.vertices[b].p);
  return std::sqrt(e.dot(metric_at({m.chart, mid}) * e));
}

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------

struct ValidationReport {
  bool ok = true;
  std::string detail;
};

inline ValidationReport validate(const TriMesh& m, Real constraint_tol = 1e-9) {
  auto fail = [](std::string d) { return ValidationReport{false, std::move(d)}; };
  const int n = int(m.vertices.size());
  std::set<std::pair<int, int>> directed;
  for (const auto& t : m.facets) {
    for (int e = 0; e < 3; ++e) {
      if (t[e] < 0 || t[e] >= n) return fail("facet vertex out of range");
      if (t[e] == t[(e + 1) % 3]) return fail("degenerate facet (repeated vertex)");
      if (!directed.insert({t[e], t[(e + 1) % 3]}).second)
        return fail("directed edge repeated: inconsistent orientation or non-manifold");
    }
  }
  for (const auto& [key, info] : build_edges(m))
    if (info.facet_count > 2) return fail("edge with more than two facets");
  for (size_t i = 0; i < m.vertices.size(); ++i)
    for (int c : m.vertices[i].constraints)
      if (m.constraints[c].violation(m.vertices[i].p) > constraint_tol)
        return fail("vertex " + std::to_string(i) + " violates constraint " + std::to_string(c));
  for (const auto& t : m.facets)
    if (facet_area(m, t) <= m.facet_floor) return fail("facet below the area floor");
  return {};
}

// ---------------------------------------------------------------------------
// Refinement.
// ---------------------------------------------------------------------------

/// Uniform 1 -> 4 split at edge midpoints. Midpoints inherit the constraint
/// set shared by the edge's endpoints and are projected onto it; V' = V + E,
/// F' = 4F.
inline TriMesh refine(const TriMesh& m) {
  TriMesh out = m;
  std::unordered_map<uint64_t, int> midpoint;
  auto mid_of = [&](int a, int b) {
    const uint64_t key = TriMesh::edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    MeshVertex v;
    v.constraints = edge_constraints(m, a, b);
    v.fixed = m.vertices[a].fixed && m.vertices[b].fixed;
    v.p = project_to_constraints(out, v.constraints,
                                 0.5 * (m.vertices[a].p + m.vertices[b].p));
    const int idx = int(out.vertices.size());
    out.vertices.push_back(std::move(v));
    midpoint.emplace(key, idx);
    return idx;
  };
  std::vector<std::array<int, 3>> facets;
  facets.reserve(4 * m.facets.size());
  for (const auto& t : m.facets) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = mid_of(a, b), bc = mid_of(b, c), ca = mid_of(c, a);
    facets.push_back({a, ab, ca});
    facets.push_back({b, bc, ab});
    facets.push_back({c, ca, bc});
    facets.push_back({ab, bc, ca});
  }
  out.facets = std::move(facets);
  update_boundary_flags(out);
  return out;
}

// ---------------------------------------------------------------------------
// Vertex averaging.
// ---------------------------------------------------------------------------

struct AverageReport {
  TriMesh mesh;
  int moved = 0;
  int skipped = 0;  // rollbacks: the move would shrink a facet below the
                    // floor or grow the local star area
  Real max_displacement = 0.0;
};

/// Move each movable vertex to the Riemannian-area-weighted average of its
/// adjacent facet centroids, then re-project onto its constraints. Boundary
/// vertices slide along the boundary (average of their two boundary
/// neighbors). A per-vertex rollback keeps the total area from growing.
inline AverageReport vertex_average(const TriMesh& m) {
  AverageReport rep{m};
  TriMesh& out = rep.mesh;
  update_boundary_flags(out);

  std::vector<std::vector<int>> star(out.vertices.size());
  for (int f = 0; f < int(out.facets.size()); ++f)
    for (int k = 0; k < 3; ++k) star[out.facets[f][k]].push_back(f);

  std::vector<std::vector<int>> boundary_nbrs(out.vertices.size());
  for (const auto& [key, info] : build_edges(out))
    if (info.facet_count == 1) {
      boundary_nbrs[info.v0].push_back(info.v1);
      boundary_nbrs[info.v1].push_back(info.v0);
    }

  for (int i = 0; i < int(out.vertices.size()); ++i) {
    MeshVertex& v = out.vertices[i];
    if (v.fixed || star[i].empty()) continue;
    Vec3 target;
    if (v.boundary) {
      if (boundary_nbrs[i].size() != 2) continue;
      // slide along the boundary only where it is straight; corners stay put
      const Vec3 d1 = (out.vertices[boundary_nbrs[i][0]].p - v.p).normalized();
      const Vec3 d2 = (out.vertices[boundary_nbrs[i][1]].p - v.p).normalized();
      if (d1.dot(d2) > -0.9) continue;
      target = 0.5 * (out.vertices[boundary_nbrs[i][0]].p + out.vertices[boundary_nbrs[i][1]].p);
    } else {
      Real wsum = 0.0;
      Vec3 acc = Vec3::Zero();
      for (int f : star[i]) {
        const auto& t = out.facets[f];
        const Real w = facet_area(out, t);
        acc += w * (out.vertices[t[0]].p + out.vertices[t[1]].p + out.vertices[t[2]].p) / 3.0;
        wsum += w;
      }
      if (wsum <= 0.0) continue;
      target = acc / wsum;
    }
    target = project_to_constraints(out, v.constraints, target);

    Real before = 0.0;
    for (int f : star[i]) before += facet_area(out, out.facets[f]);
    const Vec3 old = v.p;
    v.p = target;
    Real after = 0.0;
    bool valid = in_domain(out.chart, v.p);
    if (valid) {
      try {
        for (int f : star[i]) {
          const Real a = facet_area(out, out.facets[f]);
          if (a < out.facet_floor) {
            valid = false;
            break;
          }
          after += a;
        }
      } catch (const DomainError&) {
        valid = false;
      }
    }
    if (!valid || after > before * (1.0 + 1e-12)) {
      v.p = old;  // rollback
      rep.skipped++;
      continue;
    }
    rep.moved++;
    rep.max_displacement = std::max(rep.max_displacement, (v.p - old).norm());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Edge flips.
// ---------------------------------------------------------------------------

struct FlipReport {
  TriMesh mesh;
  int flips = 0;
};

/// Flip interior unconstrained edges whenever the flip strictly decreases
/// the maximum Riemannian edge length of the surrounding quad. Each flip
/// replaces the diagonal by a strictly shorter one, so the pass terminates.
inline FlipReport equitriangulate(const TriMesh& m) {
  FlipReport rep{m};
  TriMesh& out = rep.mesh;
  bool flipped = true;
  while (flipped) {
    flipped = false;
    const auto edges = build_edges(out);
    for (const auto& [key, info] : edges) {
      if (info.facet_count != 2) continue;  // boundary edges stay
      const int i = info.v0, j = info.v1;
      if (!edge_constraints(out, i, j).empty()) continue;
      const int k = info.opposite[0], l = info.opposite[1];
      if (k == l) continue;
      if (edges.count(TriMesh::edge_key(k, l))) continue;  // would duplicate an edge
      Real quad = 0.0;
      for (auto [a, b] : {std::pair{i, k}, {k, j}, {j, l}, {l, i}})
        quad = std::max(quad, edge_length(out, a, b));
      const Real before = std::max(quad, edge_length(out, i, j));
      const Real after = std::max(quad, edge_length(out, k, l));
      if (after >= before - 1e-12) continue;

      // rebuild the two facets with the new diagonal, preserving orientation
      const int f0 = info.facets[0], f1 = info.facets[1];
      auto has_directed = [&](int f, int a, int b) {
        const auto& t = out.facets[f];
        for (int e = 0; e < 3; ++e)
          if (t[e] == a && t[(e + 1) % 3] == b) return true;
        return false;
      };
      int a = i, b = j;
      if (!has_directed(f0, i, j)) std::swap(a, b);  // f0 holds (a -> b)
      const std::array<int, 3> n0{k, a, l}, n1{l, b, k};
      try {
        if (facet_area(out, n0) < out.facet_floor || facet_area(out, n1) < out.facet_floor)
          continue;
      } catch (const DomainError&) {
        continue;
      }
      out.facets[f0] = n0;
      out.facets[f1] = n1;
      rep.flips++;
      flipped = true;
      break;  // the edge map changed: restart the sweep
    }
  }
  update_boundary_flags(out);
  return rep;
}

// ---------------------------------------------------------------------------
// Degenerate-element removal.
// ---------------------------------------------------------------------------

struct CullReport {
  TriMesh mesh;
  int collapsed = 0;
  int skipped_topology = 0;
};

namespace detail {

inline int constraint_rank(const MeshVertex& v) {
  return v.fixed ? 1000 : int(v.constraints.size());
}

inline bool link_condition(const TriMesh& m, const std::unordered_map<uint64_t, EdgeInfo>& edges,
                           int i, int j) {
  // common neighbors of i and j must be exactly the opposite vertices of the
  // facets sharing edge (i, j)
  std::set<int> nbr_i, nbr_j;
  for (const auto& [key, info] : edges) {
    if (info.v0 == i) nbr_i.insert(info.v1);
    if (info.v1 == i) nbr_i.insert(info.v0);
    if (info.v0 == j) nbr_j.insert(info.v1);
    if (info.v1 == j) nbr_j.insert(info.v0);
  }
  std::vector<int> common;
  std::set_intersection(nbr_i.begin(), nbr_i.end(), nbr_j.begin(), nbr_j.end(),
                        std::back_inserter(common));
  const auto it = edges.find(TriMesh::edge_key(i, j));
  if (it == edges.end()) return false;
  std::set<int> allowed;
  for (int s = 0; s < it->second.facet_count; ++s) allowed.insert(it->second.opposite[s]);
  return std::set<int>(common.begin(), common.end()) == allowed;
}

inline void collapse_edge(TriMesh& m, int from, int into) {
  for (auto& t : m.facets)
    for (int e = 0; e < 3; ++e)
      if (t[e] == from) t[e] = into;
  m.facets.erase(std::remove_if(m.facets.begin(), m.facets.end(),
                                [](const std::array<int, 3>& t) {
                                  return t[0] == t[1] || t[1] == t[2] || t[0] == t[2];
                                }),
                 m.facets.end());
  // drop the orphaned vertex by swapping with the last one
  const int last = int(m.vertices.size()) - 1;
  if (from != last) {
    m.vertices[from] = m.vertices[last];
    for (auto& t : m.facets)
      for (int e = 0; e < 3; ++e)
        if (t[e] == last) t[e] = from;
  }
  m.vertices.pop_back();
}

}  // namespace detail

/// Collapse edges shorter than min_edge and facets below min_area (via their
/// shortest edge), respecting constraints: a collapse moves the less
/// constrained endpoint into the more constrained one and never merges
/// distinct constraint sets across a boundary. Collapses that would pinch
/// the surface are skipped.
inline CullReport cull_degenerate(const TriMesh& m, Real min_edge, Real min_area) {
  CullReport rep{m};
  TriMesh& out = rep.mesh;
  update_boundary_flags(out);
  for (int round = 0; round < 1000; ++round) {
    auto edges = build_edges(out);
    // candidate edges: short ones, plus the shortest edge of under-floor facets
    std::vector<std::pair<Real, std::pair<int, int>>> cands;
    for (const auto& [key, info] : edges) {
      const Real len = edge_length(out, info.v0, info.v1);
      if (len < min_edge) cands.push_back({len, {info.v0, info.v1}});
    }
    for (const auto& t : out.facets) {
      if (facet_area(out, t) >= min_area) continue;
      Real shortest = 1e300;
      std::pair<int, int> e{-1, -1};
      for (int k = 0; k < 3; ++k) {
        const Real len = edge_length(out, t[k], t[(k + 1) % 3]);
        if (len < shortest) {
          shortest = len;
          e = {t[k], t[(k + 1) % 3]};
        }
      }
      cands.push_back({shortest, e});
    }
    if (cands.empty()) break;
    std::sort(cands.begin(), cands.end());

    bool collapsed = false;
    for (const auto& [len, e] : cands) {
      const int ci = e.first, cj = e.second;
      const MeshVertex& vi = out.vertices[ci];
      const MeshVertex& vj = out.vertices[cj];
      const auto shared = edge_constraints(out, ci, cj);
      // never merge distinct constraint sets: the smaller set must be
      // contained in the larger one, and we collapse toward the larger
      const bool nested =
          shared.size() == std::min(vi.constraints.size(), vj.constraints.size());
      if ((vi.fixed && vj.fixed) || !nested ||
          !detail::link_condition(out, edges, ci, cj)) {
        rep.skipped_topology++;
        continue;
      }
      int keep = ci, drop = cj;
      if (detail::constraint_rank(vj) > detail::constraint_rank(vi)) std::swap(keep, drop);
      detail::collapse_edge(out, drop, keep);
      rep.collapsed++;
      collapsed = true;
      break;  // topology changed: recompute candidates
    }
    if (!collapsed) break;
  }
  update_boundary_flags(out);
  return rep;
}

// ---------------------------------------------------------------------------
// File formats.
// ---------------------------------------------------------------------------

inline void write_off(const TriMesh& m, std::ostream& os) {
  os << "OFF\n" << m.vertices.size() << ' ' << m.facets.size() << " 0\n";
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", v.p.x(), v.p.y(), v.p.z());
    os << buf;
  }
  for (const auto& t : m.facets) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

inline void write_obj(const TriMesh& m, std::ostream& os) {
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "v %.12g %.12g %.12g\n", v.p.x(), v.p.y(), v.p.z());
    os << buf;
  }
  for (const auto& t : m.facets)
    os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

/// Read the declarative datafile format (see docs/datafile.md): a `chart`
/// header line, then `[constraints]`, `[vertices]`, `[edges]` (optional,
/// informational) and `[faces]` sections, whitespace separated, `#` comments.
inline TriMesh read_datafile(std::istream& is) {
  TriMesh m;
  m.chart = cartan_chart(0.0, 0.0);
  std::string line, section;
  std::map<long, int> vertex_ids, constraint_ids;
  bool have_chart = false;
  int lineno = 0;
  auto parse_error = [&](const std::string& what) {
    throw ConfigError("datafile line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    if (tok.front() == '[') {
      section = tok.substr(1, tok.find(']') - 1);
      continue;
    }
    if (section.empty()) {
      if (tok == "chart") {
        std::string name;
        ss >> name;
        Real k = 0, t = 0;
        if (name == "cartan" || name == "halfspace" || name == "berger") {
          if (!(ss >> k >> t)) parse_error("chart needs kappa and tau");
        }
        if (name == "cartan")
          m.chart = cartan_chart(k, t);
        else if (name == "halfspace")
          m.chart = half_space_chart(k, t);
        else if (name == "berger")
          m.chart = berger_chart(k, t);
        else if (name == "conformal")
          m.chart = conformal_product_chart();
        else
          parse_error("unknown chart '" + name + "'");
        have_chart = true;
      } else if (tok == "facet_floor") {
        ss >> m.facet_floor;
      } else {
        parse_error("unexpected token '" + tok + "' before any section");
      }
      continue;
    }
    if (section == "constraints") {
      const long id = std::stol(tok);
      std::string kind;
      if (!(ss >> kind)) parse_error("constraint needs a kind");
      Constraint c;
      if (kind == "plane") {
        Real nx, ny, nz;
        if (!(ss >> nx >> ny >> nz)) parse_error("plane needs a normal");
        c = Constraint::plane(Vec3(nx, ny, nz));
      } else if (kind == "sphere") {
        Real r;
        if (!(ss >> r)) parse_error("sphere needs a radius");
        c = Constraint::sphere(r);
      } else if (kind == "slice") {
        Real z;
        if (!(ss >> z)) parse_error("slice needs a height");
        c = Constraint::slice(z);
      } else if (kind == "vplane") {
        Real nx, ny;
        if (!(ss >> nx >> ny)) parse_error("vplane needs a horizontal normal");
        c = Constraint::vertical_plane(nx, ny);
      } else {
        parse_error("unknown constraint kind '" + kind + "'");
      }
      if (!constraint_ids.emplace(id, int(m.constraints.size())).second)
        parse_error("duplicate constraint id");
      m.constraints.push_back(c);
    } else if (section == "vertices") {
      const long id = std::stol(tok);
      MeshVertex v;
      if (!(ss >> v.p.x() >> v.p.y() >> v.p.z())) parse_error("vertex needs 3 coordinates");
      std::string extra;
      while (ss >> extra) {
        if (extra == "fixed") {
          v.fixed = true;
        } else if (extra == "c") {
          long cid;
          while (ss >> cid) {
            auto it = constraint_ids.find(cid);
            if (it == constraint_ids.end()) parse_error("unknown constraint id");
            v.constraints.push_back(it->second);
          }
          ss.clear();
        } else {
          parse_error("unexpected vertex token '" + extra + "'");
        }
      }
      if (!vertex_ids.emplace(id, int(m.vertices.size())).second)
        parse_error("duplicate vertex id");
      m.vertices.push_back(std::move(v));
    } else if (section == "edges") {
      long a, b;
      if (!(ss >> a >> b)) parse_error("edge needs two vertex ids");
      if (!vertex_ids.count(a) || !vertex_ids.count(b)) parse_error("edge uses unknown vertex");
      // connectivity is derived from faces; the section is validated only
    } else if (section == "faces") {
      long a, b, c;
      if (!(ss >> a >> b >> c)) parse_error("face needs three vertex ids");
      for (long id : {a, b, c})
        if (!vertex_ids.count(id)) parse_error("face uses unknown vertex");
      m.facets.push_back({vertex_ids[a], vertex_ids[b], vertex_ids[c]});
    } else {
      parse_error("unknown section '" + section + "'");
    }
  }
  if (!have_chart) throw ConfigError("datafile: missing chart line");
  update_boundary_flags(m);
  return m;
}

inline TriMesh read_datafile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open datafile: " + path);
  return read_datafile(is);
}

}  // namespace ekt
