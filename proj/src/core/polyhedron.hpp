#pragma once

// Exact rational polyhedral geometry.
//
// Polyhedra are kept in both descriptions at once: an irredundant canonical
// H-representation and the vertex/ray V-representation produced by an
// incremental double-description pass over the homogenization cone.
// Everything here is exact; doubles never enter.
//
// Lineality is not modeled: a polyhedron whose homogenization cone is not
// pointed is rejected (ErrorKind::Lineality). Reeb cones, which legitimately
// carry lineality, are handled by `dual_cone` below which reports a lineality
// basis explicitly.

#include <optional>
#include <vector>

#include "linalg.hpp"
#include "rational.hpp"

namespace soliton {

struct Halfspace {
  RatVec normal;  // nonzero
  Rat offset;     // the set {a : <a, normal> + offset >= 0}
};

struct GeneralizedSimplex {
  std::vector<RatVec> apexes;  // k >= 1, affinely independent
  std::vector<RatVec> rays;    // j >= 0, linearly independent, k + j = dim + 1
  Rat jacobian;                // |det| of the affine parametrization, > 0
};

inline constexpr int kMaxDim = 6;

class Polyhedron {
 public:
  Polyhedron() = default;  // empty placeholder; construct via from_halfspaces

  // Dual description of an H-representation. Throws InfeasibleSystem when
  // the intersection is empty, UnsupportedDimension when n > 6, Lineality
  // when the set contains a line.
  static Polyhedron from_halfspaces(std::vector<Halfspace> hs);

  int dim() const { return dim_; }
  int affine_dim() const;
  bool full_dim() const { return affine_dim() == dim_; }
  bool bounded() const { return rays_.empty(); }

  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<RatVec>& vertices() const { return vertices_; }
  const std::vector<RatVec>& rays() const { return rays_; }

  bool contains(const RatVec& p) const;
  bool strictly_contains(const RatVec& p) const;

  // Cone with apex 0 spanned by the recession directions of this set.
  Polyhedron recession_cone() const;

  Polyhedron intersect(const Halfspace& h) const;
  Polyhedron translate(const RatVec& v) const;
  Polyhedron dilate(const Rat& c) const;

  // Cells with pairwise disjoint interiors covering the polyhedron.
  // Requires a full-dimensional set (DegenerateInput otherwise).
  std::vector<GeneralizedSimplex> triangulate() const;

  // Exact Euclidean volume; UnboundedPolyhedron when rays are present.
  Rat volume() const;

  // Integer points of m * P in lexicographic order.
  std::vector<std::vector<long>> lattice_points(long m) const;

  // min over the polyhedron of <a, w>; nullopt when unbounded below.
  std::optional<Rat> min_inner(const RatVec& w) const;

  // d/dt vol(P cap {<w,a> <= t}) at a chamber-interior t, exact.
  Rat slice_derivative(const RatVec& w, const Rat& t) const;

 private:
  int dim_ = 0;
  std::vector<Halfspace> halfspaces_;  // irredundant, primitive, lex-sorted
  std::vector<RatVec> vertices_;       // lex-sorted
  std::vector<RatVec> rays_;           // primitive, lex-sorted
};

// Extreme rays of {x : <g, x> >= 0 for all g in generators} together with a
// basis of its lineality space. Works in any dimension <= kMaxDim.
struct DualCone {
  std::vector<RatVec> rays;       // extreme rays of the pointed quotient, lifted
  std::vector<RatVec> lineality;  // basis rows, empty when pointed
};
DualCone dual_cone(const std::vector<RatVec>& generators, int dim);

}  // namespace soliton
