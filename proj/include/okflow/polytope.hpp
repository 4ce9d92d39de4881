#ifndef OKFLOW_POLYTOPE_HPP
#define OKFLOW_POLYTOPE_HPP

#include "okflow/lattice.hpp"
#include "okflow/rational.hpp"

#include <string>
#include <vector>

namespace okflow {

// Outward facet inequality <normal, x> <= offset with primitive integer normal.
struct HalfSpace {
  std::vector<Int> normal;
  Rat offset;

  Rat eval(const QVec& p) const; // <normal, p> - offset; <= 0 inside
};

// Rational-vertex polytope. Vertices are exactly the extreme points, stored in
// lexicographic order so that equal polytopes compare equal. The half-space
// list is populated only for full-dimensional polytopes (dim == ambient
// arity); lower-dimensional hulls carry their intrinsic dimension and reject
// volume queries.
class QPolytope {
public:
  QPolytope() = default; // empty placeholder; real instances come from convex_hull

  static QPolytope convex_hull(const std::vector<QVec>& points);

  std::size_t ambient_dim() const { return n_; }
  std::size_t dim() const { return dim_; }
  bool full_dimensional() const { return dim_ == n_; }
  const std::vector<QVec>& vertices() const { return vertices_; }
  const std::vector<HalfSpace>& half_spaces() const; // throws if not full-dim

  // n! times the Euclidean volume, by fan triangulation from the lex-smallest
  // vertex. Throws input_error("degenerate polytope") unless full-dimensional.
  Rat normalized_volume() const;
  Rat euclidean_volume() const;

  // Every vertex of q strictly inside every facet of *this (full-dim only).
  bool contains_in_interior(const QPolytope& q) const;
  // Non-strict variant; on failure *separating reports an offending vertex.
  bool contains(const QPolytope& q, QVec* separating = nullptr) const;

  bool operator==(const QPolytope& rhs) const;

  // Fan triangulation used for the volume; exposed for tests. Each simplex is
  // a list of dim+1 vertices.
  std::vector<std::vector<QVec>> triangulate() const;

  std::string to_json() const;
  static QPolytope from_json(const std::string& text);

private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<QVec> vertices_;
  std::vector<HalfSpace> half_spaces_;
};

// Delta_k = hull of { alpha/k : alpha in A_k }. k must be positive.
QPolytope delta_k(const std::vector<LatticeVector>& a_k, std::int64_t k);

QPolytope hull_of_lattice_points(const std::vector<LatticeVector>& pts);

// Exact Euclidean vol(outer) - vol(inner); verifies inner is contained in
// outer and throws input_error naming a separating vertex otherwise.
Rat volume_gap(const QPolytope& outer, const QPolytope& inner);

} // namespace okflow

#endif
