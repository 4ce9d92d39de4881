#ifndef OKFLOW_GROMOV_HPP
#define OKFLOW_GROMOV_HPP

#include "okflow/polytope.hpp"

#include <string>
#include <vector>

namespace okflow {

// A size-R simplex witness: the image of the closed standard simplex
// conv{0, R e_1, ..., R e_n} under x -> W x + a, claimed to sit inside the
// interior of the target. When the optimum is attained only as a supremum
// (boundary contact at R itself), open_supremum is set and a strictly
// interior witness at witness_size < size is carried alongside.
struct SimplexCertificate {
  UnimodularAffineMap map;
  Rat size;
  bool open_supremum = false;
  UnimodularAffineMap witness_map;
  Rat witness_size;
  QPolytope target;

  std::string to_json() const;
  static SimplexCertificate from_json(const std::string& text);
};

// Exact check. Returns false (with the violated facet in *why) instead of
// throwing on an invalid certificate.
bool verify_simplex_certificate(const SimplexCertificate& cert, std::string* why = nullptr);

// Verified heuristic: signed permutations always, plus every W in GL(n, Z)
// with entries bounded by max_entry, each optimized exactly over (a, R) by
// LP. The returned certificate always verifies; maximality is not claimed.
SimplexCertificate search_largest_simplex(const QPolytope& target, std::int64_t max_entry);

// conv{0, e_1, ..., e_{n-1}, d e_n}; normalized volume d for integer d.
QPolytope simplicial_nobody(std::size_t n, const Rat& d);

struct PackingPiece {
  std::vector<QVec> vertices;   // n+1 lattice vertices
  UnimodularAffineMap to_unit;  // sends the vertices onto {0, e_1, ..., e_n}
};

struct PackingCertificate {
  std::size_t n = 0;
  std::int64_t d = 0;
  QPolytope ambient;
  std::vector<PackingPiece> pieces;
  // separators[i][j]: hyperplane <normal, x> = offset with piece i on the
  // <= side and piece j on the >= side, for i < j.
  struct Separator {
    std::size_t lo = 0, hi = 0;
    std::vector<Int> normal;
    Rat offset;
  };
  std::vector<Separator> separators;

  std::string to_json() const;
  static PackingCertificate from_json(const std::string& text);
};

// The d unimodular simplices conv{e_1,...,e_{n-1},(i-1)e_n, i e_n} tiling
// conv{0, e_1, ..., e_{n-1}, d e_n}, with maps to the unit simplex.
PackingCertificate packing_subdivision(std::size_t n, std::int64_t d);

// Re-checks everything: per-piece unimodularity, unit normalized volume,
// vertex images, containment, separators, empty lattice interiors, and the
// exact volume sum. Throws certificate_error on the first failure.
void verify_packing_certificate(const PackingCertificate& cert);

struct SubSimplexResult {
  QPolytope simplex;
  bool contained = false;
  std::size_t boundary_contacts = 0; // vertex-facet incidences on the boundary
};

// conv{0, e_1, ..., e_{n-1}, d' e_n} with verified containment in
// simplicial_nobody(n, d). Requires 0 < d' <= d.
SubSimplexResult sub_simplex_dprime(std::size_t n, std::int64_t d, const Rat& d_prime);

} // namespace okflow

#endif
