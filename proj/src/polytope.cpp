#include "okflow/polytope.hpp"

#include "okflow/errors.hpp"
#include "okflow/qlinalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace okflow {

namespace {

Rat eval_normal(const std::vector<Int>& normal, const QVec& p) {
  Rat s = 0;
  for (std::size_t i = 0; i < normal.size(); ++i) s += Rat(normal[i]) * p[i];
  return s;
}

// Integer primitive direction of a rational vector (clears denominators,
// divides by the gcd). Zero vector stays zero.
std::vector<Int> primitive_direction(const QVec& v) {
  Int lcm = 1;
  for (const auto& x : v) {
    Int d = rat_den(x);
    lcm = lcm / mp::gcd(lcm, d) * d;
  }
  std::vector<Int> out(v.size());
  Int g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = rat_num(v[i]) * (lcm / rat_den(v[i]));
    g = mp::gcd(g, int_abs(out[i]));
  }
  if (g > 1)
    for (auto& x : out) x /= g;
  return out;
}

// Normal of the hyperplane spanned by rows (n-1 difference vectors in Q^n),
// via the generalized cross product: component i is +/- the minor with
// column i removed. All-zero means the rows are dependent.
QVec hyperplane_normal(const QMat& rows) {
  const std::size_t n = rows.empty() ? 1 : rows[0].size();
  QVec normal(n, Rat(0));
  for (std::size_t skip = 0; skip < n; ++skip) {
    QMat minor;
    minor.reserve(rows.size());
    for (const auto& r : rows) {
      QVec mr;
      mr.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != skip) mr.push_back(r[j]);
      minor.push_back(mr);
    }
    Rat d = qmat_det(minor);
    normal[skip] = (skip % 2 == 0) ? d : -d;
  }
  return normal;
}

std::vector<QVec> dedup_sorted(std::vector<QVec> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Greedy affine basis: returns indices of points whose differences from
// pts[0] are independent, so their count is the intrinsic dimension.
std::vector<std::size_t> affine_basis(const std::vector<QVec>& pts) {
  std::vector<std::size_t> basis;
  QMat rows;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    QMat trial = rows;
    QVec d(pts[0].size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = pts[i][j] - pts[0][j];
    trial.push_back(d);
    if (qmat_rank(trial) == trial.size()) {
      rows = trial;
      basis.push_back(i);
    }
  }
  return basis;
}

// Exact coordinates of p - origin in the given independent directions.
QVec local_coordinates(const QMat& dirs, const QVec& origin, const QVec& p) {
  // Solve dirs^T * lambda = p - origin; dirs rows are the directions.
  const std::size_t n = origin.size(), d = dirs.size();
  QMat a(n, QVec(d));
  QVec b(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) a[i][j] = dirs[j][i];
    b[i] = p[i] - origin[i];
  }
  auto sol = qmat_solve(a, b);
  if (!sol) throw input_error("convex_hull: point outside affine span");
  return *sol;
}

void enumerate_subsets(std::size_t m, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

} // namespace

Rat HalfSpace::eval(const QVec& p) const { return eval_normal(normal, p) - offset; }

QPolytope QPolytope::convex_hull(const std::vector<QVec>& points) {
  if (points.empty()) throw input_error("convex_hull: empty input");
  const std::size_t n = points[0].size();
  for (const auto& p : points)
    if (p.size() != n) throw input_error("convex_hull: mixed arities");
  if (n > 4) throw input_error("convex_hull: ambient dimension > 4 unsupported");

  std::vector<QVec> pts = dedup_sorted(points);

  QPolytope poly;
  poly.n_ = n;

  auto basis_idx = affine_basis(pts);
  const std::size_t dim = basis_idx.size();
  poly.dim_ = dim;

  if (dim == 0) {
    poly.vertices_ = {pts[0]};
    return poly;
  }

  if (dim < n) {
    // Hull in exact local coordinates of the affine span, then pull the
    // extreme points back. Affine isos preserve extremality.
    QMat dirs;
    for (auto i : basis_idx) {
      QVec d(n);
      for (std::size_t j = 0; j < n; ++j) d[j] = pts[i][j] - pts[0][j];
      dirs.push_back(d);
    }
    std::vector<QVec> local;
    local.reserve(pts.size());
    std::map<QVec, QVec> back;
    for (const auto& p : pts) {
      QVec lp = local_coordinates(dirs, pts[0], p);
      back[lp] = p;
      local.push_back(lp);
    }
    QPolytope sub = convex_hull(local);
    for (const auto& lv : sub.vertices()) poly.vertices_.push_back(back.at(lv));
    std::sort(poly.vertices_.begin(), poly.vertices_.end());
    return poly;
  }

  // Full-dimensional: every facet hyperplane passes through n affinely
  // independent input points, so enumerating n-subsets finds them all.
  std::map<std::vector<Int>, Rat> facets;
  enumerate_subsets(pts.size(), n, [&](const std::vector<std::size_t>& idx) {
    QMat diffs;
    for (std::size_t k = 1; k < n; ++k) {
      QVec d(n);
      for (std::size_t j = 0; j < n; ++j) d[j] = pts[idx[k]][j] - pts[idx[0]][j];
      diffs.push_back(d);
    }
    QVec normal = n == 1 ? QVec{Rat(1)} : hyperplane_normal(diffs);
    bool zero = std::all_of(normal.begin(), normal.end(), [](const Rat& x) { return x == 0; });
    if (zero) return;
    std::vector<Int> prim = primitive_direction(normal);
    Rat b = eval_normal(prim, pts[idx[0]]);
    bool all_le = true, all_ge = true;
    for (const auto& p : pts) {
      Rat v = eval_normal(prim, p);
      if (v > b) all_le = false;
      if (v < b) all_ge = false;
      if (!all_le && !all_ge) return;
    }
    if (all_le) {
      facets.emplace(prim, b);
    }
    if (all_ge) {
      std::vector<Int> neg(prim.size());
      for (std::size_t j = 0; j < n; ++j) neg[j] = -prim[j];
      facets.emplace(neg, -b);
    }
  });

  for (auto& [normal, offset] : facets) poly.half_spaces_.push_back(HalfSpace{normal, offset});

  // A point is extreme iff its active facet normals span R^n.
  for (const auto& p : pts) {
    QMat active;
    for (const auto& hs : poly.half_spaces_)
      if (hs.eval(p) == 0) {
        QVec row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = Rat(hs.normal[j]);
        active.push_back(row);
      }
    if (!active.empty() && qmat_rank(active) == n) poly.vertices_.push_back(p);
  }
  return poly;
}

const std::vector<HalfSpace>& QPolytope::half_spaces() const {
  if (!full_dimensional()) throw input_error("half spaces unavailable: degenerate polytope");
  return half_spaces_;
}

std::vector<std::vector<QVec>> QPolytope::triangulate() const {
  if (dim_ == 0) return {{vertices_[0]}};
  if (dim_ == 1) return {{vertices_.front(), vertices_.back()}};

  if (!full_dimensional()) {
    // Work in local coordinates of the span, then map vertices back.
    auto basis_idx = affine_basis(vertices_);
    QMat dirs;
    for (auto i : basis_idx) {
      QVec d(n_);
      for (std::size_t j = 0; j < n_; ++j) d[j] = vertices_[i][j] - vertices_[0][j];
      dirs.push_back(d);
    }
    std::map<QVec, QVec> back;
    std::vector<QVec> local;
    for (const auto& p : vertices_) {
      QVec lp = local_coordinates(dirs, vertices_[0], p);
      back[lp] = p;
      local.push_back(lp);
    }
    auto tri = convex_hull(local).triangulate();
    std::vector<std::vector<QVec>> out;
    for (auto& simplex : tri) {
      std::vector<QVec> lifted;
      for (auto& v : simplex) lifted.push_back(back.at(v));
      out.push_back(lifted);
    }
    return out;
  }

  // Fan from the lex-smallest vertex over the facets that do not contain it.
  const QVec& apex = vertices_[0];
  std::vector<std::vector<QVec>> out;
  for (const auto& hs : half_spaces_) {
    if (hs.eval(apex) == 0) continue;
    std::vector<QVec> fverts;
    for (const auto& v : vertices_)
      if (hs.eval(v) == 0) fverts.push_back(v);
    QPolytope facet = convex_hull(fverts);
    for (auto& simplex : facet.triangulate()) {
      simplex.insert(simplex.begin(), apex);
      out.push_back(std::move(simplex));
    }
  }
  return out;
}

Rat QPolytope::normalized_volume() const {
  if (!full_dimensional()) throw input_error("degenerate polytope");
  Rat total = 0;
  for (const auto& simplex : triangulate()) {
    QMat edges;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      QVec d(n_);
      for (std::size_t j = 0; j < n_; ++j) d[j] = simplex[i][j] - simplex[0][j];
      edges.push_back(d);
    }
    total += rat_abs(qmat_det(edges));
  }
  return total;
}

Rat QPolytope::euclidean_volume() const {
  Rat factorial = 1;
  for (std::size_t i = 2; i <= n_; ++i) factorial *= Int(i);
  return normalized_volume() / factorial;
}

bool QPolytope::contains_in_interior(const QPolytope& q) const {
  if (!full_dimensional()) throw input_error("contains_in_interior: degenerate outer polytope");
  if (q.ambient_dim() != n_) throw input_error("contains_in_interior: arity mismatch");
  for (const auto& v : q.vertices())
    for (const auto& hs : half_spaces_)
      if (hs.eval(v) >= 0) return false;
  return true;
}

bool QPolytope::contains(const QPolytope& q, QVec* separating) const {
  if (!full_dimensional()) throw input_error("contains: degenerate outer polytope");
  if (q.ambient_dim() != n_) throw input_error("contains: arity mismatch");
  for (const auto& v : q.vertices())
    for (const auto& hs : half_spaces_)
      if (hs.eval(v) > 0) {
        if (separating) *separating = v;
        return false;
      }
  return true;
}

bool QPolytope::operator==(const QPolytope& rhs) const {
  return n_ == rhs.n_ && dim_ == rhs.dim_ && vertices_ == rhs.vertices_;
}

QPolytope delta_k(const std::vector<LatticeVector>& a_k, std::int64_t k) {
  if (k <= 0) throw input_error("delta_k: k must be positive");
  if (a_k.empty()) throw input_error("delta_k: empty value set");
  std::vector<QVec> pts;
  pts.reserve(a_k.size());
  for (const auto& alpha : a_k) {
    QVec p(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) p[i] = Rat(Int(alpha[i]), Int(k));
    pts.push_back(p);
  }
  return QPolytope::convex_hull(pts);
}

QPolytope hull_of_lattice_points(const std::vector<LatticeVector>& pts) {
  return delta_k(pts, 1);
}

Rat volume_gap(const QPolytope& outer, const QPolytope& inner) {
  QVec sep;
  if (!outer.contains(inner, &sep)) {
    std::string msg = "volume_gap: inner polytope not contained; separating vertex (";
    for (std::size_t i = 0; i < sep.size(); ++i) msg += (i ? ", " : "") + rat_str(sep[i]);
    throw input_error(msg + ")");
  }
  return outer.euclidean_volume() - inner.euclidean_volume();
}

std::string QPolytope::to_json() const {
  nlohmann::json j;
  j["dim"] = n_;
  j["intrinsic_dim"] = dim_;
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : vertices_) {
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& x : v) coords.push_back({rat_num(x).str(), rat_den(x).str()});
    verts.push_back(coords);
  }
  j["vertices"] = verts;
  return j.dump();
}

QPolytope QPolytope::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<QVec> pts;
  for (const auto& coords : j.at("vertices")) {
    QVec v;
    for (const auto& pair : coords)
      v.push_back(Rat(Int(pair.at(0).get<std::string>()), Int(pair.at(1).get<std::string>())));
    pts.push_back(v);
  }
  return convex_hull(pts);
}

} // namespace okflow
