#include "okflow/gromov.hpp"

#include "okflow/errors.hpp"
#include "okflow/linprog.hpp"
#include "okflow/qlinalg.hpp"

#include <json.hpp>

#include <algorithm>

namespace okflow {

namespace {

// Vertices of the image of the closed size-R standard simplex.
std::vector<QVec> simplex_image_vertices(const UnimodularAffineMap& map, const Rat& size) {
  const std::size_t n = map.w.rows();
  std::vector<QVec> verts{map.a};
  for (std::size_t k = 0; k < n; ++k) {
    QVec v = map.a;
    for (std::size_t i = 0; i < n; ++i) v[i] += size * Rat(map.w.at(i, k));
    verts.push_back(v);
  }
  return verts;
}

bool strictly_inside(const QPolytope& target, const std::vector<QVec>& verts, std::string* why) {
  for (const auto& v : verts)
    for (const auto& hs : target.half_spaces())
      if (hs.eval(v) >= 0) {
        if (why) {
          *why = "vertex (";
          for (std::size_t i = 0; i < v.size(); ++i) *why += (i ? ", " : "") + rat_str(v[i]);
          *why += ") violates facet <";
          for (std::size_t i = 0; i < hs.normal.size(); ++i) *why += (i ? ", " : "") + hs.normal[i].str();
          *why += ", x> < " + rat_str(hs.offset);
        }
        return false;
      }
  return true;
}

bool weakly_inside(const QPolytope& target, const std::vector<QVec>& verts, std::string* why) {
  for (const auto& v : verts)
    for (const auto& hs : target.half_spaces())
      if (hs.eval(v) > 0) {
        if (why) *why = "closed simplex vertex escapes a facet";
        return false;
      }
  return true;
}

nlohmann::json map_to_json(const UnimodularAffineMap& m) {
  nlohmann::json j;
  nlohmann::json w = nlohmann::json::array();
  for (std::size_t i = 0; i < m.w.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < m.w.cols(); ++k) row.push_back(m.w.at(i, k).str());
    w.push_back(row);
  }
  j["W"] = w;
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : m.a) a.push_back({rat_num(x).str(), rat_den(x).str()});
  j["a"] = a;
  return j;
}

UnimodularAffineMap map_from_json(const nlohmann::json& j) {
  UnimodularAffineMap m;
  const auto& w = j.at("W");
  m.w = IntMat(w.size(), w.empty() ? 0 : w[0].size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t k = 0; k < w[i].size(); ++k) m.w.at(i, k) = Int(w[i][k].get<std::string>());
  for (const auto& x : j.at("a")) m.a.emplace_back(Int(x.at(0).get<std::string>()), Int(x.at(1).get<std::string>()));
  return m;
}

} // namespace

bool verify_simplex_certificate(const SimplexCertificate& cert, std::string* why) {
  if (!cert.target.full_dimensional()) throw input_error("verify_simplex_certificate: degenerate target");
  try {
    cert.map.validate();
  } catch (const input_error& e) {
    if (why) *why = e.what();
    return false;
  }
  if (cert.size <= 0) {
    if (why) *why = "nonpositive size";
    return false;
  }
  if (!cert.open_supremum) return strictly_inside(cert.target, simplex_image_vertices(cert.map, cert.size), why);

  // Supremum-style: the closed size-R simplex may touch the boundary, but a
  // strictly interior witness below R must be supplied. Convexity then gives
  // a strict fit for every rho <= witness_size, and the weak fit at R pins
  // the supremum.
  try {
    cert.witness_map.validate();
  } catch (const input_error& e) {
    if (why) *why = e.what();
    return false;
  }
  if (!(cert.witness_size > 0 && cert.witness_size < cert.size)) {
    if (why) *why = "open-supremum witness size out of range";
    return false;
  }
  if (!weakly_inside(cert.target, simplex_image_vertices(cert.map, cert.size), why)) return false;
  return strictly_inside(cert.target, simplex_image_vertices(cert.witness_map, cert.witness_size), why);
}

namespace {

// Best (a, R) for a fixed W by exact LP over a = a+ - a-, R >= 0.
struct FitResult {
  Rat size;
  QVec a;
};

std::optional<FitResult> best_fit(const QPolytope& target, const IntMat& w) {
  const std::size_t n = target.ambient_dim();
  const auto& facets = target.half_spaces();
  QMat a;
  QVec b, c(2 * n + 1, Rat(0));
  c[2 * n] = 1; // maximize R
  for (const auto& hs : facets) {
    // Vertex a itself.
    QVec row(2 * n + 1, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = Rat(hs.normal[i]);
      row[n + i] = -Rat(hs.normal[i]);
    }
    a.push_back(row);
    b.push_back(hs.offset);
    // Vertices a + R w_k.
    for (std::size_t k = 0; k < n; ++k) {
      QVec rk = row;
      Rat nw = 0;
      for (std::size_t i = 0; i < n; ++i) nw += Rat(hs.normal[i]) * Rat(w.at(i, k));
      rk[2 * n] = nw;
      a.push_back(rk);
      b.push_back(hs.offset);
    }
  }
  LpResult lp = lp_maximize(a, b, c);
  if (lp.status != LpResult::Status::Optimal || lp.objective <= 0) return std::nullopt;
  QVec translation(n);
  for (std::size_t i = 0; i < n; ++i) translation[i] = lp.x[i] - lp.x[n + i];
  return FitResult{lp.objective, translation};
}

void enumerate_unimodular(std::size_t n, std::int64_t max_entry, std::vector<IntMat>& out) {
  std::vector<std::int64_t> entries(n * n, -max_entry);
  for (;;) {
    IntMat w(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w.at(i, j) = Int(entries[i * n + j]);
    Int d = det(w);
    if (d == 1 || d == -1) out.push_back(w);
    std::size_t p = entries.size();
    while (p > 0 && entries[p - 1] == max_entry) --p;
    if (p == 0) break;
    ++entries[p - 1];
    for (std::size_t q = p; q < entries.size(); ++q) entries[q] = -max_entry;
  }
}

void signed_permutations(std::size_t n, std::vector<IntMat>& out) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::uint64_t signs = 0; signs < (std::uint64_t(1) << n); ++signs) {
      IntMat w(n, n);
      for (std::size_t k = 0; k < n; ++k) w.at(perm[k], k) = (signs >> k) & 1 ? -1 : 1;
      out.push_back(w);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<Int> flatten(const IntMat& w) {
  std::vector<Int> f;
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) f.push_back(w.at(i, j));
  return f;
}

} // namespace

SimplexCertificate search_largest_simplex(const QPolytope& target, std::int64_t max_entry) {
  if (!target.full_dimensional()) throw input_error("search_largest_simplex: degenerate target");
  const std::size_t n = target.ambient_dim();
  if (n > 3) throw input_error("search_largest_simplex: n > 3 unsupported");

  std::vector<IntMat> candidates;
  signed_permutations(n, candidates);
  if (max_entry >= 1) enumerate_unimodular(n, max_entry, candidates);

  bool have = false;
  Rat best_size = 0;
  IntMat best_w;
  QVec best_a;
  for (const auto& w : candidates) {
    auto fit = best_fit(target, w);
    if (!fit) continue;
    // Deterministic tie-break on (R, flattened W, a).
    bool better = !have || fit->size > best_size ||
                  (fit->size == best_size && (flatten(w) < flatten(best_w) ||
                                              (flatten(w) == flatten(best_w) && fit->a < best_a)));
    if (better) {
      have = true;
      best_size = fit->size;
      best_w = w;
      best_a = fit->a;
    }
  }
  if (!have) throw input_error("search_largest_simplex: no candidate fits (is the target empty?)");

  SimplexCertificate cert;
  cert.map = UnimodularAffineMap{best_w, best_a};
  cert.size = best_size;
  cert.open_supremum = true;
  cert.target = target;

  // Strict witness: shrink about the image centroid, an interior point.
  const Rat lambda(Int((std::int64_t(1) << 24) - 1), Int(std::int64_t(1) << 24));
  auto verts = simplex_image_vertices(cert.map, cert.size);
  QVec centroid(n, Rat(0));
  for (const auto& v : verts)
    for (std::size_t i = 0; i < n; ++i) centroid[i] += v[i];
  for (auto& x : centroid) x /= Int(verts.size());
  QVec shrunk_a(n);
  for (std::size_t i = 0; i < n; ++i) shrunk_a[i] = centroid[i] + lambda * (best_a[i] - centroid[i]);
  cert.witness_map = UnimodularAffineMap{best_w, shrunk_a};
  cert.witness_size = lambda * best_size;

  std::string why;
  if (!verify_simplex_certificate(cert, &why))
    throw certificate_error("search_largest_simplex: produced certificate failed verification: " + why);
  return cert;
}

QPolytope simplicial_nobody(std::size_t n, const Rat& d) {
  if (n < 1) throw input_error("simplicial_nobody: n must be >= 1");
  if (d <= 0) throw input_error("simplicial_nobody: d must be positive");
  std::vector<QVec> verts{QVec(n, Rat(0))};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    QVec v(n, Rat(0));
    v[i] = 1;
    verts.push_back(v);
  }
  QVec top(n, Rat(0));
  top[n - 1] = d;
  verts.push_back(top);
  return QPolytope::convex_hull(verts);
}

PackingCertificate packing_subdivision(std::size_t n, std::int64_t d) {
  if (n < 1) throw input_error("packing_subdivision: n must be >= 1");
  if (d < 1) throw input_error("packing_subdivision: d must be >= 1");

  PackingCertificate cert;
  cert.n = n;
  cert.d = d;
  cert.ambient = simplicial_nobody(n, Rat(d));

  for (std::int64_t i = 1; i <= d; ++i) {
    PackingPiece piece;
    // Base vertex (i-1)e_n, then e_1..e_{n-1}, then i e_n.
    QVec base(n, Rat(0));
    base[n - 1] = i - 1;
    piece.vertices.push_back(base);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      QVec v(n, Rat(0));
      v[k] = 1;
      piece.vertices.push_back(v);
    }
    QVec top(n, Rat(0));
    top[n - 1] = i;
    piece.vertices.push_back(top);

    // Edge matrix from the base vertex is unimodular; its inverse gives the
    // affine map onto the unit simplex.
    IntMat edges(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t row = 0; row < n; ++row) {
        Rat diff = piece.vertices[k + 1][row] - base[row];
        edges.at(row, k) = rat_num(diff); // integer by construction
      }
    QMat qe(n, QVec(n));
    for (std::size_t row = 0; row < n; ++row)
      for (std::size_t col = 0; col < n; ++col) qe[row][col] = Rat(edges.at(row, col));
    // Invert exactly column by column.
    IntMat winv(n, n);
    for (std::size_t col = 0; col < n; ++col) {
      QVec e(n, Rat(0));
      e[col] = 1;
      auto sol = qmat_solve(qe, e);
      if (!sol) throw certificate_error("packing_subdivision: edge matrix not invertible");
      for (std::size_t row = 0; row < n; ++row) {
        if (rat_den((*sol)[row]) != 1) throw certificate_error("packing_subdivision: inverse not integral");
        winv.at(row, col) = rat_num((*sol)[row]);
      }
    }
    UnimodularAffineMap to_unit{winv, QVec(n, Rat(0))};
    to_unit.a = apply_unimodular(UnimodularAffineMap{winv, QVec(n, Rat(0))}, base);
    for (auto& x : to_unit.a) x = -x;
    piece.to_unit = to_unit;
    cert.pieces.push_back(std::move(piece));
  }

  // Separators between piece i and every piece j > i: the hyperplane through
  // e_1, ..., e_{n-1}, i e_n, in integer form i(x_1+...+x_{n-1}) + x_n = i.
  for (std::size_t lo = 0; lo + 1 < cert.pieces.size(); ++lo) {
    for (std::size_t hi = lo + 1; hi < cert.pieces.size(); ++hi) {
      PackingCertificate::Separator sep;
      sep.lo = lo;
      sep.hi = hi;
      sep.normal.assign(n, Int(static_cast<std::int64_t>(lo) + 1));
      sep.normal[n - 1] = 1;
      sep.offset = Rat(static_cast<std::int64_t>(lo) + 1);
      cert.separators.push_back(std::move(sep));
    }
  }

  verify_packing_certificate(cert);
  return cert;
}

void verify_packing_certificate(const PackingCertificate& cert) {
  const std::size_t n = cert.n;
  if (!cert.ambient.full_dimensional()) throw certificate_error("packing: degenerate ambient polytope");
  if (cert.pieces.size() != static_cast<std::size_t>(cert.d))
    throw certificate_error("packing: piece count differs from d");

  Rat total = 0;
  std::vector<QPolytope> hulls;
  for (std::size_t p = 0; p < cert.pieces.size(); ++p) {
    const auto& piece = cert.pieces[p];
    if (piece.vertices.size() != n + 1) throw certificate_error("packing: piece is not an n-simplex");
    QPolytope hull = QPolytope::convex_hull(piece.vertices);
    if (!hull.full_dimensional() || hull.vertices().size() != n + 1)
      throw certificate_error("packing: piece degenerate");
    Rat nv = hull.normalized_volume();
    if (nv != 1) throw certificate_error("packing: piece normalized volume is " + rat_str(nv) + ", expected 1");
    total += nv;

    try {
      piece.to_unit.validate();
    } catch (const input_error& e) {
      throw certificate_error(std::string("packing: ") + e.what());
    }
    // Vertex images must be exactly {0, e_1, ..., e_n} as a set.
    std::vector<QVec> images;
    for (const auto& v : piece.vertices) images.push_back(apply_unimodular(piece.to_unit, v));
    std::sort(images.begin(), images.end());
    std::vector<QVec> expect{QVec(n, Rat(0))};
    for (std::size_t k = 0; k < n; ++k) {
      QVec e(n, Rat(0));
      e[k] = 1;
      expect.push_back(e);
    }
    std::sort(expect.begin(), expect.end());
    if (images != expect) throw certificate_error("packing: piece map does not send vertices onto the unit simplex");

    QVec sep;
    if (!cert.ambient.contains(hull, &sep)) throw certificate_error("packing: piece escapes the ambient simplex");

    // Lattice interior emptiness by exact enumeration over the bounding box.
    std::vector<std::int64_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rat mn = piece.vertices[0][i], mx = piece.vertices[0][i];
      for (const auto& v : piece.vertices) {
        mn = std::min(mn, v[i]);
        mx = std::max(mx, v[i]);
      }
      lo[i] = rat_floor(mn).convert_to<std::int64_t>();
      hi[i] = rat_ceil(mx).convert_to<std::int64_t>();
    }
    std::vector<std::int64_t> pt = lo;
    for (;;) {
      QVec q(n);
      for (std::size_t i = 0; i < n; ++i) q[i] = Rat(pt[i]);
      bool interior = true;
      for (const auto& hs : hull.half_spaces())
        if (hs.eval(q) >= 0) {
          interior = false;
          break;
        }
      if (interior) throw certificate_error("packing: piece has an interior lattice point");
      std::size_t i = n;
      while (i > 0 && pt[i - 1] == hi[i - 1]) --i;
      if (i == 0) break;
      ++pt[i - 1];
      for (std::size_t j = i; j < n; ++j) pt[j] = lo[j];
    }
    hulls.push_back(std::move(hull));
  }

  if (total != cert.ambient.normalized_volume())
    throw certificate_error("packing: piece volumes do not sum to the ambient volume");

  // Pairwise interior disjointness via the stored separating hyperplanes.
  std::vector<std::vector<bool>> seen(cert.pieces.size(), std::vector<bool>(cert.pieces.size(), false));
  for (const auto& sep : cert.separators) {
    if (sep.lo >= sep.hi || sep.hi >= cert.pieces.size()) throw certificate_error("packing: malformed separator");
    for (const auto& v : cert.pieces[sep.lo].vertices) {
      Rat val = 0;
      for (std::size_t i = 0; i < n; ++i) val += Rat(sep.normal[i]) * v[i];
      if (val > sep.offset) throw certificate_error("packing: separator violated on the low side");
    }
    for (const auto& v : cert.pieces[sep.hi].vertices) {
      Rat val = 0;
      for (std::size_t i = 0; i < n; ++i) val += Rat(sep.normal[i]) * v[i];
      if (val < sep.offset) throw certificate_error("packing: separator violated on the high side");
    }
    seen[sep.lo][sep.hi] = true;
  }
  for (std::size_t i = 0; i < cert.pieces.size(); ++i)
    for (std::size_t j = i + 1; j < cert.pieces.size(); ++j)
      if (!seen[i][j]) throw certificate_error("packing: missing separator for a piece pair");
}

SubSimplexResult sub_simplex_dprime(std::size_t n, std::int64_t d, const Rat& d_prime) {
  if (d_prime <= 0 || d_prime > d) throw input_error("sub_simplex_dprime: d' out of range (0, d]");
  SubSimplexResult out;
  out.simplex = simplicial_nobody(n, d_prime);
  QPolytope outer = simplicial_nobody(n, Rat(d));
  QVec sep;
  out.contained = outer.contains(out.simplex, &sep);
  for (const auto& v : out.simplex.vertices())
    for (const auto& hs : outer.half_spaces())
      if (hs.eval(v) == 0) ++out.boundary_contacts;
  return out;
}

std::string SimplexCertificate::to_json() const {
  nlohmann::json j;
  j["type"] = "simplex";
  j["map"] = map_to_json(map);
  j["size"] = {rat_num(size).str(), rat_den(size).str()};
  j["open_supremum"] = open_supremum;
  if (open_supremum) {
    j["witness_map"] = map_to_json(witness_map);
    j["witness_size"] = {rat_num(witness_size).str(), rat_den(witness_size).str()};
  }
  j["target"] = nlohmann::json::parse(target.to_json());
  return j.dump(2);
}

SimplexCertificate SimplexCertificate::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SimplexCertificate cert;
  cert.map = map_from_json(j.at("map"));
  cert.size = Rat(Int(j.at("size").at(0).get<std::string>()), Int(j.at("size").at(1).get<std::string>()));
  cert.open_supremum = j.value("open_supremum", false);
  if (cert.open_supremum) {
    cert.witness_map = map_from_json(j.at("witness_map"));
    cert.witness_size =
        Rat(Int(j.at("witness_size").at(0).get<std::string>()), Int(j.at("witness_size").at(1).get<std::string>()));
  }
  cert.target = QPolytope::from_json(j.at("target").dump());
  return cert;
}

std::string PackingCertificate::to_json() const {
  nlohmann::json j;
  j["type"] = "packing";
  j["n"] = n;
  j["d"] = d;
  j["ambient"] = nlohmann::json::parse(ambient.to_json());
  nlohmann::json pieces_json = nlohmann::json::array();
  for (const auto& p : pieces) {
    nlohmann::json pj;
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : p.vertices) {
      nlohmann::json coords = nlohmann::json::array();
      for (const auto& x : v) coords.push_back({rat_num(x).str(), rat_den(x).str()});
      verts.push_back(coords);
    }
    pj["vertices"] = verts;
    pj["to_unit"] = map_to_json(p.to_unit);
    pieces_json.push_back(pj);
  }
  j["pieces"] = pieces_json;
  nlohmann::json seps = nlohmann::json::array();
  for (const auto& s : separators) {
    nlohmann::json sj;
    sj["lo"] = s.lo;
    sj["hi"] = s.hi;
    nlohmann::json normal = nlohmann::json::array();
    for (const auto& x : s.normal) normal.push_back(x.str());
    sj["normal"] = normal;
    sj["offset"] = {rat_num(s.offset).str(), rat_den(s.offset).str()};
    seps.push_back(sj);
  }
  j["separators"] = seps;
  return j.dump(2);
}

PackingCertificate PackingCertificate::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PackingCertificate cert;
  cert.n = j.at("n").get<std::size_t>();
  cert.d = j.at("d").get<std::int64_t>();
  cert.ambient = QPolytope::from_json(j.at("ambient").dump());
  for (const auto& pj : j.at("pieces")) {
    PackingPiece p;
    for (const auto& coords : pj.at("vertices")) {
      QVec v;
      for (const auto& pair : coords)
        v.emplace_back(Int(pair.at(0).get<std::string>()), Int(pair.at(1).get<std::string>()));
      p.vertices.push_back(v);
    }
    p.to_unit = map_from_json(pj.at("to_unit"));
    cert.pieces.push_back(std::move(p));
  }
  for (const auto& sj : j.at("separators")) {
    PackingCertificate::Separator s;
    s.lo = sj.at("lo").get<std::size_t>();
    s.hi = sj.at("hi").get<std::size_t>();
    for (const auto& x : sj.at("normal")) s.normal.emplace_back(x.get<std::string>());
    s.offset = Rat(Int(sj.at("offset").at(0).get<std::string>()), Int(sj.at("offset").at(1).get<std::string>()));
    cert.separators.push_back(std::move(s));
  }
  return cert;
}

} // namespace okflow
