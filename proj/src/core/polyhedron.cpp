#include "polyhedron.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

namespace soliton {

namespace {

// Canonical integer form of a homogenized constraint row.
RatVec canonical_row(const Halfspace& h) {
  RatVec row = h.normal;
  row.push_back(h.offset);
  return primitive(row);
}

Rat dot_n(const RatVec& a, const RatVec& b, size_t n) {
  Rat s = 0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Kernel vector of (d-1) independent rows in R^d, via cofactor expansion of
// the matrix with an appended indicator row.
RatVec hyperplane_normal(const RatMat& rows, int d) {
  RatVec nrm(d);
  RatMat minor(d - 1, RatVec(d - 1));
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d - 1; ++i) {
      int cj = 0;
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        minor[i][cj++] = rows[i][j];
      }
    }
    Rat m = rat_det(minor);
    nrm[k] = ((d - 1 + k) % 2 == 0) ? m : Rat(-m);
  }
  return nrm;
}

struct Ray {
  RatVec v;                 // primitive integer direction in R^d
  std::vector<char> tight;  // over the canonical constraint list
};

std::vector<char> tight_mask(const RatVec& v, const RatMat& rows, const std::vector<int>& processed) {
  std::vector<char> m(rows.size(), 0);
  for (int idx : processed)
    if (dot_n(v, rows[idx], v.size()) == 0) m[idx] = 1;
  return m;
}

}  // namespace

Polyhedron Polyhedron::from_halfspaces(std::vector<Halfspace> hs) {
  if (hs.empty()) fail(ErrorKind::DegenerateInput, "no halfspaces given");
  int n = static_cast<int>(hs[0].normal.size());
  if (n < 1) fail(ErrorKind::UnsupportedDimension, "ambient dimension must be >= 1");
  if (n > kMaxDim) fail(ErrorKind::UnsupportedDimension, "ambient dimension above 6 is unsupported");
  const int d = n + 1;

  // Canonical constraint list: homogenization row first, then the unique
  // primitive rows in lexicographic order.
  std::vector<RatVec> rows;
  {
    RatVec t_row(d, Rat(0));
    t_row[n] = 1;
    rows.push_back(t_row);
    std::vector<RatVec> body;
    for (const Halfspace& h : hs) {
      if (static_cast<int>(h.normal.size()) != n)
        fail(ErrorKind::DegenerateInput, "mixed ambient dimensions");
      if (is_zero(h.normal)) {
        if (h.offset < 0) fail(ErrorKind::InfeasibleSystem, "unsatisfiable trivial constraint");
        continue;  // 0 >= -offset, vacuous
      }
      body.push_back(canonical_row(h));
    }
    std::sort(body.begin(), body.end(), lex_less);
    body.erase(std::unique(body.begin(), body.end()), body.end());
    rows.insert(rows.end(), body.begin(), body.end());
  }
  const int m = static_cast<int>(rows.size());

  // Initial simplicial cone from a greedy independent subset.
  std::vector<int> basis;
  {
    RatMat acc;
    for (int i = 0; i < m && static_cast<int>(basis.size()) < d; ++i) {
      acc.push_back(rows[i]);
      if (rat_rank(acc) == static_cast<int>(acc.size()))
        basis.push_back(i);
      else
        acc.pop_back();
    }
  }
  if (static_cast<int>(basis.size()) < d)
    fail(ErrorKind::Lineality, "halfspace normals do not span; the set contains a line");

  std::vector<Ray> rays;
  std::vector<int> processed = basis;
  {
    RatMat ab(d, RatVec(d));
    for (int i = 0; i < d; ++i) ab[i] = rows[basis[i]];
    Rat det = rat_det(ab);
    // Columns of the adjugate: A * adj(A) = det * I.
    for (int j = 0; j < d; ++j) {
      RatMat minor(d - 1, RatVec(d - 1));
      RatVec col(d);
      for (int k = 0; k < d; ++k) {
        int mi = 0;
        for (int i = 0; i < d; ++i) {
          if (i == j) continue;
          int mj = 0;
          for (int c = 0; c < d; ++c) {
            if (c == k) continue;
            minor[mi][mj++] = ab[i][c];
          }
          ++mi;
        }
        Rat cof = rat_det(minor);
        col[k] = (((j + k) % 2) == 0) ? cof : Rat(-cof);
      }
      if (det < 0)
        for (Rat& x : col) x = -x;
      Ray r{primitive(col), {}};
      r.tight = tight_mask(r.v, rows, processed);
      rays.push_back(std::move(r));
    }
  }

  // Incremental insertion of the remaining constraints.
  for (int idx = 0; idx < m; ++idx) {
    if (std::find(basis.begin(), basis.end(), idx) != basis.end()) continue;
    std::vector<Rat> s(rays.size());
    bool any_neg = false;
    for (size_t i = 0; i < rays.size(); ++i) {
      s[i] = dot_n(rays[i].v, rows[idx], d);
      if (s[i] < 0) any_neg = true;
    }
    processed.push_back(idx);
    if (!any_neg) {
      for (size_t i = 0; i < rays.size(); ++i)
        if (s[i] == 0) rays[i].tight[idx] = 1;
      continue;
    }
    std::vector<Ray> next;
    std::set<RatVec, bool (*)(const RatVec&, const RatVec&)> seen(lex_less);
    for (size_t i = 0; i < rays.size(); ++i)
      if (s[i] >= 0) {
        if (s[i] == 0) rays[i].tight[idx] = 1;
        if (seen.insert(rays[i].v).second) next.push_back(rays[i]);
      }
    for (size_t p = 0; p < rays.size(); ++p) {
      if (s[p] <= 0) continue;
      for (size_t q = 0; q < rays.size(); ++q) {
        if (s[q] >= 0) continue;
        // Combinatorial adjacency: no third ray is tight on the whole
        // common tight set of p and q.
        bool adjacent = true;
        for (size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r == p || r == q) continue;
          bool covers = true;
          for (int c : processed) {
            if (c == idx) continue;
            if (rays[p].tight[c] && rays[q].tight[c] && !rays[r].tight[c]) {
              covers = false;
              break;
            }
          }
          if (covers) adjacent = false;
        }
        if (!adjacent) continue;
        RatVec w(d);
        for (int k = 0; k < d; ++k) w[k] = s[p] * rays[q].v[k] - s[q] * rays[p].v[k];
        w = primitive(w);
        if (is_zero(w) || !seen.insert(w).second) continue;
        Ray nr{std::move(w), {}};
        nr.tight = tight_mask(nr.v, rows, processed);
        next.push_back(std::move(nr));
      }
    }
    rays = std::move(next);
    if (rays.empty()) fail(ErrorKind::InfeasibleSystem, "empty halfspace intersection");
  }

  Polyhedron P;
  P.dim_ = n;
  for (const Ray& r : rays) {
    if (r.v[n] > 0) {
      RatVec v(n);
      for (int k = 0; k < n; ++k) v[k] = r.v[k] / r.v[n];
      P.vertices_.push_back(std::move(v));
    } else {
      RatVec v(r.v.begin(), r.v.begin() + n);
      P.rays_.push_back(primitive(v));
    }
  }
  if (P.vertices_.empty()) fail(ErrorKind::InfeasibleSystem, "empty halfspace intersection");
  std::sort(P.vertices_.begin(), P.vertices_.end(), lex_less);
  std::sort(P.rays_.begin(), P.rays_.end(), lex_less);

  // Irredundant H-representation: keep rows supporting a facet. For
  // lower-dimensional sets keep every canonical row instead.
  std::vector<Halfspace> canon;
  for (int i = 1; i < m; ++i) {
    RatVec nrm(rows[i].begin(), rows[i].begin() + n);
    canon.push_back(Halfspace{std::move(nrm), rows[i][n]});
  }
  int adim;
  {
    RatMat dirs;
    for (size_t i = 1; i < P.vertices_.size(); ++i) dirs.push_back(P.vertices_[i] - P.vertices_[0]);
    for (const RatVec& r : P.rays_) dirs.push_back(r);
    adim = rat_rank(dirs);
  }
  if (adim < n) {
    P.halfspaces_ = std::move(canon);
  } else {
    for (const Halfspace& h : canon) {
      RatMat tight;
      for (const RatVec& v : P.vertices_)
        if (dot(v, h.normal) + h.offset == 0) {
          RatVec lifted = v;
          lifted.push_back(Rat(1));
          tight.push_back(std::move(lifted));
        }
      for (const RatVec& r : P.rays_)
        if (dot(r, h.normal) == 0) {
          RatVec lifted = r;
          lifted.push_back(Rat(0));
          tight.push_back(std::move(lifted));
        }
      if (rat_rank(tight) == n) P.halfspaces_.push_back(h);
    }
  }
  return P;
}

int Polyhedron::affine_dim() const {
  RatMat dirs;
  for (size_t i = 1; i < vertices_.size(); ++i) dirs.push_back(vertices_[i] - vertices_[0]);
  for (const RatVec& r : rays_) dirs.push_back(r);
  return rat_rank(dirs);
}

bool Polyhedron::contains(const RatVec& p) const {
  for (const Halfspace& h : halfspaces_)
    if (dot(p, h.normal) + h.offset < 0) return false;
  return true;
}

bool Polyhedron::strictly_contains(const RatVec& p) const {
  for (const Halfspace& h : halfspaces_)
    if (dot(p, h.normal) + h.offset <= 0) return false;
  return true;
}

Polyhedron Polyhedron::recession_cone() const {
  Polyhedron C;
  C.dim_ = dim_;
  for (const Halfspace& h : halfspaces_) C.halfspaces_.push_back(Halfspace{h.normal, Rat(0)});
  C.vertices_.push_back(RatVec(dim_, Rat(0)));
  C.rays_ = rays_;
  return C;
}

Polyhedron Polyhedron::intersect(const Halfspace& h) const {
  std::vector<Halfspace> hs = halfspaces_;
  hs.push_back(h);
  return from_halfspaces(std::move(hs));
}

Polyhedron Polyhedron::translate(const RatVec& v) const {
  Polyhedron Q;
  Q.dim_ = dim_;
  for (const Halfspace& h : halfspaces_)
    Q.halfspaces_.push_back(Halfspace{h.normal, h.offset - dot(v, h.normal)});
  for (const RatVec& p : vertices_) Q.vertices_.push_back(p + v);
  Q.rays_ = rays_;
  std::sort(Q.vertices_.begin(), Q.vertices_.end(), lex_less);
  return Q;
}

Polyhedron Polyhedron::dilate(const Rat& c) const {
  if (c <= 0) fail(ErrorKind::DegenerateInput, "dilation factor must be positive");
  Polyhedron Q;
  Q.dim_ = dim_;
  for (const Halfspace& h : halfspaces_) Q.halfspaces_.push_back(Halfspace{h.normal, c * h.offset});
  for (const RatVec& p : vertices_) Q.vertices_.push_back(c * p);
  Q.rays_ = rays_;
  std::sort(Q.vertices_.begin(), Q.vertices_.end(), lex_less);
  return Q;
}

std::vector<GeneralizedSimplex> Polyhedron::triangulate() const {
  const int n = dim_, d = n + 1;
  if (affine_dim() < n) fail(ErrorKind::DegenerateInput, "triangulation needs a full-dimensional set");

  // Generators of the homogenization cone: lifted vertices, then rays.
  RatMat gens;
  for (const RatVec& v : vertices_) {
    RatVec g = v;
    g.push_back(Rat(1));
    gens.push_back(std::move(g));
  }
  for (const RatVec& r : rays_) {
    RatVec g = r;
    g.push_back(Rat(0));
    gens.push_back(std::move(g));
  }
  const int N = static_cast<int>(gens.size());

  std::vector<int> start;
  {
    RatMat acc;
    for (int i = 0; i < N && static_cast<int>(start.size()) < d; ++i) {
      acc.push_back(gens[i]);
      if (rat_rank(acc) == static_cast<int>(acc.size()))
        start.push_back(i);
      else
        acc.pop_back();
    }
  }
  if (static_cast<int>(start.size()) < d) fail(ErrorKind::Internal, "homogenization cone not full-dimensional");

  RatVec interior(d, Rat(0));
  for (int i : start) interior = interior + gens[i];

  std::vector<std::vector<int>> cells;
  // Boundary facets: generator index set -> outward normal. The cone sits on
  // the <= 0 side of each boundary normal.
  std::map<std::vector<int>, RatVec> boundary;

  auto facet_normal = [&](const std::vector<int>& fct) -> RatVec {
    RatMat rws;
    for (int i : fct) rws.push_back(gens[i]);
    RatVec nrm = hyperplane_normal(rws, d);
    Rat side = dot(nrm, interior);
    if (side == 0) fail(ErrorKind::Internal, "interior reference point on a facet hyperplane");
    if (side > 0)
      for (Rat& x : nrm) x = -x;
    return primitive(nrm);
  };

  cells.push_back(start);
  for (int i = 0; i < d; ++i) {
    std::vector<int> fct;
    for (int j = 0; j < d; ++j)
      if (j != i) fct.push_back(start[j]);
    boundary[fct] = facet_normal(fct);
  }

  for (int g = 0; g < N; ++g) {
    if (std::find(start.begin(), start.end(), g) != start.end()) continue;
    std::vector<std::vector<int>> visible;
    for (const auto& [fct, nrm] : boundary)
      if (dot(nrm, gens[g]) > 0) visible.push_back(fct);
    if (visible.empty())
      fail(ErrorKind::Internal, "generator inside current cone during placing triangulation");
    std::map<std::vector<int>, int> side_count;
    for (const auto& fct : visible) {
      std::vector<int> cell = fct;
      cell.push_back(g);
      std::sort(cell.begin(), cell.end());
      cells.push_back(cell);
      boundary.erase(fct);
      for (size_t drop = 0; drop < fct.size(); ++drop) {
        std::vector<int> side;
        for (size_t j = 0; j < fct.size(); ++j)
          if (j != drop) side.push_back(fct[j]);
        side.push_back(g);
        std::sort(side.begin(), side.end());
        side_count[side] += 1;
      }
    }
    for (const auto& [side, cnt] : side_count)
      if (cnt == 1) boundary[side] = facet_normal(side);
  }

  std::vector<GeneralizedSimplex> out;
  for (const auto& cell : cells) {
    GeneralizedSimplex gs;
    RatMat mat;
    for (int i : cell) {
      mat.push_back(gens[i]);
      if (gens[i][n] != 0)
        gs.apexes.push_back(RatVec(gens[i].begin(), gens[i].begin() + n));
      else
        gs.rays.push_back(RatVec(gens[i].begin(), gens[i].begin() + n));
    }
    Rat det = rat_det(mat);
    gs.jacobian = det < 0 ? Rat(-det) : det;
    if (gs.jacobian == 0) fail(ErrorKind::Internal, "degenerate cell in triangulation");
    out.push_back(std::move(gs));
  }
  std::sort(out.begin(), out.end(), [](const GeneralizedSimplex& a, const GeneralizedSimplex& b) {
    if (a.apexes != b.apexes) return std::lexicographical_compare(
        a.apexes.begin(), a.apexes.end(), b.apexes.begin(), b.apexes.end(), lex_less);
    return std::lexicographical_compare(a.rays.begin(), a.rays.end(), b.rays.begin(), b.rays.end(), lex_less);
  });
  return out;
}

Rat Polyhedron::volume() const {
  if (!rays_.empty()) fail(ErrorKind::UnboundedPolyhedron, "volume of an unbounded polyhedron");
  if (affine_dim() < dim_) fail(ErrorKind::DegenerateInput, "volume needs a full-dimensional set");
  Rat nfact = 1;
  for (int k = 2; k <= dim_; ++k) nfact *= k;
  Rat vol = 0;
  for (const GeneralizedSimplex& s : triangulate()) vol += s.jacobian;
  return vol / nfact;
}

std::vector<std::vector<long>> Polyhedron::lattice_points(long m) const {
  if (m < 1) fail(ErrorKind::DegenerateInput, "lattice scale must be positive");
  if (!rays_.empty()) fail(ErrorKind::UnboundedPolyhedron, "lattice points of an unbounded polyhedron");
  const int n = dim_;
  std::vector<long> lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    Rat mn = m * vertices_[0][k], mx = mn;
    for (const RatVec& v : vertices_) {
      Rat x = m * v[k];
      if (x < mn) mn = x;
      if (x > mx) mx = x;
    }
    mpz_class lo_z, hi_z;
    mpz_cdiv_q(lo_z.get_mpz_t(), mn.get_num().get_mpz_t(), mn.get_den().get_mpz_t());
    mpz_fdiv_q(hi_z.get_mpz_t(), mx.get_num().get_mpz_t(), mx.get_den().get_mpz_t());
    if (!lo_z.fits_slong_p() || !hi_z.fits_slong_p())
      fail(ErrorKind::DegenerateInput, "lattice enumeration range too large");
    lo[k] = lo_z.get_si();
    hi[k] = hi_z.get_si();
  }
  // Integer constraint rows q*<a,normal> + m*q*offset >= 0 with the
  // halfspace scaled to integers.
  struct IntRow {
    std::vector<long> a;
    long c;
  };
  std::vector<IntRow> irows;
  for (const Halfspace& h : halfspaces_) {
    RatVec row = h.normal;
    row.push_back(m * h.offset);
    row = primitive(row);
    IntRow ir;
    ir.a.resize(n);
    bool fits = true;
    for (int k = 0; k < n; ++k) {
      if (!row[k].get_num().fits_slong_p()) fits = false;
      ir.a[k] = fits ? row[k].get_num().get_si() : 0;
    }
    if (!row[n].get_num().fits_slong_p()) fits = false;
    if (!fits) fail(ErrorKind::DegenerateInput, "halfspace coefficients too large for enumeration");
    ir.c = row[n].get_num().get_si();
    irows.push_back(std::move(ir));
  }
  std::vector<std::vector<long>> out;
  std::vector<long> pt(lo);
  while (true) {
    bool ok = true;
    for (const IntRow& ir : irows) {
      long long s = ir.c;
      for (int k = 0; k < n; ++k) s += static_cast<long long>(ir.a[k]) * pt[k];
      if (s < 0) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(pt);
    int k = n - 1;
    while (k >= 0 && pt[k] == hi[k]) {
      pt[k] = lo[k];
      --k;
    }
    if (k < 0) break;
    ++pt[k];
  }
  return out;
}

std::optional<Rat> Polyhedron::min_inner(const RatVec& w) const {
  for (const RatVec& r : rays_)
    if (dot(r, w) < 0) return std::nullopt;
  Rat mn = dot(vertices_[0], w);
  for (const RatVec& v : vertices_) {
    Rat x = dot(v, w);
    if (x < mn) mn = x;
  }
  return mn;
}

Rat Polyhedron::slice_derivative(const RatVec& w, const Rat& t) const {
  const int n = dim_;
  int i = 0;
  for (int k = 1; k < n; ++k)
    if (abs(w[k]) > abs(w[i])) i = k;
  if (w[i] == 0) fail(ErrorKind::DegenerateInput, "zero slicing direction");
  if (n == 1) {
    RatVec pt{t / w[0]};
    return contains(pt) ? Rat(1) / abs(w[0]) : Rat(0);
  }
  std::vector<Halfspace> hs;
  for (const Halfspace& h : halfspaces_) {
    RatVec a(n - 1);
    int cj = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      a[cj++] = h.normal[j] - h.normal[i] * w[j] / w[i];
    }
    Rat b = h.offset + h.normal[i] * t / w[i];
    if (is_zero(a)) {
      if (b < 0) return Rat(0);  // slice misses this constraint entirely
      continue;
    }
    hs.push_back(Halfspace{std::move(a), b});
  }
  if (hs.empty()) fail(ErrorKind::UnboundedPolyhedron, "unbounded slice");
  try {
    Polyhedron Q = from_halfspaces(std::move(hs));
    return Q.volume() / abs(w[i]);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InfeasibleSystem || e.kind() == ErrorKind::DegenerateInput) return Rat(0);
    throw;
  }
}

DualCone dual_cone(const std::vector<RatVec>& generators, int dim) {
  DualCone out;
  RatMat G;
  for (const RatVec& g : generators)
    if (!is_zero(g)) G.push_back(g);
  std::vector<int> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = i;
  std::vector<int> pivots;
  RatMat B = rref(G, order, &pivots);
  const int r = static_cast<int>(B.size());
  // Kernel basis = lineality of the dual cone.
  std::vector<bool> is_pivot(dim, false);
  for (int p : pivots) is_pivot[p] = true;
  for (int c = 0; c < dim; ++c) {
    if (is_pivot[c]) continue;
    RatVec k(dim, Rat(0));
    k[c] = 1;
    for (int i = 0; i < r; ++i) k[pivots[i]] = -B[i][c];
    out.lineality.push_back(primitive(k));
  }
  if (r == 0) return out;  // dual cone is the whole space
  // Pointed part inside the row space of G, parametrized by y -> B^T y.
  std::vector<Halfspace> hs;
  for (const RatVec& g : G) {
    RatVec a(r);
    for (int i = 0; i < r; ++i) a[i] = dot(g, B[i]);
    hs.push_back(Halfspace{std::move(a), Rat(0)});
  }
  Polyhedron C = Polyhedron::from_halfspaces(std::move(hs));
  for (const RatVec& y : C.rays()) {
    RatVec x(dim, Rat(0));
    for (int i = 0; i < r; ++i) x = x + y[i] * B[i];
    out.rays.push_back(primitive(x));
  }
  std::sort(out.rays.begin(), out.rays.end(), lex_less);
  return out;
}

}  // namespace soliton
