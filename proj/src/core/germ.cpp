#include "germ.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace soliton {

namespace {

std::string facet_str(const GermFacet& f, size_t idx) {
  std::ostringstream os;
  os << "facet #" << idx << " (normal";
  for (const Rat& x : f.normal) os << " " << rat_to_string(x);
  os << ", a=" << rat_to_string(f.discrepancy) << ")";
  return os.str();
}

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Eigen::MatrixXd to_eigen(const std::vector<Vec>& H) {
  const int n = static_cast<int>(H.size());
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = H[i][j];
  return M;
}

}  // namespace

bool ReebCone::contains_interior(const Vec& xi) const {
  for (const RatVec& r : recession_rays)
    if (dot(r, xi) <= 0.0) return false;
  return true;
}

bool ReebCone::contains_closed(const Vec& xi) const {
  for (const RatVec& r : recession_rays)
    if (dot(r, xi) < 0.0) return false;
  return true;
}

bool ReebCone::contains_closed(const RatVec& xi) const {
  for (const RatVec& r : recession_rays)
    if (dot(r, xi) < 0) return false;
  return true;
}

Germ::Germ(GermSpec spec) : spec_(std::move(spec)) {
  const int n = spec_.dim;
  if (n < 1) fail(ErrorKind::SpecInvalid, "germ dimension must be >= 1");
  if (n > kMaxDim) fail(ErrorKind::SpecInvalid, "germ dimension above 6 is unsupported");
  if (spec_.facets.empty()) fail(ErrorKind::SpecInvalid, "germ needs at least one facet");
  for (size_t i = 0; i < spec_.facets.size(); ++i) {
    const GermFacet& f = spec_.facets[i];
    if (static_cast<int>(f.normal.size()) != n)
      fail(ErrorKind::SpecInvalid, facet_str(f, i) + ": normal has wrong dimension");
    if (is_zero(f.normal)) fail(ErrorKind::SpecInvalid, facet_str(f, i) + ": zero normal");
    for (const Rat& x : f.normal)
      if (x.get_den() != 1) fail(ErrorKind::SpecInvalid, facet_str(f, i) + ": normal is not integral");
    if (primitive(f.normal) != f.normal)
      fail(ErrorKind::SpecInvalid, facet_str(f, i) + ": normal is not primitive");
    if (f.discrepancy <= 0)
      fail(ErrorKind::SpecInvalid, facet_str(f, i) + ": discrepancy must be positive");
  }

  std::vector<Halfspace> hs;
  for (const GermFacet& f : spec_.facets) hs.push_back(Halfspace{f.normal, f.discrepancy});
  try {
    P_ = Polyhedron::from_halfspaces(hs);
  } catch (const Error& e) {
    fail(ErrorKind::SpecInvalid, std::string("moment polyhedron: ") + e.what());
  }
  if (P_.affine_dim() < n) fail(ErrorKind::SpecInvalid, "moment polyhedron is lower-dimensional");
  if (!P_.strictly_contains(RatVec(n, Rat(0))))
    fail(ErrorKind::SpecInvalid, "origin is not interior to the moment polyhedron");
  // Irredundancy: every listed facet must survive as a facet of P.
  for (size_t i = 0; i < spec_.facets.size(); ++i) {
    RatVec row = spec_.facets[i].normal;
    row.push_back(spec_.facets[i].discrepancy);
    row = primitive(row);
    bool found = false;
    for (const Halfspace& h : P_.halfspaces()) {
      RatVec hrow = h.normal;
      hrow.push_back(h.offset);
      if (primitive(hrow) == row) {
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorKind::SpecInvalid, facet_str(spec_.facets[i], i) + ": redundant facet");
  }

  reeb_.recession_rays = P_.rays();
  reeb_.cone = dual_cone(P_.rays(), n);
  cells_ = kernel_cells(P_);
  for (int k = 2; k <= n; ++k) n_fact_ *= k;

  // A strictly interior Reeb direction for minimizer seeding.
  if (P_.bounded()) {
    interior_seed_.assign(n, 1e-3);
  } else {
    Vec s(n, 0.0);
    for (const RatVec& r : reeb_.cone.rays) {
      Vec rd = to_double(r);
      double nr = norm2(rd);
      for (int k = 0; k < n; ++k) s[k] += rd[k] / nr;
    }
    // Subgradient repair in case the ray sum is not strictly interior.
    for (int rep = 0; rep < 256 && !reeb_.contains_interior(s); ++rep) {
      double worst = 0.0;
      const RatVec* worst_ray = nullptr;
      for (const RatVec& r : reeb_.recession_rays) {
        double v = dot(r, s);
        if (v <= worst) {
          worst = v;
          worst_ray = &r;
        }
      }
      if (!worst_ray) break;
      Vec rd = to_double(*worst_ray);
      double nr = norm2(rd);
      for (int k = 0; k < n; ++k) s[k] += 0.5 * rd[k] / nr;
    }
    if (!reeb_.contains_interior(s))
      fail(ErrorKind::SpecInvalid, "could not locate an interior Reeb direction");
    double ns = norm2(s);
    for (double& x : s) x /= ns;
    interior_seed_ = s;
  }
}

Rat Germ::a_wt(const RatVec& xi) const {
  auto mn = P_.min_inner(xi);
  if (!mn) fail(ErrorKind::ReebViolation, "xi outside the closed Reeb cone; minimum is -infinity");
  return -*mn;
}

double Germ::a_wt(const Vec& xi) const {
  for (const RatVec& r : reeb_.recession_rays)
    if (dot(r, xi) < 0.0)
      fail(ErrorKind::ReebViolation, "xi outside the closed Reeb cone; minimum is -infinity");
  double mn = dot(P_.vertices()[0], xi);
  for (const RatVec& v : P_.vertices()) mn = std::min(mn, dot(v, xi));
  return -mn;
}

double Germ::h_eval(const Vec& xi) const {
  ExpIntegralResult r = exp_integral(cells_, reeb_.recession_rays, xi);
  return std::log(n_fact_) + std::log(r.value);
}

Vec Germ::grad_h(const Vec& xi) const {
  const int n = spec_.dim;
  double I = exp_integral(cells_, reeb_.recession_rays, xi).value;
  Vec g(n);
  for (int i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    g[i] = -exp_moment(cells_, reeb_.recession_rays, xi, e) / I;
  }
  return g;
}

std::vector<Vec> Germ::hessian_h(const Vec& xi) const {
  const int n = spec_.dim;
  double I = exp_integral(cells_, reeb_.recession_rays, xi).value;
  Vec mom(n);
  std::vector<Vec> H(n, Vec(n, 0.0));
  std::vector<Vec> basis(n, Vec(n, 0.0));
  for (int i = 0; i < n; ++i) basis[i][i] = 1.0;
  for (int i = 0; i < n; ++i) mom[i] = exp_moment(cells_, reeb_.recession_rays, xi, basis[i]) / I;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double m2 = exp_hessian_entry(cells_, reeb_.recession_rays, xi, basis[i], basis[j]) / I;
      H[i][j] = H[j][i] = m2 - mom[i] * mom[j];
    }
  return H;
}

double Germ::futaki(const Vec& xi0, const Vec& eta) const {
  double I = exp_integral(cells_, reeb_.recession_rays, xi0).value;
  return -exp_moment(cells_, reeb_.recession_rays, xi0, eta) / I;
}

double Germ::s_toric(const Vec& xi0, const Vec& xi) const {
  if (!reeb_.contains_closed(xi)) fail(ErrorKind::ReebViolation, "xi outside the closed Reeb cone");
  double I = exp_integral(cells_, reeb_.recession_rays, xi0).value;
  return a_wt(xi) + exp_moment(cells_, reeb_.recession_rays, xi0, xi) / I;
}

double Germ::ding_invariant(const Vec& xi0, const Vec& xi) const { return a_wt(xi) - s_toric(xi0, xi); }

SolitonCertificate Germ::minimize_h(double tol, int max_iters, const Vec* init) const {
  if (tol < 1e-12 || tol > 1e-4) fail(ErrorKind::SpecInvalid, "tolerance outside [1e-12, 1e-4]");
  const int n = spec_.dim;
  Vec xi = init ? *init : interior_seed_;
  if (!reeb_.contains_interior(xi)) fail(ErrorKind::ReebViolation, "initial point not Reeb-interior");

  auto feasible = [&](const Vec& p) {
    for (const RatVec& r : reeb_.recession_rays)
      if (dot(r, p) < 1e-9) return false;
    return true;
  };

  SolitonCertificate cert;
  double h = h_eval(xi);
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    Vec g = grad_h(xi);
    double gn = norm2(g);
    if (gn <= tol) {
      cert.converged = true;
      break;
    }
    std::vector<Vec> H = hessian_h(xi);
    Eigen::MatrixXd M = to_eigen(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    double emin = eig.eigenvalues().minCoeff();
    double emax = eig.eigenvalues().maxCoeff();
    Eigen::VectorXd gv(n);
    for (int i = 0; i < n; ++i) gv(i) = g[i];
    Eigen::VectorXd sv;
    bool newton_ok = emin > 0.0 && emax / emin < 1e12;
    if (newton_ok)
      sv = -M.ldlt().solve(gv);
    else
      sv = -gv;  // ill-conditioned Hessian, plain descent step
    Vec s(n);
    for (int i = 0; i < n; ++i) s[i] = sv(i);
    double slope = 0.0;
    for (int i = 0; i < n; ++i) slope += g[i] * s[i];
    if (slope >= 0.0) {
      for (int i = 0; i < n; ++i) s[i] = -g[i];
      slope = -gn * gn;
    }
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 70; ++bt, step *= 0.5) {
      Vec trial(n);
      for (int i = 0; i < n; ++i) trial[i] = xi[i] + step * s[i];
      if (!feasible(trial)) continue;
      double ht = h_eval(trial);
      if (ht <= h + 1e-4 * step * slope) {
        xi = trial;
        h = ht;
        moved = true;
        break;
      }
    }
    if (!moved) break;  // line search stalled below representable steps
  }

  cert.xi0 = xi;
  cert.h_value = h;
  cert.gradient_norm = norm2(grad_h(xi));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_eigen(hessian_h(xi)));
  cert.hessian_min_eig = eig.eigenvalues().minCoeff();
  cert.newton_iters = iter;
  if (!cert.converged && cert.gradient_norm > tol) {
    std::ostringstream os;
    os << "no convergence after " << max_iters << " iterations; last iterate (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << xi[i];
    os << "), |grad| = " << cert.gradient_norm;
    fail(ErrorKind::NoConvergence, os.str());
  }
  cert.converged = true;
  return cert;
}

DeltaResult Germ::delta_toric(const Vec& xi0, double tol, int starts) const {
  const int n = spec_.dim;
  if (!reeb_.contains_interior(xi0)) fail(ErrorKind::ReebViolation, "xi0 must be Reeb-interior");
  double I = exp_integral(cells_, reeb_.recession_rays, xi0).value;

  auto ratio = [&](const Vec& xi) {
    double a = a_wt(xi);
    double s = a + exp_moment(cells_, reeb_.recession_rays, xi0, xi) / I;
    return a / s;
  };
  auto normalize = [&](Vec v) {
    double nv = norm2(v);
    for (double& x : v) x /= nv;
    return v;
  };
  auto in_cone = [&](const Vec& v) { return reeb_.contains_closed(v); };

  // Deterministic multi-start: random cone directions from the counter rng.
  std::vector<Vec> seeds;
  CounterRng rng(0xD17A5EEDULL);
  const auto& rc = reeb_.cone;
  while (static_cast<int>(seeds.size()) < starts) {
    Vec v(n, 0.0);
    for (const RatVec& r : rc.rays) {
      double w = rng.next_unit();
      Vec rd = to_double(r);
      for (int k = 0; k < n; ++k) v[k] += w * rd[k];
    }
    for (const RatVec& l : rc.lineality) {
      double w = 2.0 * rng.next_unit() - 1.0;
      Vec ld = to_double(l);
      for (int k = 0; k < n; ++k) v[k] += w * ld[k];
    }
    if (norm2(v) < 1e-12) continue;
    v = normalize(v);
    if (in_cone(v)) seeds.push_back(v);
  }

  DeltaResult best;
  best.delta = ratio(seeds[0]);
  best.argmin = seeds[0];
  best.starts = starts;
  for (const Vec& seed : seeds) {
    Vec x = seed;
    double fx = ratio(x);
    double step0 = 0.25;
    for (int it = 0; it < 200; ++it) {
      // central-difference gradient of the 0-homogeneous ratio
      Vec g(n, 0.0);
      const double h = 1e-6;
      for (int k = 0; k < n; ++k) {
        Vec xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        double fp = in_cone(xp) ? ratio(xp) : fx + 1.0;
        double fm = in_cone(xm) ? ratio(xm) : fx + 1.0;
        g[k] = (fp - fm) / (2 * h);
      }
      double gn = norm2(g);
      if (gn < tol * 1e-2) break;
      bool moved = false;
      for (double step = step0; step > 1e-12; step *= 0.5) {
        Vec trial(n);
        for (int k = 0; k < n; ++k) trial[k] = x[k] - step * g[k] / gn;
        if (!in_cone(trial) || norm2(trial) < 1e-9) continue;
        trial = normalize(trial);
        double ft = ratio(trial);
        if (ft < fx - 1e-15) {
          x = trial;
          fx = ft;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (fx < best.delta) {
      best.delta = fx;
      best.argmin = x;
    }
  }
  return best;
}

Rat Germ::dh_cdf(const RatVec& xi, const Rat& t) const {
  if (t < 0) fail(ErrorKind::SpecInvalid, "dh_cdf needs t >= 0");
  for (const RatVec& r : reeb_.recession_rays)
    if (dot(r, xi) <= 0) fail(ErrorKind::ReebViolation, "xi must be Reeb-interior");
  Rat a = a_wt(xi);
  RatVec neg(xi.size());
  for (size_t i = 0; i < xi.size(); ++i) neg[i] = -xi[i];
  // {<a,xi> + a_wt <= t}  <=>  <a,-xi> + (t - a_wt) >= 0
  try {
    Polyhedron slice = P_.intersect(Halfspace{neg, t - a});
    Rat nf = 1;
    for (int k = 2; k <= spec_.dim; ++k) nf *= k;
    return nf * slice.volume();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InfeasibleSystem || e.kind() == ErrorKind::DegenerateInput) return Rat(0);
    throw;
  }
}

double Germ::dh_cdf(const Vec& xi, double t) const {
  return to_double(dh_cdf(rat_vec_from_double(xi), rat_from_double(t)));
}

double Germ::normalize_scale(const Vec& xi) const {
  if (!reeb_.contains_interior(xi)) fail(ErrorKind::ReebViolation, "xi must be Reeb-interior");
  auto deriv = [&](double x) {
    Vec p(xi.size());
    for (size_t i = 0; i < xi.size(); ++i) p[i] = x * xi[i];
    double I = exp_integral(cells_, reeb_.recession_rays, p).value;
    return -exp_moment(cells_, reeb_.recession_rays, p, xi) / I;
  };
  // The derivative x -> d/dx H(x xi) is strictly increasing. For a bounded
  // moment polyhedron H is defined on the whole line through xi, so the
  // critical scale may be zero or negative; unbounded germs confine it to
  // x > 0, where H blows up at the cone boundary.
  double lo, hi;
  if (P_.bounded()) {
    lo = -1.0;
    hi = 1.0;
    while (deriv(lo) > 0) {
      lo *= 2;
      if (lo < -1e12) fail(ErrorKind::NoConvergence, "normalization scale out of range");
    }
    while (deriv(hi) < 0) {
      hi *= 2;
      if (hi > 1e12) fail(ErrorKind::NoConvergence, "normalization scale out of range");
    }
  } else {
    lo = 1.0;
    hi = 1.0;
    while (deriv(lo) > 0) {
      lo *= 0.5;
      if (lo < 1e-15) fail(ErrorKind::NoConvergence, "normalization scale out of range");
    }
    while (deriv(hi) < 0) {
      hi *= 2;
      if (hi > 1e12) fail(ErrorKind::NoConvergence, "normalization scale out of range");
    }
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double dm = deriv(mid);
    if (std::fabs(dm) < 1e-13 || (hi - lo) < 1e-15 * std::max(1.0, std::fabs(hi))) return mid;
    (dm < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace soliton
