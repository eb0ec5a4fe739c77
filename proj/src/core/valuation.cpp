#include "valuation.hpp"

#include <algorithm>
#include <cmath>

namespace soliton {

namespace {

RatVec poly_add(const RatVec& a, const RatVec& b) {
  RatVec c(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  return c;
}

RatVec poly_scale(const Rat& s, const RatVec& a) {
  RatVec c = a;
  for (Rat& x : c) x *= s;
  return c;
}

RatVec poly_mul(const RatVec& a, const RatVec& b) {
  RatVec c(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Rat poly_eval(const RatVec& p, const Rat& t) {
  Rat v = 0;
  for (size_t i = p.size(); i-- > 0;) v = v * t + p[i];
  return v;
}

double poly_eval(const RatVec& p, double t) {
  double v = 0;
  for (size_t i = p.size(); i-- > 0;) v = v * t + to_double(p[i]);
  return v;
}

RatVec lagrange(const std::vector<Rat>& ts, const std::vector<Rat>& ys) {
  RatVec acc{Rat(0)};
  for (size_t i = 0; i < ts.size(); ++i) {
    RatVec term{Rat(1)};
    Rat denom = 1;
    for (size_t j = 0; j < ts.size(); ++j) {
      if (j == i) continue;
      term = poly_mul(term, RatVec{-ts[j], Rat(1)});
      denom *= ts[i] - ts[j];
    }
    acc = poly_add(acc, poly_scale(ys[i] / denom, term));
  }
  return acc;
}

RatVec poly_derivative(const RatVec& p) {
  if (p.size() <= 1) return RatVec{Rat(0)};
  RatVec d(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) d[i - 1] = Rat(static_cast<long>(i)) * p[i];
  return d;
}

// integral over [a, inf) of t^k e^{-x t} dt, all-positive closed form
long double tail_integral(int k, long double a, long double x) {
  long double kfact = 1.0L;
  for (int j = 2; j <= k; ++j) kfact *= j;
  long double sum = 0.0L, apow = 1.0L, jfact = 1.0L;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) {
      apow *= a * x;
      jfact *= j;
    }
    sum += apow / jfact;
  }
  return std::exp(-x * a) * kfact / std::pow(x, static_cast<long double>(k + 1)) * sum;
}

}  // namespace

PushforwardMeasure PushforwardMeasure::from_body(const Polyhedron& body, const RatVec& direction,
                                                 const Rat& shift, double density_factor) {
  for (const RatVec& r : body.rays())
    if (dot(r, direction) <= 0)
      fail(ErrorKind::ReebViolation, "pushforward direction not interior to the dual recession cone");

  PushforwardMeasure pf;
  pf.unbounded_ = !body.bounded();
  pf.degree_ = body.dim();
  const int n = body.dim();
  Rat density = rat_from_double(density_factor);  // n! always, exact

  std::vector<Rat> vals;
  for (const RatVec& v : body.vertices()) vals.push_back(dot(v, direction) + shift);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  pf.breaks_ = vals;

  auto cdf_exact = [&](const Rat& t) -> Rat {
    RatVec neg(direction.size());
    for (size_t i = 0; i < direction.size(); ++i) neg[i] = -direction[i];
    try {
      Polyhedron sl = body.intersect(Halfspace{neg, t - shift});
      return density * sl.volume();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InfeasibleSystem || e.kind() == ErrorKind::DegenerateInput) return Rat(0);
      throw;
    }
  };

  size_t nch = vals.size() - 1 + (pf.unbounded_ ? 1 : 0);
  for (size_t k = 0; k < nch; ++k) {
    Rat a = vals[k];
    Rat b = (k + 1 < vals.size()) ? vals[k + 1] : vals.back() + 1;
    bool tail = k + 1 >= vals.size();
    std::vector<Rat> ts, ys;
    for (int j = 0; j <= n; ++j) {
      Rat t;
      if (tail)
        t = a + Rat(j + 1);
      else
        t = a + Rat(j + 1) * (b - a) / Rat(n + 2);
      ts.push_back(t);
      ys.push_back(cdf_exact(t));
    }
    pf.cdf_polys_.push_back(lagrange(ts, ys));
  }
  return pf;
}

Rat PushforwardMeasure::cdf(const Rat& t) const {
  if (t <= breaks_.front()) return Rat(0);
  size_t k = 0;
  while (k + 1 < breaks_.size() && t > breaks_[k + 1]) ++k;
  if (k + 1 == breaks_.size()) {
    if (!unbounded_) return poly_eval(cdf_polys_.back(), breaks_.back());
    return poly_eval(cdf_polys_.back(), t);
  }
  return poly_eval(cdf_polys_[k], t);
}

double PushforwardMeasure::cdf(double t) const { return to_double(cdf(rat_from_double(t))); }

double PushforwardMeasure::density(double t) const {
  Rat tr = rat_from_double(t);
  if (tr < breaks_.front()) return 0.0;
  size_t k = 0;
  while (k + 1 < breaks_.size() && tr >= breaks_[k + 1]) ++k;
  if (k + 1 == breaks_.size() && !unbounded_) return 0.0;
  return poly_eval(poly_derivative(cdf_polys_[std::min(k, cdf_polys_.size() - 1)]), t);
}

double PushforwardMeasure::sup_support() const {
  return unbounded_ ? std::numeric_limits<double>::infinity() : to_double(breaks_.back());
}

double PushforwardMeasure::total_mass() const {
  if (unbounded_) fail(ErrorKind::UnboundedPolyhedron, "total mass of an unbounded pushforward");
  return to_double(poly_eval(cdf_polys_.back(), breaks_.back()));
}

double PushforwardMeasure::exp_integral(double x, double A) const {
  if (x <= 0.0) fail(ErrorKind::DegenerateInput, "exponential moment needs positive scale");
  long double total = 0.0L;
  for (size_t k = 0; k < cdf_polys_.size(); ++k) {
    RatVec dens = poly_derivative(cdf_polys_[k]);
    long double a = to_double(breaks_[k]);
    bool tail = (k + 1 == breaks_.size());
    long double b = tail ? 0.0L : static_cast<long double>(to_double(breaks_[k + 1]));
    for (size_t deg = 0; deg < dens.size(); ++deg) {
      long double c = to_double(dens[deg]);
      if (c == 0.0L) continue;
      long double seg = tail ? tail_integral(static_cast<int>(deg), a, x)
                             : tail_integral(static_cast<int>(deg), a, x) -
                                   tail_integral(static_cast<int>(deg), b, x);
      total += c * seg;
    }
  }
  return static_cast<double>(std::exp(static_cast<long double>(x) * A) * total);
}

double PushforwardMeasure::exp_integral_weighted(double x, double A) const {
  if (x <= 0.0) fail(ErrorKind::DegenerateInput, "exponential moment needs positive scale");
  long double total = 0.0L;
  for (size_t k = 0; k < cdf_polys_.size(); ++k) {
    RatVec dens = poly_derivative(cdf_polys_[k]);
    // (A - t) * dens(t): coefficients A*dens - shift(dens)
    RatVec w(dens.size() + 1, Rat(0));
    Rat Ar = rat_from_double(A);
    for (size_t i = 0; i < dens.size(); ++i) {
      w[i] += Ar * dens[i];
      w[i + 1] -= dens[i];
    }
    long double a = to_double(breaks_[k]);
    bool tail = (k + 1 == breaks_.size());
    long double b = tail ? 0.0L : static_cast<long double>(to_double(breaks_[k + 1]));
    for (size_t deg = 0; deg < w.size(); ++deg) {
      long double c = to_double(w[deg]);
      if (c == 0.0L) continue;
      long double seg = tail ? tail_integral(static_cast<int>(deg), a, x)
                             : tail_integral(static_cast<int>(deg), a, x) -
                                   tail_integral(static_cast<int>(deg), b, x);
      total += c * seg;
    }
  }
  return static_cast<double>(std::exp(static_cast<long double>(x) * A) * total);
}

double PushforwardMeasure::exp_integral_truncated(double A, double t_cut) const {
  long double total = 0.0L;
  for (size_t k = 0; k < cdf_polys_.size(); ++k) {
    long double a = to_double(breaks_[k]);
    if (a >= t_cut) break;
    RatVec dens = poly_derivative(cdf_polys_[k]);
    bool tail = (k + 1 == breaks_.size());
    long double b = tail ? static_cast<long double>(t_cut)
                         : std::min(static_cast<long double>(t_cut),
                                    static_cast<long double>(to_double(breaks_[k + 1])));
    for (size_t deg = 0; deg < dens.size(); ++deg) {
      long double c = to_double(dens[deg]);
      if (c == 0.0L) continue;
      total += c * (tail_integral(static_cast<int>(deg), a, 1.0L) -
                    tail_integral(static_cast<int>(deg), b, 1.0L));
    }
  }
  return static_cast<double>(std::exp(static_cast<long double>(A)) * total);
}

MonomialValuation MonomialValuation::affine(RatVec xi) {
  MonomialValuation v;
  v.n_ = static_cast<int>(xi.size());
  if (v.n_ < 1 || v.n_ > kMaxDim) fail(ErrorKind::UnsupportedDimension, "weight vector dimension");
  for (const Rat& x : xi)
    if (x <= 0) fail(ErrorKind::SpecInvalid, "monomial weights on an affine germ must be positive");
  v.xi_ = std::move(xi);
  v.a_value_ = 0;
  for (const Rat& x : v.xi_) v.a_value_ += x;
  std::vector<Halfspace> hs;
  for (int i = 0; i < v.n_; ++i) {
    RatVec e(v.n_, Rat(0));
    e[i] = 1;
    hs.push_back(Halfspace{e, Rat(0)});
  }
  v.ok_ = OkounkovData{Polyhedron::from_halfspaces(hs), v.xi_, Rat(0)};
  return v;
}

MonomialValuation MonomialValuation::affine(const Vec& xi) { return affine(rat_vec_from_double(xi)); }

MonomialValuation MonomialValuation::on_germ(std::shared_ptr<const Germ> germ, RatVec xi) {
  MonomialValuation v;
  v.n_ = germ->dim();
  if (static_cast<int>(xi.size()) != v.n_) fail(ErrorKind::SpecInvalid, "weight vector dimension mismatch");
  for (const RatVec& r : germ->reeb_cone().recession_rays)
    if (dot(r, xi) <= 0) fail(ErrorKind::ReebViolation, "weights must be interior to the Reeb cone");
  v.xi_ = std::move(xi);
  v.a_value_ = germ->a_wt(v.xi_);
  const Polyhedron& P = germ->moment_polyhedron();
  // Translate the minimizing vertex of <.,xi> to the origin so the concave
  // transform becomes <.,xi> with minimum 0 over the body.
  Rat best = dot(P.vertices()[0], v.xi_);
  RatVec arg = P.vertices()[0];
  for (const RatVec& vert : P.vertices()) {
    Rat val = dot(vert, v.xi_);
    if (val < best || (val == best && lex_less(vert, arg))) {
      best = val;
      arg = vert;
    }
  }
  RatVec minus(arg.size());
  for (size_t i = 0; i < arg.size(); ++i) minus[i] = -arg[i];
  v.ok_ = OkounkovData{P.translate(minus), v.xi_, Rat(0)};
  v.germ_ = std::move(germ);
  return v;
}

MonomialValuation MonomialValuation::rescaled(const Rat& a) const {
  if (a <= 0) fail(ErrorKind::DegenerateInput, "rescale factor must be positive");
  RatVec xi(xi_.size());
  for (size_t i = 0; i < xi_.size(); ++i) xi[i] = a * xi_[i];
  return germ_ ? on_germ(germ_, std::move(xi)) : affine(std::move(xi));
}

const PushforwardMeasure& MonomialValuation::dh_limit() const {
  if (!dh_) {
    double nf = 1.0;
    for (int k = 2; k <= n_; ++k) nf *= k;
    dh_ = PushforwardMeasure::from_body(ok_.body, ok_.slope, ok_.constant, nf);
  }
  return *dh_;
}

Rat MonomialValuation::vol_fn_limit(const Rat& t) const {
  if (t <= 0) return Rat(0);
  return dh_limit().cdf(t);
}

double MonomialValuation::vol_fn_limit(double t) const { return to_double(vol_fn_limit(rat_from_double(t))); }

Rat MonomialValuation::vol_fn_derivative(const Rat& t) const {
  if (t <= 0) return Rat(0);
  Rat nf = 1;
  for (int k = 2; k <= n_; ++k) nf *= k;
  return nf * ok_.body.slice_derivative(ok_.slope, t - ok_.constant);
}

Rat MonomialValuation::vol_fn_discrete(const Rat& t, long m) const {
  if (t <= 0) return Rat(0);
  Rat nf = 1;
  for (int k = 2; k <= n_; ++k) nf *= k;
  Rat mt = Rat(m) * t;
  long count = 0;
  if (is_affine()) {
    // count exponents with <gamma, xi> < m t, pruning on the partial sum
    auto walk = [&](auto&& self, int level, const Rat& partial) -> long {
      if (partial >= mt) return 0;
      if (level == n_) return 1;
      long c = 0;
      for (long g = 0;; ++g) {
        Rat p = partial + Rat(g) * xi_[level];
        if (p >= mt) break;
        c += self(self, level + 1, p);
      }
      return c;
    };
    count = walk(walk, 0, Rat(0));
  } else {
    const Polyhedron& P = germ_->moment_polyhedron();
    RatVec neg(xi_.size());
    for (size_t i = 0; i < xi_.size(); ++i) neg[i] = -xi_[i];
    Polyhedron trunc = P;
    try {
      trunc = P.intersect(Halfspace{neg, t - a_value_});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InfeasibleSystem) return Rat(0);
      throw;
    }
    for (const auto& beta : trunc.lattice_points(m)) {
      Rat val = Rat(m) * a_value_;
      for (size_t i = 0; i < beta.size(); ++i) val += Rat(beta[i]) * xi_[i];
      if (val < mt) ++count;
    }
  }
  Rat mn = 1;
  for (int k = 0; k < n_; ++k) mn *= m;
  return Rat(count) * nf / mn;
}

double MonomialValuation::weighted_vol() const {
  return dh_limit().exp_integral(1.0, to_double(a_value_));
}

std::pair<double, MonomialValuation> MonomialValuation::normalize_scaling() const {
  const PushforwardMeasure& dh = dh_limit();
  double A = to_double(a_value_);
  auto deriv = [&](double x) { return dh.exp_integral_weighted(x, A); };
  // d/dx W(x v) is strictly increasing; bracket a sign change over x > 0.
  double lo = 1.0, hi = 1.0;
  if (deriv(1.0) < 0.0) {
    while (deriv(hi) < 0.0) {
      hi *= 2.0;
      if (hi > 1e9) fail(ErrorKind::NoConvergence, "normalization scale out of range");
    }
    lo = hi / 2.0;
  } else {
    while (deriv(lo) > 0.0) {
      lo *= 0.5;
      if (lo < 1e-12)
        fail(ErrorKind::DegenerateInput, "no positive critical scale; W(x v) is increasing on x > 0");
    }
    hi = lo * 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double d = deriv(mid);
    if (std::fabs(d) < 1e-12 * std::max(1.0, std::fabs(deriv(hi)))) {
      lo = hi = mid;
      break;
    }
    (d < 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-15 * hi) break;
  }
  double a_star = 0.5 * (lo + hi);
  return {a_star, rescaled(rat_from_double(a_star, 1'000'000'000'000L))};
}

std::vector<Halfspace> newton_facets(const MonomialIdeal& a) {
  const int n = a.dim;
  if (n < 1) fail(ErrorKind::ZeroIdeal, "ideal dimension must be >= 1");
  if (a.generators.empty()) fail(ErrorKind::ZeroIdeal, "zero ideal has no Newton polyhedron");
  // Facet normals (y, c) of conv(gens)+orthant are the extreme rays of the
  // dual cone {(y,c) : <g,y> + c >= 0, y >= 0}.
  std::vector<Halfspace> rows;
  for (const auto& g : a.generators) {
    bool zero = true;
    RatVec r(n + 1);
    for (int i = 0; i < n; ++i) {
      r[i] = g[i];
      if (g[i] != 0) zero = false;
      if (g[i] < 0) fail(ErrorKind::SpecInvalid, "monomial exponents must be nonnegative");
    }
    if (zero) fail(ErrorKind::ZeroIdeal, "the unit ideal has trivial threshold");
    r[n] = 1;
    rows.push_back(Halfspace{std::move(r), Rat(0)});
  }
  for (int i = 0; i < n; ++i) {
    RatVec e(n + 1, Rat(0));
    e[i] = 1;
    rows.push_back(Halfspace{std::move(e), Rat(0)});
  }
  Polyhedron dual = Polyhedron::from_halfspaces(std::move(rows));
  std::vector<Halfspace> facets;
  for (const RatVec& ray : dual.rays()) {
    RatVec y(ray.begin(), ray.begin() + n);
    if (is_zero(y)) continue;  // the trivial 1 >= 0 direction
    facets.push_back(Halfspace{std::move(y), ray[n]});
  }
  return facets;
}

Rat lct_monomial(const MonomialIdeal& a) {
  std::vector<Halfspace> facets = newton_facets(a);
  bool found = false;
  Rat best = 0;
  RatVec ones(a.dim, Rat(1));
  for (const Halfspace& f : facets) {
    if (f.offset >= 0) continue;
    Rat c = dot(ones, f.normal) / (-f.offset);
    if (!found || c < best) {
      best = c;
      found = true;
    }
  }
  if (!found) fail(ErrorKind::Internal, "Newton polyhedron has no separating facet");
  return best;
}

namespace {

// m * lct of the graded piece {gamma >= 0 : <xi,gamma> >= m(t-b)} via the
// Howald rule on its known facet list.
Rat graded_lct_at(const RatVec& xi, const Rat& b, const Rat& t, long m) {
  Rat threshold = Rat(m) * (t - b);
  if (threshold <= 0) return Rat(-1);  // callers treat as +infinity
  Rat s = 0;
  for (const Rat& x : xi) s += x;
  // facets: coordinate planes (offset 0, skipped by Howald) and
  // (xi, -threshold)
  return Rat(m) * (s / threshold);
}

}  // namespace

double lc_slope_affine(const RatVec& xi, const Rat& b, long m_max, double tol) {
  for (const Rat& x : xi)
    if (x <= 0) fail(ErrorKind::SpecInvalid, "log canonical slope needs positive weights");
  if (m_max < 4) fail(ErrorKind::SpecInvalid, "m_max must be at least 4");
  Rat s = 0;
  for (const Rat& x : xi) s += x;

  auto lct_ge_one = [&](const Rat& t) {
    Rat prev = 0;
    bool have = false;
    for (long m : {m_max / 4, m_max / 2, m_max}) {
      Rat v = graded_lct_at(xi, b, t, m);
      if (v < 0) return true;  // threshold nonpositive: unit ideal, lct infinite
      if (have && v != prev)
        fail(ErrorKind::NoConvergence, "graded lct did not stabilize across degrees");
      prev = v;
      have = true;
    }
    return prev >= 1;
  };

  // mu <= A bounds the sup from above; pad by one so the bisection always
  // has a strict upper side
  Rat lo = b, hi = b + s + 1;
  for (int it = 0; it < 80; ++it) {
    Rat mid = (lo + hi) / 2;
    if (lct_ge_one(mid))
      lo = mid;
    else
      hi = mid;
    if (to_double(hi - lo) < tol * 0.25) break;
  }
  return 0.5 * (to_double(lo) + to_double(hi));
}

double lc_slope_monomial(const MonomialValuation& v, long m_max, double tol) {
  if (!v.is_affine())
    fail(ErrorKind::SpecInvalid, "log canonical slope is computed on the affine germ");
  return lc_slope_affine(v.weights(), Rat(0), m_max, tol);
}

double h_local(const MonomialValuation& v, long m_max, double tol) {
  double mu = lc_slope_monomial(v, m_max, tol);
  double s_tilde = -std::log(v.dh_limit().exp_integral(1.0, 0.0));
  return mu - s_tilde;
}

}  // namespace soliton
