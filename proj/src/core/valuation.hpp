#pragma once

// Monomial valuations on A^n germs and on toric germ section rings:
// Okounkov bodies, volume functions and their exact slice derivatives,
// limit DH measures as piecewise-polynomial pushforwards, weighted volumes,
// scaling normalization, Howald's log canonical threshold and the log
// canonical slope.
//
// Weights are exact rationals; a double entry point rationalizes through
// continued fractions so that fixture inputs like (1,2)/3 stay exact.

#include <memory>
#include <optional>
#include <vector>

#include "germ.hpp"
#include "polyhedron.hpp"

namespace soliton {

struct OkounkovData {
  Polyhedron body;  // O in valuation-adapted coordinates
  RatVec slope;     // concave transform G(b) = <b, slope> + constant
  Rat constant;
};

// CDF of a pushforward measure n! G_* Leb: piecewise polynomial in t with
// rational breakpoints and coefficients, final chamber possibly infinite.
class PushforwardMeasure {
 public:
  static PushforwardMeasure from_body(const Polyhedron& body, const RatVec& direction, const Rat& shift,
                                      double density_factor);

  Rat cdf(const Rat& t) const;
  double cdf(double t) const;
  // d/dt of the CDF just right of t (polynomial chamber derivative).
  double density(double t) const;
  bool finite_support() const { return !unbounded_; }
  double sup_support() const;  // +inf when unbounded
  double total_mass() const;   // finite support only

  // integral over [0, inf) of e^{x (A - t)} dDH(t)
  double exp_integral(double x, double A) const;
  // integral over [0, inf) of (A - t) e^{x (A - t)} dDH(t)
  double exp_integral_weighted(double x, double A) const;
  // integral over [0, t_cut] of e^{A - t} dDH(t)
  double exp_integral_truncated(double A, double t_cut) const;

 private:
  std::vector<Rat> breaks_;        // ascending, first is inf of support
  std::vector<RatVec> cdf_polys_;  // one per chamber, coefficients in t
  bool unbounded_ = false;         // last chamber extends to +infinity
  int degree_ = 0;
};

class MonomialValuation {
 public:
  // Monomial valuation on the A^n germ (Delta = 0): all weights > 0,
  // A(v) = sum of weights.
  static MonomialValuation affine(RatVec xi);
  static MonomialValuation affine(const Vec& xi);
  // Toric valuation wt_xi on a germ: xi interior to the Reeb cone,
  // A(v) = a_wt(xi).
  static MonomialValuation on_germ(std::shared_ptr<const Germ> germ, RatVec xi);

  int dim() const { return n_; }
  const RatVec& weights() const { return xi_; }
  const Rat& a_value() const { return a_value_; }
  bool is_affine() const { return germ_ == nullptr; }
  const Germ* germ() const { return germ_.get(); }

  MonomialValuation rescaled(const Rat& a) const;

  const OkounkovData& okounkov() const { return ok_; }
  const PushforwardMeasure& dh_limit() const;

  // vol(v; t) = n! vol(O \ O^(t)); exact in rational t.
  Rat vol_fn_limit(const Rat& t) const;
  double vol_fn_limit(double t) const;
  // d/dt vol(v; t) by the exact slice-volume formula.
  Rat vol_fn_derivative(const Rat& t) const;

  // (n!/m^n) #{basis points with value < mt} on the degree-m piece.
  // A^n germs enumerate exponents directly; toric germs walk m P.
  Rat vol_fn_discrete(const Rat& t, long m) const;

  // W(v) = int_0^inf e^{A(v) - x} DH_v(dx).
  double weighted_vol() const;

  // The unique a* > 0 with d/dx W(x v)|_{x=a*} = 0, plus the rescaled
  // valuation.
  std::pair<double, MonomialValuation> normalize_scaling() const;

 private:
  MonomialValuation() = default;
  int n_ = 0;
  RatVec xi_;
  Rat a_value_;
  std::shared_ptr<const Germ> germ_;
  OkounkovData ok_;
  mutable std::optional<PushforwardMeasure> dh_;
};

struct MonomialIdeal {
  int dim = 0;
  std::vector<std::vector<long>> generators;  // exponent vectors, nonzero
};

// Facets of conv(generators) + orthant, as halfspaces <b,y> + c >= 0.
std::vector<Halfspace> newton_facets(const MonomialIdeal& a);

// Howald: lct = max{c : (1,..,1) in c * Newton(a)}, exact.
Rat lct_monomial(const MonomialIdeal& a);

// Log canonical slope of the filtration with value(gamma) = <gamma, xi> + m b
// on exponents gamma in N^n (b = 0 recovers F_v for v = wt_xi on A^n).
// Bisection over t against the graded-ideal lct, checked for stability
// across m in {m_max/4, m_max/2, m_max}.
double lc_slope_affine(const RatVec& xi, const Rat& b, long m_max, double tol);
double lc_slope_monomial(const MonomialValuation& v, long m_max = 64, double tol = 1e-6);

// H(v) = mu(F_v) - S~(F_v) on the A^n germ; exp of it matches weighted_vol
// within the slope tolerance.
double h_local(const MonomialValuation& v, long m_max = 64, double tol = 1e-6);

}  // namespace soliton
