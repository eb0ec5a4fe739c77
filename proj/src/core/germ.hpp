#pragma once

// The toric germ model. A germ is given by facet data (primitive integer
// normals plus positive rational discrepancies) cutting out a canonical
// moment polyhedron with 0 in its interior. On top of it: the H-functional
// H(xi) = log( n! * integral_P e^{-<a,xi>} da ), its minimizer (the soliton
// candidate), Futaki and Ding pairings, the equivariant toric delta
// invariant, and the DH distribution function of a toric valuation.

#include <memory>
#include <string>
#include <vector>

#include "expkernel.hpp"
#include "polyhedron.hpp"

namespace soliton {

struct GermFacet {
  RatVec normal;    // primitive integer vector
  Rat discrepancy;  // a_F > 0
};

struct GermSpec {
  int dim = 0;
  std::vector<GermFacet> facets;
  std::string label;
};

struct ReebCone {
  std::vector<RatVec> recession_rays;  // extreme rays of rec(P)
  DualCone cone;                       // generators of the dual = Reeb cone
  bool contains_interior(const Vec& xi) const;
  bool contains_closed(const Vec& xi) const;
  bool contains_closed(const RatVec& xi) const;
};

struct SolitonCertificate {
  Vec xi0;
  double h_value = 0.0;
  double gradient_norm = 0.0;
  double hessian_min_eig = 0.0;
  int newton_iters = 0;
  bool converged = false;
};

struct DeltaResult {
  double delta = 0.0;
  Vec argmin;  // unit direction attaining the reported infimum
  int starts = 0;
};

class Germ {
 public:
  // Validates the spec (SpecInvalid names the offending facet).
  explicit Germ(GermSpec spec);

  const GermSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  double n_factorial() const { return n_fact_; }
  const Polyhedron& moment_polyhedron() const { return P_; }
  const ReebCone& reeb_cone() const { return reeb_; }

  // A_{X,D}(wt_xi) = -min_P <a, xi>; positively homogeneous, a_wt(xi_F)=a_F.
  Rat a_wt(const RatVec& xi) const;
  double a_wt(const Vec& xi) const;

  double h_eval(const Vec& xi) const;
  Vec grad_h(const Vec& xi) const;
  std::vector<Vec> hessian_h(const Vec& xi) const;

  // Directional derivative of H at xi0 along eta.
  double futaki(const Vec& xi0, const Vec& eta) const;

  // S(xi0; wt_xi) = a_wt(xi) + int <a,xi> e^{-<a,xi0>} / int e^{-<a,xi0>}.
  double s_toric(const Vec& xi0, const Vec& xi) const;

  // D(wt_xi) = a_wt(xi) - S(xi0; wt_xi).
  double ding_invariant(const Vec& xi0, const Vec& xi) const;

  SolitonCertificate minimize_h(double tol = 1e-8, int max_iters = 200, const Vec* init = nullptr) const;

  DeltaResult delta_toric(const Vec& xi0, double tol = 1e-6, int starts = 20) const;

  // CDF of DH_{wt_xi}: t -> n! vol(P cap {<a,xi> + a_wt(xi) <= t}), exact in
  // rational xi (doubles are reconstructed by continued fractions).
  double dh_cdf(const Vec& xi, double t) const;
  Rat dh_cdf(const RatVec& xi, const Rat& t) const;

  // Scale a* > 0 with d/dx H(x*xi)|_{x=a*} = 0 (exists by strict convexity).
  double normalize_scale(const Vec& xi) const;

  const std::vector<KernelCell>& cells() const { return cells_; }

 private:
  GermSpec spec_;
  Polyhedron P_;
  ReebCone reeb_;
  std::vector<KernelCell> cells_;
  double n_fact_ = 1.0;
  Vec interior_seed_;  // strictly Reeb-interior starting direction
};

}  // namespace soliton
