#pragma once

// Finite-level filtration calculus on graded pieces of a toric section
// ring: monomial and flag filtrations, rescale/shift/twist, successive
// minima, discrete and bi-variate DH measures, geodesics, and the S~_m and
// S_{m,mt} invariants. Flag subspaces are row spans over exact rationals;
// every mass below is an exact integer count scaled by n!/m^n.

#include <optional>
#include <vector>

#include "germ.hpp"
#include "linalg.hpp"
#include "rational.hpp"

namespace soliton {

struct GradedLevel {
  int n = 0;   // ambient dimension (mass normalization n!/m^n)
  long m = 1;  // degree
  std::vector<std::vector<long>> basis;  // distinct lattice points (raw weights)
  std::optional<Rat> cutoff;             // recorded truncation, if any
  RatVec cutoff_xi_ref;                  // reference direction of the cutoff

  size_t dim() const { return basis.size(); }
  Rat mass_unit() const;  // n!/m^n
};

// One basis element per lattice point of m P, truncated (for unbounded P)
// to <beta, xi_ref> + m a_wt(xi_ref) <= m cutoff with xi_ref the interior
// seed direction recorded on the level.
GradedLevel level_from_germ(const Germ& germ, long m, std::optional<Rat> cutoff = std::nullopt);

struct FlagJump {
  Rat lambda;
  RatMat generators;  // rows span F^{lambda}
};

class Filtration {
 public:
  enum class Kind { Monomial, Flag };

  static Filtration monomial(std::vector<Rat> values);
  // jumps with strictly increasing lambda and strictly decreasing nested
  // spans; the first span must be the full level.
  static Filtration flag(std::vector<FlagJump> jumps, size_t level_dim);

  Kind kind() const { return kind_; }
  const std::vector<Rat>& values() const { return values_; }
  const std::vector<FlagJump>& jumps() const { return jumps_; }

  Filtration rescale(const Rat& a) const;
  Filtration shift(const Rat& b, long m) const;

 private:
  Kind kind_ = Kind::Monomial;
  std::vector<Rat> values_;      // Monomial: jump value per basis index
  std::vector<FlagJump> jumps_;  // Flag
};

Filtration filtration_from_wt(const GradedLevel& level, const RatVec& xi, const Rat& a_wt);
Filtration trivial_filtration(const GradedLevel& level);

// Per-weight shift value(beta) += <beta, xi>; flags must be coordinate-
// spanned to be equivariant, which this implementation does not attempt to
// detect beyond the monomial case (NotEquivariant otherwise).
Filtration twist(const Filtration& f, const GradedLevel& level, const RatVec& xi);

std::vector<std::pair<Rat, long>> successive_minima(const Filtration& f, const GradedLevel& level);

struct AtomicMeasure {
  std::vector<std::pair<Rat, Rat>> atoms;  // (location, mass), sorted
  Rat total_mass() const;
};

struct BivariateMeasure {
  std::vector<std::tuple<Rat, Rat, Rat>> atoms;  // (x, y, mass), sorted
  Rat total_mass() const;
  AtomicMeasure marginal_x() const;
  AtomicMeasure marginal_y() const;
  // pushforward under (x, y) -> (1-t)x + t y
  AtomicMeasure interpolate(const Rat& t) const;
};

AtomicMeasure dh_discrete(const Filtration& f, const GradedLevel& level);

// Basis compatible with both a monomial filtration and an arbitrary second
// filtration, with the joint jump values per chosen vector.
struct JointBasis {
  std::vector<std::pair<Rat, Rat>> values;  // (f0 value, f1 value)
};
JointBasis joint_compatible_basis(const Filtration& f0, const Filtration& f1, const GradedLevel& level);

BivariateMeasure dh_bivariate(const Filtration& f0, const Filtration& f1, const GradedLevel& level);

Filtration geodesic(const Filtration& f0, const Filtration& f1, const GradedLevel& level, const Rat& t);

struct GeodesicDhCheck {
  bool ok = false;
  Rat deviation;  // total variation distance between the two atom lists
};
GeodesicDhCheck geodesic_dh_identity(const Filtration& f0, const Filtration& f1, const GradedLevel& level,
                                     const Rat& t);

// S~_m = -log sum e^{-x} mass over the discrete DH measure; H_m = mu - S~_m.
double s_tilde_m(const Filtration& f, const GradedLevel& level);
double h_m(const Filtration& f, const GradedLevel& level, double mu);

// S_{m,mt}(v0; F) from the bi-variate measure, truncated at x <= t_cut.
double s_weighted_m(const Filtration& f0, double mu0, const Filtration& f, const GradedLevel& level,
                    double t_cut);
// lambda_max^{(t)}: largest F-value among basis vectors with v0-value <= t.
double lambda_max_truncated(const Filtration& f0, const Filtration& f, const GradedLevel& level,
                            double t_cut);

// Multiplicativity spot check for levels of the same germ family: picked
// elements of (level_a, f_a) and (level_b, f_b) must multiply into the
// summed jump class of (level_ab, f_ab). Returns a violation description or
// empty. Only monomial filtrations are checked.
std::optional<std::string> multiplicativity_spot_check(const GradedLevel& la, const Filtration& fa,
                                                       const GradedLevel& lb, const Filtration& fb,
                                                       const GradedLevel& lab, const Filtration& fab);

}  // namespace soliton
