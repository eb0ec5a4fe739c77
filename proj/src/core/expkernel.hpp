#pragma once

// Exponential integrals and moments over rational polyhedra.
//
// Every integral reduces, cell by cell over a triangulation, to divided
// differences of exp at the apex values plus a closed-form 1/<r,xi> factor
// per recession ray. Divided differences (with node multiplicities, for the
// derivative formulas) are computed from the Opitz bidiagonal matrix by
// scaling and squaring, which stays accurate through confluent and
// near-confluent node sets alike.

#include <cstdint>
#include <vector>

#include "polyhedron.hpp"
#include "rational.hpp"

namespace soliton {

struct ExpIntegralResult {
  double value = 0.0;
  int cells_used = 0;
  int confluent_cells = 0;  // cells with near-coincident apex values
};

// Divided difference of t -> e^t over the node multiset (repeats allowed).
double ddexp(std::vector<double> nodes);

// Triangulation cells flattened to doubles, cached by callers that evaluate
// many xi against one polyhedron.
struct KernelCell {
  std::vector<Vec> apexes;
  std::vector<Vec> rays;
  double jac = 0.0;
};

std::vector<KernelCell> kernel_cells(const Polyhedron& P);

// Integral of e^{-<x,xi>} over P (plain Lebesgue; callers apply any density
// normalization). Requires <r,xi> > 0 on every recession ray.
ExpIntegralResult exp_integral(const std::vector<KernelCell>& cells, const std::vector<RatVec>& rec_rays,
                               const Vec& xi);
ExpIntegralResult exp_integral(const Polyhedron& P, const Vec& xi);

// Integral of <x,eta> e^{-<x,xi>} over P; equals -d/dt exp_integral(xi+t eta).
double exp_moment(const std::vector<KernelCell>& cells, const std::vector<RatVec>& rec_rays, const Vec& xi,
                  const Vec& eta);
double exp_moment(const Polyhedron& P, const Vec& xi, const Vec& eta);

// Integral of <x,eta1><x,eta2> e^{-<x,xi>} over P.
double exp_hessian_entry(const std::vector<KernelCell>& cells, const std::vector<RatVec>& rec_rays,
                         const Vec& xi, const Vec& eta1, const Vec& eta2);
double exp_hessian_entry(const Polyhedron& P, const Vec& xi, const Vec& eta1, const Vec& eta2);

enum class IntegrandKind { Exp, Moment, Hessian };

struct McResult {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::int64_t samples = 0;
};

// Monte-Carlo cross-check: uniform Dirichlet sampling over each simplex
// factor, exponentially tilted sampling along rays. Deterministic under a
// fixed seed (splitmix64 in counter mode).
McResult mc_oracle(const Polyhedron& P, const Vec& xi, IntegrandKind kind, std::int64_t samples,
                   std::uint64_t seed, const Vec& eta1 = {}, const Vec& eta2 = {});

// splitmix64 counter stream; the documented generator behind every
// stochastic oracle in this library.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1))) {}
  std::uint64_t next_u64();
  double next_unit();  // [0, 1)

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

}  // namespace soliton
