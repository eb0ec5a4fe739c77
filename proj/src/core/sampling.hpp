#pragma once

// Deterministic samplers shared by the verification suites and tests.

#include <memory>
#include <vector>

#include "expkernel.hpp"
#include "filtration.hpp"
#include "fixtures.hpp"
#include "germ.hpp"

namespace soliton::sampling {

// Small random rational in (0, hi] with denominator <= 8.
inline Rat positive_rat(CounterRng& rng, long hi = 4) {
  return make_rat(1 + static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(hi * 2)),
                  1 + static_cast<long>(rng.next_u64() % 4));
}

inline Rat signed_rat(CounterRng& rng, long hi = 4) {
  Rat r = positive_rat(rng, hi);
  return (rng.next_u64() & 1) ? r : Rat(-r);
}

// Strictly Reeb-interior rational direction for a germ.
inline RatVec interior_xi(const Germ& germ, CounterRng& rng) {
  const int n = germ.dim();
  for (int attempt = 0; attempt < 256; ++attempt) {
    RatVec xi(n, Rat(0));
    if (germ.moment_polyhedron().bounded()) {
      for (int i = 0; i < n; ++i) xi[i] = signed_rat(rng);
    } else {
      for (const RatVec& r : germ.reeb_cone().cone.rays) xi = xi + positive_rat(rng) * r;
      for (const RatVec& l : germ.reeb_cone().cone.lineality) xi = xi + signed_rat(rng, 1) * l;
    }
    bool ok = !is_zero(xi);
    for (const RatVec& r : germ.reeb_cone().recession_rays)
      if (ok && dot(r, xi) <= 0) ok = false;
    if (ok) return xi;
  }
  fail(ErrorKind::Internal, "failed to sample an interior Reeb direction");
}

inline std::vector<std::shared_ptr<const Germ>> fixture_germs() {
  using namespace fixtures;
  return {make(p1_spec()),    make(p2_spec()),  make(an_spec(2)), make(an_spec(3)),
          make(f1_spec()),    make(p1xp1_spec()), make(cone_spec()), make(triangle_spec())};
}

// Random monomial filtration values (nonnegative, denominator <= 4).
inline Filtration random_monomial(const GradedLevel& level, CounterRng& rng) {
  std::vector<Rat> vals(level.dim());
  for (Rat& v : vals)
    v = make_rat(static_cast<long>(rng.next_u64() % 9), 1 + static_cast<long>(rng.next_u64() % 3));
  return Filtration::monomial(std::move(vals));
}

// Random flag filtration: nested prefixes of a random invertible matrix.
inline Filtration random_flag(const GradedLevel& level, CounterRng& rng) {
  const size_t d = level.dim();
  RatMat M;
  for (int attempt = 0; attempt < 64; ++attempt) {
    M.clear();
    for (size_t i = 0; i < d; ++i) {
      RatVec row(d);
      for (size_t j = 0; j < d; ++j) row[j] = static_cast<long>(rng.next_u64() % 5) - 2;
      M.push_back(std::move(row));
    }
    if (rat_rank(M) == static_cast<int>(d)) break;
  }
  size_t njumps = 2 + rng.next_u64() % 3;
  njumps = std::min(njumps, d);
  std::vector<FlagJump> jumps;
  Rat lambda = make_rat(static_cast<long>(rng.next_u64() % 3), 1 + static_cast<long>(rng.next_u64() % 2));
  size_t keep = d;
  for (size_t j = 0; j < njumps; ++j) {
    FlagJump fj;
    fj.lambda = lambda;
    fj.generators.assign(M.begin(), M.begin() + keep);
    jumps.push_back(std::move(fj));
    lambda += make_rat(1 + static_cast<long>(rng.next_u64() % 4), 1 + static_cast<long>(rng.next_u64() % 3));
    if (keep <= 1) {
      njumps = j + 1;
      break;
    }
    keep = 1 + rng.next_u64() % (keep - 1);
  }
  return Filtration::flag(std::move(jumps), d);
}

}  // namespace soliton::sampling
