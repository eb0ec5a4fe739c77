#pragma once

// Stock germ data used across the verification suites and tests: projective
// lines/planes, affine germs, the first Hirzebruch surface, products, and an
// unbounded non-orthant cone germ.

#include <memory>

#include "germ.hpp"

namespace soliton::fixtures {

inline GermSpec p1_spec() {
  GermSpec s;
  s.dim = 1;
  s.label = "p1";
  s.facets = {{rat_vec({1}), Rat(1)}, {rat_vec({-1}), Rat(1)}};
  return s;
}

inline GermSpec p2_spec() {
  GermSpec s;
  s.dim = 2;
  s.label = "p2";
  s.facets = {{rat_vec({1, 0}), Rat(1)}, {rat_vec({0, 1}), Rat(1)}, {rat_vec({-1, -1}), Rat(1)}};
  return s;
}

inline GermSpec an_spec(int n) {
  GermSpec s;
  s.dim = n;
  s.label = "a" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    RatVec e(n, Rat(0));
    e[i] = 1;
    s.facets.push_back({e, Rat(1)});
  }
  return s;
}

inline GermSpec f1_spec() {
  GermSpec s;
  s.dim = 2;
  s.label = "f1";
  s.facets = {{rat_vec({1, 0}), Rat(1)},
              {rat_vec({0, 1}), Rat(1)},
              {rat_vec({-1, 1}), Rat(1)},
              {rat_vec({0, -1}), Rat(1)}};
  return s;
}

inline GermSpec p1xp1_spec() {
  GermSpec s;
  s.dim = 2;
  s.label = "p1xp1";
  s.facets = {{rat_vec({1, 0}), Rat(1)},
              {rat_vec({-1, 0}), Rat(1)},
              {rat_vec({0, 1}), Rat(1)},
              {rat_vec({0, -1}), Rat(1)}};
  return s;
}

// Unbounded germ whose recession cone is not an orthant: the moment set
// {a1 >= -1, a2 >= -1, a1 + a2 >= -1} recedes along the full positive
// quadrant but has three facets.
inline GermSpec cone_spec() {
  GermSpec s;
  s.dim = 2;
  s.label = "cone";
  s.facets = {{rat_vec({1, 0}), Rat(1)}, {rat_vec({0, 1}), Rat(1)}, {rat_vec({1, 1}), Rat(1)}};
  return s;
}

// Asymmetric bounded germ (a rescaled anticanonical triangle).
inline GermSpec triangle_spec() {
  GermSpec s;
  s.dim = 2;
  s.label = "tri";
  s.facets = {{rat_vec({1, 0}), Rat(1)}, {rat_vec({0, 1}), Rat(1)}, {rat_vec({-1, -1}), Rat(2)}};
  return s;
}

inline std::shared_ptr<const Germ> make(const GermSpec& s) { return std::make_shared<Germ>(s); }

}  // namespace soliton::fixtures
