#pragma once

// Exact rational scalars and vectors. All combinatorial geometry runs on
// mpq; doubles appear only at the integration layer.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"

namespace soliton {

using Rat = mpq_class;
using RatVec = std::vector<Rat>;
using Vec = std::vector<double>;

inline double to_double(const Rat& q) { return q.get_d(); }

// mpq_class(p, q) does not canonicalize, and GMP equality assumes canonical
// form; every literal fraction must go through here.
inline Rat make_rat(long num, long den) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Vec to_double(const RatVec& v) {
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

// "p/q" (or "p") with q > 0.
Rat rat_from_string(const std::string& s);
std::string rat_to_string(const Rat& q);

// Nearest rational via continued fractions. Exact on doubles that encode
// small-denominator rationals; otherwise within ~1e-15 relative.
Rat rat_from_double(double x, long max_den = 1'000'000'000L);

inline RatVec rat_vec(std::initializer_list<long> xs) {
  RatVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

inline RatVec rat_vec_from_double(const Vec& xs, long max_den = 1'000'000'000L) {
  RatVec v(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) v[i] = rat_from_double(xs[i], max_den);
  return v;
}

inline bool is_zero(const RatVec& v) {
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

inline Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const RatVec& a, const Vec& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i].get_d() * b[i];
  return s;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RatVec operator+(const RatVec& a, const RatVec& b);
RatVec operator-(const RatVec& a, const RatVec& b);
RatVec operator*(const Rat& c, const RatVec& v);

// Scales to a primitive integer vector (gcd 1), preserving direction.
RatVec primitive(const RatVec& v);

// Strict lexicographic order.
bool lex_less(const RatVec& a, const RatVec& b);

}  // namespace soliton
