#include "rational.hpp"

#include <cmath>
#include <cstdlib>

namespace soliton {

Rat rat_from_string(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) fail(ErrorKind::ParseError, "empty rational literal");
  try {
    Rat q(t);
    q.canonicalize();
    if (t.find('/') != std::string::npos && q.get_den() == 0)
      fail(ErrorKind::ParseError, "zero denominator in '" + s + "'");
    return q;
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::ParseError, "bad rational literal '" + s + "'");
  }
}

std::string rat_to_string(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rat rat_from_double(double x, long max_den) {
  if (!std::isfinite(x)) fail(ErrorKind::ParseError, "non-finite value");
  if (x == 0.0) return Rat(0);
  bool neg = x < 0;
  double a = std::fabs(x);
  // continued fraction convergents p/q
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = a;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(frac);
    if (fl > 9e17) break;
    long ai = static_cast<long>(fl);
    long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den || q2 < 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double rem = frac - fl;
    if (rem < 1e-15 * std::max(1.0, frac)) break;
    frac = 1.0 / rem;
  }
  Rat q(p1, q1);
  q.canonicalize();
  return neg ? Rat(-q) : q;
}

RatVec operator+(const RatVec& a, const RatVec& b) {
  RatVec c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

RatVec operator-(const RatVec& a, const RatVec& b) {
  RatVec c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

RatVec operator*(const Rat& c, const RatVec& v) {
  RatVec w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = c * v[i];
  return w;
}

RatVec primitive(const RatVec& v) {
  mpz_class den_lcm = 1;
  for (const Rat& x : v) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den().get_mpz_t());
  mpz_class g = 0;
  std::vector<mpz_class> ints(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    ints[i] = v[i].get_num() * (den_lcm / v[i].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[i].get_mpz_t());
  }
  RatVec out(v.size());
  if (g == 0) return out;  // zero vector
  for (size_t i = 0; i < v.size(); ++i) out[i] = Rat(ints[i] / g);
  return out;
}

bool lex_less(const RatVec& a, const RatVec& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

}  // namespace soliton
