#include "filtration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace soliton {

namespace {

Rat dot_l(const std::vector<long>& p, const RatVec& xi) {
  Rat s = 0;
  for (size_t i = 0; i < p.size(); ++i) s += Rat(p[i]) * xi[i];
  return s;
}

struct JointBasisFull {
  std::vector<std::pair<Rat, Rat>> values;
  RatMat vectors;
};

JointBasisFull joint_basis_full(const Filtration& f0, const Filtration& f1, const GradedLevel& level) {
  if (f0.kind() != Filtration::Kind::Monomial)
    fail(ErrorKind::PipelineError, "the left filtration must be monomial");
  const size_t dim = level.dim();
  JointBasisFull out;
  if (f1.kind() == Filtration::Kind::Monomial) {
    for (size_t i = 0; i < dim; ++i) {
      out.values.emplace_back(f0.values()[i], f1.values()[i]);
      RatVec e(dim, Rat(0));
      e[i] = 1;
      out.vectors.push_back(std::move(e));
    }
    return out;
  }

  // Columns ordered by ascending f0-value, ties by lattice point; echelon
  // rows then read their f0-order off the pivot column.
  std::vector<int> order(dim);
  for (size_t i = 0; i < dim; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (f0.values()[a] != f0.values()[b]) return f0.values()[a] < f0.values()[b];
    return level.basis[a] < level.basis[b];
  });

  const auto& jumps = f1.jumps();
  RatMat acc;                 // accumulated echelon rows, deepest jumps first
  std::vector<int> acc_piv;   // pivot column per accumulated row
  for (size_t jj = jumps.size(); jj-- > 0;) {
    RatMat work = jumps[jj].generators;
    for (RatVec& row : work)
      for (size_t r = 0; r < acc.size(); ++r)
        if (row[acc_piv[r]] != 0) {
          Rat factor = row[acc_piv[r]];
          for (size_t c = 0; c < row.size(); ++c) row[c] -= factor * acc[r][c];
        }
    std::vector<int> pivots;
    RatMat ech = rref(std::move(work), order, &pivots);
    for (size_t r = 0; r < ech.size(); ++r) {
      out.values.emplace_back(f0.values()[pivots[r]], jumps[jj].lambda);
      out.vectors.push_back(ech[r]);
      acc.push_back(std::move(ech[r]));
      acc_piv.push_back(pivots[r]);
    }
  }
  if (out.values.size() != dim)
    fail(ErrorKind::Internal, "joint compatible basis does not span the level");
  return out;
}

}  // namespace

Rat GradedLevel::mass_unit() const {
  Rat nf = 1;
  for (int k = 2; k <= n; ++k) nf *= k;
  Rat mn = 1;
  for (int k = 0; k < n; ++k) mn *= m;
  return nf / mn;
}

GradedLevel level_from_germ(const Germ& germ, long m, std::optional<Rat> cutoff) {
  if (m < 1) fail(ErrorKind::SpecInvalid, "level degree must be positive");
  GradedLevel level;
  level.n = germ.dim();
  level.m = m;
  const Polyhedron& P = germ.moment_polyhedron();
  if (P.bounded()) {
    level.basis = P.lattice_points(m);
    return level;
  }
  if (!cutoff) fail(ErrorKind::UnboundedLevel, "unbounded germ level needs a cutoff");
  // canonical rational interior direction: sum of the Reeb cone's rays
  RatVec xi_ref(level.n, Rat(0));
  for (const RatVec& r : germ.reeb_cone().cone.rays) xi_ref = xi_ref + r;
  bool interior = !is_zero(xi_ref);
  for (const RatVec& r : germ.reeb_cone().recession_rays)
    if (interior && dot(r, xi_ref) <= 0) interior = false;
  if (!interior) fail(ErrorKind::SpecInvalid, "no rational interior Reeb direction for the cutoff");
  Rat a = germ.a_wt(xi_ref);
  RatVec neg(xi_ref.size());
  for (size_t i = 0; i < xi_ref.size(); ++i) neg[i] = -xi_ref[i];
  Polyhedron trunc = P.intersect(Halfspace{neg, *cutoff - a});
  Rat mcut = Rat(m) * *cutoff;
  for (auto& beta : trunc.lattice_points(m)) {
    Rat val = dot_l(beta, xi_ref) + Rat(m) * a;
    if (val < mcut) level.basis.push_back(std::move(beta));
  }
  level.cutoff = *cutoff;
  level.cutoff_xi_ref = xi_ref;
  return level;
}

Filtration Filtration::monomial(std::vector<Rat> values) {
  Filtration f;
  f.kind_ = Kind::Monomial;
  f.values_ = std::move(values);
  return f;
}

Filtration Filtration::flag(std::vector<FlagJump> jumps, size_t level_dim) {
  if (jumps.empty()) fail(ErrorKind::SpecInvalid, "flag filtration needs at least one jump");
  Filtration f;
  f.kind_ = Kind::Flag;
  int prev_rank = -1;
  for (size_t j = 0; j < jumps.size(); ++j) {
    if (j > 0 && !(jumps[j - 1].lambda < jumps[j].lambda))
      fail(ErrorKind::SpecInvalid, "flag jump values must be strictly increasing");
    for (const RatVec& row : jumps[j].generators)
      if (row.size() != level_dim) fail(ErrorKind::SpecInvalid, "flag generator width mismatch");
    int rank = rat_rank(jumps[j].generators);
    if (j == 0) {
      if (rank != static_cast<int>(level_dim))
        fail(ErrorKind::SpecInvalid, "first flag subspace must be the full level");
    } else {
      if (rank >= prev_rank) fail(ErrorKind::SpecInvalid, "flag subspaces must strictly decrease");
      if (rat_rank_stacked(jumps[j - 1].generators, jumps[j].generators) != prev_rank)
        fail(ErrorKind::SpecInvalid, "flag subspaces must be nested");
    }
    prev_rank = rank;
  }
  f.jumps_ = std::move(jumps);
  return f;
}

Filtration Filtration::rescale(const Rat& a) const {
  if (a <= 0) fail(ErrorKind::SpecInvalid, "rescale factor must be positive");
  Filtration f = *this;
  for (Rat& v : f.values_) v *= a;
  for (FlagJump& j : f.jumps_) j.lambda *= a;
  return f;
}

Filtration Filtration::shift(const Rat& b, long m) const {
  Filtration f = *this;
  Rat bm = b * Rat(m);
  for (Rat& v : f.values_) v += bm;
  for (FlagJump& j : f.jumps_) j.lambda += bm;
  return f;
}

Filtration filtration_from_wt(const GradedLevel& level, const RatVec& xi, const Rat& a_wt) {
  std::vector<Rat> vals(level.dim());
  for (size_t i = 0; i < level.dim(); ++i) {
    vals[i] = dot_l(level.basis[i], xi) + Rat(level.m) * a_wt;
    if (vals[i] < 0) fail(ErrorKind::Internal, "weight filtration produced a negative jump value");
  }
  return Filtration::monomial(std::move(vals));
}

Filtration trivial_filtration(const GradedLevel& level) {
  return Filtration::monomial(std::vector<Rat>(level.dim(), Rat(0)));
}

Filtration twist(const Filtration& f, const GradedLevel& level, const RatVec& xi) {
  if (f.kind() != Filtration::Kind::Monomial)
    fail(ErrorKind::NotEquivariant, "twist needs a weight-homogeneous (monomial) filtration");
  std::vector<Rat> vals = f.values();
  for (size_t i = 0; i < level.dim(); ++i) vals[i] += dot_l(level.basis[i], xi);
  return Filtration::monomial(std::move(vals));
}

std::vector<std::pair<Rat, long>> successive_minima(const Filtration& f, const GradedLevel& level) {
  std::map<Rat, long> mult;
  if (f.kind() == Filtration::Kind::Monomial) {
    if (f.values().size() != level.dim()) fail(ErrorKind::SpecInvalid, "filtration/level size mismatch");
    for (const Rat& v : f.values()) mult[v] += 1;
  } else {
    const auto& jumps = f.jumps();
    for (size_t j = 0; j < jumps.size(); ++j) {
      long rank = rat_rank(jumps[j].generators);
      long next = (j + 1 < jumps.size()) ? rat_rank(jumps[j + 1].generators) : 0;
      mult[jumps[j].lambda] += rank - next;
    }
  }
  return {mult.begin(), mult.end()};
}

Rat AtomicMeasure::total_mass() const {
  Rat s = 0;
  for (const auto& [x, m] : atoms) s += m;
  return s;
}

Rat BivariateMeasure::total_mass() const {
  Rat s = 0;
  for (const auto& [x, y, m] : atoms) s += m;
  return s;
}

AtomicMeasure BivariateMeasure::marginal_x() const {
  std::map<Rat, Rat> acc;
  for (const auto& [x, y, m] : atoms) acc[x] += m;
  AtomicMeasure out;
  out.atoms.assign(acc.begin(), acc.end());
  return out;
}

AtomicMeasure BivariateMeasure::marginal_y() const {
  std::map<Rat, Rat> acc;
  for (const auto& [x, y, m] : atoms) acc[y] += m;
  AtomicMeasure out;
  out.atoms.assign(acc.begin(), acc.end());
  return out;
}

AtomicMeasure BivariateMeasure::interpolate(const Rat& t) const {
  std::map<Rat, Rat> acc;
  for (const auto& [x, y, m] : atoms) acc[(Rat(1) - t) * x + t * y] += m;
  AtomicMeasure out;
  out.atoms.assign(acc.begin(), acc.end());
  return out;
}

AtomicMeasure dh_discrete(const Filtration& f, const GradedLevel& level) {
  AtomicMeasure out;
  Rat unit = level.mass_unit();
  for (const auto& [lambda, mult] : successive_minima(f, level))
    out.atoms.emplace_back(lambda / Rat(level.m), Rat(mult) * unit);
  return out;
}

JointBasis joint_compatible_basis(const Filtration& f0, const Filtration& f1, const GradedLevel& level) {
  JointBasisFull full = joint_basis_full(f0, f1, level);
  return JointBasis{std::move(full.values)};
}

BivariateMeasure dh_bivariate(const Filtration& f0, const Filtration& f1, const GradedLevel& level) {
  JointBasis jb = joint_compatible_basis(f0, f1, level);
  std::map<std::pair<Rat, Rat>, Rat> acc;
  Rat unit = level.mass_unit();
  Rat m(level.m);
  for (const auto& [mu, nu] : jb.values) acc[{mu / m, nu / m}] += unit;
  BivariateMeasure out;
  for (const auto& [key, mass] : acc) out.atoms.emplace_back(key.first, key.second, mass);
  return out;
}

Filtration geodesic(const Filtration& f0, const Filtration& f1, const GradedLevel& level, const Rat& t) {
  if (t < 0 || t > 1) fail(ErrorKind::SpecInvalid, "geodesic parameter must lie in [0,1]");
  if (t == 0) return f0;
  if (t == 1) return f1;
  if (f0.kind() == Filtration::Kind::Monomial && f1.kind() == Filtration::Kind::Monomial) {
    std::vector<Rat> vals(level.dim());
    for (size_t i = 0; i < level.dim(); ++i)
      vals[i] = (Rat(1) - t) * f0.values()[i] + t * f1.values()[i];
    return Filtration::monomial(std::move(vals));
  }
  JointBasisFull full = joint_basis_full(f0, f1, level);
  std::vector<Rat> vals(full.values.size());
  for (size_t i = 0; i < full.values.size(); ++i)
    vals[i] = (Rat(1) - t) * full.values[i].first + t * full.values[i].second;
  std::vector<Rat> levels = vals;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<FlagJump> jumps;
  for (const Rat& lam : levels) {
    FlagJump j;
    j.lambda = lam;
    for (size_t i = 0; i < vals.size(); ++i)
      if (vals[i] >= lam) j.generators.push_back(full.vectors[i]);
    jumps.push_back(std::move(j));
  }
  return Filtration::flag(std::move(jumps), level.dim());
}

GeodesicDhCheck geodesic_dh_identity(const Filtration& f0, const Filtration& f1, const GradedLevel& level,
                                     const Rat& t) {
  AtomicMeasure lhs = dh_discrete(geodesic(f0, f1, level, t), level);
  AtomicMeasure rhs = dh_bivariate(f0, f1, level).interpolate(t);
  std::map<Rat, Rat> diff;
  for (const auto& [x, m] : lhs.atoms) diff[x] += m;
  for (const auto& [x, m] : rhs.atoms) diff[x] -= m;
  GeodesicDhCheck out;
  out.deviation = 0;
  for (const auto& [x, d] : diff) out.deviation += abs(d);
  out.ok = out.deviation == 0;
  return out;
}

double s_tilde_m(const Filtration& f, const GradedLevel& level) {
  double s = 0.0;
  for (const auto& [x, mass] : dh_discrete(f, level).atoms)
    s += to_double(mass) * std::exp(-to_double(x));
  return -std::log(s);
}

double h_m(const Filtration& f, const GradedLevel& level, double mu) {
  return mu - s_tilde_m(f, level);
}

double s_weighted_m(const Filtration& f0, double mu0, const Filtration& f, const GradedLevel& level,
                    double t_cut) {
  Rat tc = rat_from_double(t_cut);
  double V = 0.0, num = 0.0;
  for (const auto& [x, y, mass] : dh_bivariate(f0, f, level).atoms) {
    if (x > tc) continue;
    double w = to_double(mass) * std::exp(mu0 - to_double(x));
    V += w;
    num += w * to_double(y);
  }
  if (V <= 0.0) fail(ErrorKind::SpecInvalid, "empty truncation in S_{m,mt}");
  return num / V;
}

double lambda_max_truncated(const Filtration& f0, const Filtration& f, const GradedLevel& level,
                            double t_cut) {
  Rat tc = rat_from_double(t_cut);
  bool found = false;
  Rat best = 0;
  for (const auto& [x, y, mass] : dh_bivariate(f0, f, level).atoms) {
    if (x > tc) continue;
    if (!found || y > best) {
      best = y;
      found = true;
    }
  }
  if (!found) fail(ErrorKind::SpecInvalid, "empty truncation window");
  return to_double(best);
}

std::optional<std::string> multiplicativity_spot_check(const GradedLevel& la, const Filtration& fa,
                                                       const GradedLevel& lb, const Filtration& fb,
                                                       const GradedLevel& lab, const Filtration& fab) {
  if (fa.kind() != Filtration::Kind::Monomial || fb.kind() != Filtration::Kind::Monomial ||
      fab.kind() != Filtration::Kind::Monomial)
    return std::nullopt;
  std::map<std::vector<long>, size_t> index;
  for (size_t k = 0; k < lab.basis.size(); ++k) index[lab.basis[k]] = k;
  for (size_t i = 0; i < la.basis.size(); ++i)
    for (size_t j = 0; j < lb.basis.size(); ++j) {
      std::vector<long> sum(la.basis[i].size());
      for (size_t c = 0; c < sum.size(); ++c) sum[c] = la.basis[i][c] + lb.basis[j][c];
      auto it = index.find(sum);
      if (it == index.end()) continue;  // truncated away
      if (fab.values()[it->second] < fa.values()[i] + fb.values()[j]) {
        std::ostringstream os;
        os << "multiplicativity violated at basis pair (" << i << "," << j << ")";
        return os.str();
      }
    }
  return std::nullopt;
}

}  // namespace soliton
