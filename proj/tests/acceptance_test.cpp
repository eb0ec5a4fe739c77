// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/fixtures.hpp"
#include "core/json_io.hpp"
#include "core/sampling.hpp"
#include "core/valuation.hpp"
#include "core/verify.hpp"

using namespace soliton;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %-34s %s  %s\n", idx, name.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// independent dense-grid quadrature for 2-d bounded germs (composite
// Simpson over slices; the inner integral is exact)
double h_oracle_2d(const Germ& g, double x1, double x2, int slices = 8192) {
  const Polyhedron& P = g.moment_polyhedron();
  double lo = 1e300, hi = -1e300;
  for (const RatVec& v : P.vertices()) {
    lo = std::min(lo, to_double(v[1]));
    hi = std::max(hi, to_double(v[1]));
  }
  auto f = [&](double a2) {
    double l = -1e300, r = 1e300;
    for (const Halfspace& h : P.halfspaces()) {
      double c0 = to_double(h.normal[0]), c1 = to_double(h.normal[1]), b = to_double(h.offset);
      if (c0 > 0)
        l = std::max(l, (-b - c1 * a2) / c0);
      else if (c0 < 0)
        r = std::min(r, (-b - c1 * a2) / c0);
      else if (c1 * a2 + b < 0)
        return 0.0;
    }
    if (r <= l) return 0.0;
    double inner = (std::fabs(x1) < 1e-14) ? (r - l) : (std::exp(-x1 * l) - std::exp(-x1 * r)) / x1;
    return inner * std::exp(-x2 * a2);
  };
  double h = (hi - lo) / slices;
  double acc = f(lo) + f(hi);
  for (int k = 1; k < slices; ++k) acc += f(lo + k * h) * ((k % 2) ? 4.0 : 2.0);
  return std::log(2.0 * acc * h / 3.0);
}

// --- criteria ---------------------------------------------------------------

void criterion_1() {
  // W of the normalized A^n valuation at (1,..,1) is n! e^n within 1e-9
  // relative; over 200 random normalized weights per n the values stay above
  // n! e^n (minimality of the uniform weights) while the running infimum,
  // which witnesses the germ weighted volume, stays below n! e^n (1 + 1e-9).
  bool pass = true;
  double worst = 0.0;
  CounterRng rng(20250809);
  for (int n = 1; n <= 4; ++n) {
    double ref = std::exp(n);
    for (int k = 2; k <= n; ++k) ref *= k;
    double w1 = MonomialValuation::affine(RatVec(n, Rat(1))).weighted_vol();
    if (std::fabs(w1 - ref) > 1e-9 * ref) pass = false;
    worst = std::max(worst, std::fabs(w1 - ref) / ref);
    double inf_w = w1;
    for (int s = 0; s < 200; ++s) {
      RatVec xi(n);
      for (auto& x : xi) x = sampling::positive_rat(rng, 6);
      auto [a, norm] = MonomialValuation::affine(xi).normalize_scaling();
      double w = norm.weighted_vol();
      inf_w = std::min(inf_w, w);
      if (w < ref * (1.0 - 1e-9)) pass = false;
    }
    if (inf_w > ref * (1.0 + 1e-9)) pass = false;
  }
  report(1, "max_weighted_volume", pass, "worst rel gap at ones " + fmt(worst));
}

void criterion_2() {
  bool pass = true;
  std::string detail;
  Germ p1(fixtures::p1_spec()), p2(fixtures::p2_spec()), f1(fixtures::f1_spec());
  double e1 = std::fabs(std::exp(p1.h_eval({0.0})) - 2.0) / 2.0;
  double e2 = std::fabs(std::exp(p2.h_eval({0.0, 0.0})) - 9.0) / 9.0;
  if (e1 > 1e-10 || e2 > 1e-10) pass = false;

  auto c1 = p1.minimize_h(1e-9, 300);
  auto c2 = p2.minimize_h(1e-9, 300);
  if (std::fabs(c1.xi0[0]) > 1e-8) pass = false;
  if (std::hypot(c2.xi0[0], c2.xi0[1]) > 1e-8) pass = false;

  auto cf = f1.minimize_h(1e-10, 300);
  // independent oracle: finite-difference Newton over the Simpson grid
  Vec x{0.0, 0.0};
  const double h = 1e-3;
  for (int it = 0; it < 80; ++it) {
    double g1 = (h_oracle_2d(f1, x[0] + h, x[1]) - h_oracle_2d(f1, x[0] - h, x[1])) / (2 * h);
    double g2 = (h_oracle_2d(f1, x[0], x[1] + h) - h_oracle_2d(f1, x[0], x[1] - h)) / (2 * h);
    double h11 = (h_oracle_2d(f1, x[0] + h, x[1]) - 2 * h_oracle_2d(f1, x[0], x[1]) +
                  h_oracle_2d(f1, x[0] - h, x[1])) /
                 (h * h);
    double h22 = (h_oracle_2d(f1, x[0], x[1] + h) - 2 * h_oracle_2d(f1, x[0], x[1]) +
                  h_oracle_2d(f1, x[0], x[1] - h)) /
                 (h * h);
    double h12 = (h_oracle_2d(f1, x[0] + h, x[1] + h) - h_oracle_2d(f1, x[0] + h, x[1] - h) -
                  h_oracle_2d(f1, x[0] - h, x[1] + h) + h_oracle_2d(f1, x[0] - h, x[1] - h)) /
                 (4 * h * h);
    double det = h11 * h22 - h12 * h12;
    double dx = (-g1 * h22 + g2 * h12) / det;
    double dy = (-g2 * h11 + g1 * h12) / det;
    x[0] += dx;
    x[1] += dy;
    if (std::hypot(dx, dy) < 1e-12) break;
  }
  double oracle_gap = std::hypot(cf.xi0[0] - x[0], cf.xi0[1] - x[1]);
  if (oracle_gap > 1e-6) pass = false;
  double fut1 = std::fabs(f1.futaki(cf.xi0, {1.0, 0.0}));
  double fut2 = std::fabs(f1.futaki(cf.xi0, {0.0, 1.0}));
  if (fut1 > 1e-8 || fut2 > 1e-8) pass = false;
  report(2, "global_toric_baseline", pass,
         "F1 oracle gap " + fmt(oracle_gap) + ", |Fut| " + fmt(std::max(fut1, fut2)));
}

void criterion_3() {
  bool pass = true;
  double worst = 0.0;
  CounterRng rng(333);
  for (int t = 0; t < 20; ++t) {
    int n = 1 + static_cast<int>(rng.next_u64() % 3);
    RatVec xi(n);
    for (auto& x : xi) x = sampling::positive_rat(rng, 5);
    MonomialValuation v = MonomialValuation::affine(xi);
    double mu = lc_slope_monomial(v, 64, 1e-6);
    double a = to_double(v.a_value());
    worst = std::max(worst, std::fabs(mu - a));
    if (std::fabs(mu - a) > 1e-6) pass = false;
    if (mu > a + 1e-6) pass = false;
  }
  report(3, "slope_recovery", pass, "worst |mu - sum xi| " + fmt(worst));
}

void criterion_4() {
  bool mc_pass = true, fd_pass = true;
  double worst_sigma = 0.0, worst_grad = 0.0, worst_hess = 0.0;
  auto germs = sampling::fixture_germs();
  CounterRng rng(444);
  int used = 0;
  for (int t = 0; used < 20; ++t) {
    const auto& g = germs[t % germs.size()];
    if (g->dim() > 3) continue;
    ++used;
    Vec xi = to_double(sampling::interior_xi(*g, rng));
    double closed = exp_integral(g->moment_polyhedron(), xi).value;
    McResult mc = mc_oracle(g->moment_polyhedron(), xi, IntegrandKind::Exp, 1000000, 90000 + t);
    double sig = std::fabs(closed - mc.estimate) / mc.standard_error;
    worst_sigma = std::max(worst_sigma, sig);
    if (sig > 3.0) mc_pass = false;
  }
  const double h = 1e-5;
  for (int t = 0, done = 0; done < 50 && t < 500; ++t) {
    const auto& g = germs[t % germs.size()];
    Vec xi = to_double(sampling::interior_xi(*g, rng));
    int n = g->dim();
    int k = static_cast<int>(rng.next_u64() % n);
    Vec eta(n, 0.0);
    eta[k] = 1.0;
    const auto& cl = g->cells();
    const auto& rr = g->reeb_cone().recession_rays;
    double I0 = exp_integral(cl, rr, xi).value;
    double mom = exp_moment(cl, rr, xi, eta);
    if (std::fabs(mom) < 1e-3 * I0) continue;  // relative error needs a scale
    ++done;
    Vec xp = xi, xm = xi;
    xp[k] += h;
    xm[k] -= h;
    double Ip = exp_integral(cl, rr, xp).value;
    double Im = exp_integral(cl, rr, xm).value;
    double hess = exp_hessian_entry(cl, rr, xi, eta, eta);
    double ge = std::fabs((Ip - Im) / (2 * h) + mom) / std::fabs(mom);
    const double h2 = 1e-4;  // second differences need the coarser step
    Vec xp2 = xi, xm2 = xi;
    xp2[k] += h2;
    xm2[k] -= h2;
    double he = std::fabs((exp_integral(cl, rr, xp2).value - 2 * I0 + exp_integral(cl, rr, xm2).value) /
                              (h2 * h2) -
                          hess) /
                std::fabs(hess);
    worst_grad = std::max(worst_grad, ge);
    worst_hess = std::max(worst_hess, he);
    if (ge > 1e-6 || he > 1e-4) fd_pass = false;
  }
  report(4, "kernel_correctness", mc_pass && fd_pass,
         "worst sigma " + fmt(worst_sigma) + ", grad " + fmt(worst_grad) + ", hess " + fmt(worst_hess));
}

void criterion_5() {
  bool pass = true;
  double worst_dd = 1.0;
  Rat worst_dev = 0;
  CounterRng rng(555);
  std::vector<std::shared_ptr<const Germ>> germs = {fixtures::make(fixtures::p1_spec()),
                                                    fixtures::make(fixtures::p2_spec()),
                                                    fixtures::make(fixtures::an_spec(2))};
  auto a2 = germs[2];
  for (int t = 0; t < 100; ++t) {
    const auto& g = germs[t % germs.size()];
    long m = 1 + static_cast<long>(rng.next_u64() % (g->dim() == 1 ? 8 : 3));
    GradedLevel level = g->moment_polyhedron().bounded() ? level_from_germ(*g, m)
                                                         : level_from_germ(*g, m, Rat(4));
    if (level.dim() > 60 || level.dim() < 2) {
      --t;
      continue;
    }
    Filtration f0 = sampling::random_monomial(level, rng);
    Filtration f1 = (rng.next_u64() & 1) ? sampling::random_monomial(level, rng)
                                         : sampling::random_flag(level, rng);
    BivariateMeasure bi = dh_bivariate(f0, f1, level);
    double mu0 = 1.0, mu1 = 0.75;
    std::vector<double> gv;
    for (int k = 0; k <= 20; ++k) {
      double s = k / 20.0;
      double acc = 0.0;
      for (const auto& [x, y, mass] : bi.atoms)
        acc += to_double(mass) * std::exp((1 - s) * (mu0 - to_double(x)) + s * (mu1 - to_double(y)));
      gv.push_back(std::log(acc));
    }
    for (int k = 1; k < 20; ++k) {
      double dd = gv[k + 1] - 2 * gv[k] + gv[k - 1];
      worst_dd = std::min(worst_dd, dd);
      if (dd < -1e-10) pass = false;
    }
    Rat tt = make_rat(1 + static_cast<long>(rng.next_u64() % 7), 8);
    GeodesicDhCheck c = geodesic_dh_identity(f0, f1, level, tt);
    if (!c.ok) pass = false;
    if (c.deviation > worst_dev) worst_dev = c.deviation;
  }
  report(5, "geodesic_convexity", pass,
         "min second diff " + fmt(worst_dd) + ", max deviation " + rat_to_string(worst_dev));
}

void criterion_6() {
  bool pass = true;
  CounterRng rng(666);
  auto germs = sampling::fixture_germs();
  double worst_mono = 0.0, worst_bm = 0.0;
  for (int t = 0; t < 30; ++t) {
    const auto& g = germs[t % germs.size()];
    MonomialValuation v = (t % 3 == 0) ? MonomialValuation::affine([&] {
      int n = 2 + static_cast<int>(rng.next_u64() % 2);
      RatVec xi(n);
      for (auto& x : xi) x = sampling::positive_rat(rng);
      return xi;
    }())
                                       : MonomialValuation::on_germ(g, sampling::interior_xi(*g, rng));
    const int n = v.dim();
    double tmax = v.dh_limit().finite_support() ? v.dh_limit().sup_support() : 3.0 * n;
    Rat prev = -1;
    for (int k = 0; k < 100; ++k) {
      double td = 1e-3 * std::pow(tmax / 1e-3, k / 99.0);
      Rat tr = rat_from_double(td, 100000);
      Rat tn = 1;
      for (int i = 0; i < n; ++i) tn *= tr;
      Rat ratio = v.vol_fn_limit(tr) / tn;
      if (prev >= 0 && ratio > prev) {
        worst_mono = std::max(worst_mono, to_double(ratio - prev));
        if (to_double(ratio - prev) > 1e-12) pass = false;
      }
      prev = ratio;
    }
    if (!(v.vol_fn_limit(Rat(1, 1000)) > 0)) pass = false;
    if (n >= 2) {
      std::vector<double> ys;
      for (int k = 0; k < 21; ++k) {
        Rat tr = rat_from_double(0.05 + (0.9 * tmax - 0.05) * k / 20.0, 100000);
        ys.push_back(std::pow(to_double(v.vol_fn_derivative(tr)), 1.0 / (n - 1)));
      }
      for (int k = 1; k < 20; ++k) {
        double dd = ys[k + 1] - 2 * ys[k] + ys[k - 1];
        worst_bm = std::max(worst_bm, dd);
        if (dd > 1e-10 * std::max(1.0, std::fabs(ys[k]))) pass = false;
      }
    }
  }
  report(6, "volume_function_laws", pass,
         "worst mono slack " + fmt(worst_mono) + ", worst BM second diff " + fmt(worst_bm));
}

void criterion_7() {
  bool pass = true;
  std::string detail;
  struct Case {
    std::shared_ptr<const Germ> germ;
    RatVec xi;
    std::optional<Rat> cutoff;
    double t_window;
  };
  std::vector<Case> cases = {
      {fixtures::make(fixtures::p1_spec()), rat_vec({1}), std::nullopt, 2.0},
      {fixtures::make(fixtures::p2_spec()), {Rat(1), Rat(2)}, std::nullopt, 0.0},
      {fixtures::make(fixtures::an_spec(2)), rat_vec({1, 1}), Rat(8), 6.0}};
  for (const Case& c : cases) {
    MonomialValuation v = MonomialValuation::on_germ(c.germ, c.xi);
    double window = c.t_window > 0 ? c.t_window
                                   : v.dh_limit().sup_support();
    double prev_gap = -1.0;
    for (long m : {8L, 16L, 32L, 64L}) {
      GradedLevel level = level_from_germ(*c.germ, m, c.cutoff);
      AtomicMeasure atoms = dh_discrete(filtration_from_wt(level, c.xi, c.germ->a_wt(c.xi)), level);
      double gap = 0.0, acc = 0.0;
      for (const auto& [x, mass] : atoms.atoms) {
        double xd = to_double(x);
        if (xd > window) break;
        double lim = v.vol_fn_limit(xd);
        gap = std::max(gap, std::fabs(acc - lim));
        acc += to_double(mass);
        gap = std::max(gap, std::fabs(acc - lim));
      }
      if (prev_gap > 0) {
        double ratio = gap / prev_gap;  // expect about 1/2 per doubling
        if (ratio < 0.5 * 0.3 || ratio > 0.5 * 3.0) pass = false;
        detail += fmt(ratio) + " ";
      }
      prev_gap = gap;
    }
  }
  report(7, "dh_discrete_to_limit", pass, "doubling ratios " + detail);
}

void criterion_8() {
  bool pass = true;
  double worst_delta = 0.0, worst_ding = 0.0;
  CounterRng rng(888);
  for (const auto& spec :
       {fixtures::p1_spec(), fixtures::p2_spec(), fixtures::f1_spec()}) {
    auto g = fixtures::make(spec);
    auto cert = g->minimize_h(1e-10, 300);
    DeltaResult d = g->delta_toric(cert.xi0, 1e-6, 20);
    worst_delta = std::max(worst_delta, std::fabs(d.delta - 1.0));
    if (std::fabs(d.delta - 1.0) > 1e-4) pass = false;
    for (int s = 0; s < 100; ++s) {
      RatVec xi = sampling::interior_xi(*g, rng);
      double ding = g->ding_invariant(cert.xi0, to_double(xi));
      worst_ding = std::min(worst_ding, ding);
      if (ding < -1e-8) pass = false;
    }
  }
  report(8, "stability_consistency", pass,
         "worst |delta-1| " + fmt(worst_delta) + ", min ding " + fmt(worst_ding));
}

void criterion_9() {
  bool pass = true;
  double worst = -1e300;
  CounterRng rng(999);
  for (int n = 1; n <= 4; ++n) {
    for (int s = 0; s < 200; ++s) {
      RatVec xi(n);
      for (auto& x : xi) x = sampling::positive_rat(rng, 6);
      auto [a, norm] = MonomialValuation::affine(xi).normalize_scaling();
      double gap = to_double(norm.a_value()) - n;
      worst = std::max(worst, gap);
      if (gap > 1e-9) pass = false;
    }
  }
  for (const auto& g : sampling::fixture_germs()) {
    for (int s = 0; s < 30; ++s) {
      Vec xi = to_double(sampling::interior_xi(*g, rng));
      double a_star = g->normalize_scale(xi);
      Vec z(xi.size());
      for (size_t i = 0; i < xi.size(); ++i) z[i] = a_star * xi[i];
      bool closed = true;
      for (const RatVec& r : g->reeb_cone().recession_rays)
        if (dot(r, z) < 0) closed = false;
      if (!closed) continue;
      double gap = g->a_wt(z) - g->dim();
      worst = std::max(worst, gap);
      if (gap > 1e-9) pass = false;
    }
  }
  report(9, "normalization_bound", pass, "worst a_value - n " + fmt(worst));
}

void criterion_10() {
  bool pass = true;
  CounterRng rng(1010);
  for (int n : {2, 3}) {
    Germ an(fixtures::an_spec(n));
    double h_min = an.minimize_h(1e-8, 200).h_value;
    for (int seq = 0; seq < 5; ++seq) {
      Vec base(n);
      for (double& b : base) b = 0.5 + static_cast<double>(rng.next_u64() % 150) / 100.0;
      int shrink = static_cast<int>(rng.next_u64() % n);
      double prev_h = -1e300;
      bool exceeded = false;
      double min_c = 1.0;
      for (int k = 1; k < 60; ++k) {
        Vec xi = base;
        xi[shrink] = std::pow(2.0, -k);
        double scale = an.normalize_scale(xi);
        for (double& c : xi) c *= scale;
        min_c = *std::min_element(xi.begin(), xi.end());
        if (min_c < 1e-6) break;
        double h = an.h_eval(xi);
        if (h <= prev_h) pass = false;
        prev_h = h;
        if (h > h_min + 10.0) {
          exceeded = true;
          break;
        }
      }
      if (!exceeded) pass = false;
    }
  }
  report(10, "properness_probe", pass, "");
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
