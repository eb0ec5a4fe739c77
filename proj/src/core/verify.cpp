#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sampling.hpp"
#include "valuation.hpp"

namespace soliton {

namespace {

using sampling::fixture_germs;
using sampling::interior_xi;

CheckResult check(const std::string& name, bool pass, double worst, const std::string& detail = "") {
  return CheckResult{name, pass, worst, detail};
}

Vec perturb(const Vec& xi, int k, double h) {
  Vec p = xi;
  p[k] += h;
  return p;
}

// ---- gradients ------------------------------------------------------------

std::vector<CheckResult> suite_gradients(bool quick) {
  auto germs = fixture_germs();
  const int trials = quick ? 10 : 50;
  CounterRng rng(101);
  double worst_grad = 0.0, worst_hess = 0.0;
  const double h = 1e-5;
  for (int t = 0, done = 0; done < trials && t < 10 * trials; ++t) {
    const auto& g = germs[t % germs.size()];
    Vec xi = to_double(interior_xi(*g, rng));
    const auto& cells = g->cells();
    const auto& rays = g->reeb_cone().recession_rays;
    const int n = g->dim();
    int k = static_cast<int>(rng.next_u64() % n);
    Vec eta(n, 0.0);
    eta[k] = 1.0;
    double I0 = exp_integral(cells, rays, xi).value;
    double an = -exp_moment(cells, rays, xi, eta);
    if (std::fabs(an) < 1e-3 * I0) continue;  // relative error needs a scale
    ++done;
    double Ip = exp_integral(cells, rays, perturb(xi, k, h)).value;
    double Im = exp_integral(cells, rays, perturb(xi, k, -h)).value;
    double fd = (Ip - Im) / (2 * h);
    worst_grad = std::max(worst_grad, std::fabs(fd - an) / std::fabs(an));

    const double h2 = 1e-4;  // second differences sit above roundoff here
    double fd2 = (exp_integral(cells, rays, perturb(xi, k, h2)).value - 2 * I0 +
                  exp_integral(cells, rays, perturb(xi, k, -h2)).value) /
                 (h2 * h2);
    double an2 = exp_hessian_entry(cells, rays, xi, eta, eta);
    worst_hess = std::max(worst_hess, std::fabs(fd2 - an2) / std::max(1e-30, std::fabs(an2)));
  }
  return {check("grad_fd_consistency", worst_grad <= 1e-6, worst_grad),
          check("hessian_fd_consistency", worst_hess <= 1e-4, worst_hess)};
}

// ---- oracle ---------------------------------------------------------------

std::vector<CheckResult> suite_oracle(bool quick) {
  auto germs = fixture_germs();
  const int trials = quick ? 5 : 20;
  const std::int64_t samples = quick ? 200000 : 1000000;
  CounterRng rng(202);
  double worst_sigma = 0.0;
  bool pass = true;
  int used = 0;
  for (int t = 0; used < trials; ++t) {
    const auto& g = germs[t % germs.size()];
    if (g->dim() > 3) continue;
    ++used;
    Vec xi = to_double(interior_xi(*g, rng));
    double closed = exp_integral(g->moment_polyhedron(), xi).value;
    McResult mc = mc_oracle(g->moment_polyhedron(), xi, IntegrandKind::Exp, samples, 7777 + t);
    double sig = std::fabs(closed - mc.estimate) / mc.standard_error;
    worst_sigma = std::max(worst_sigma, sig);
    if (sig > 3.0) pass = false;
  }
  // seed repeatability
  auto g0 = fixtures::make(fixtures::p1_spec());
  McResult a = mc_oracle(g0->moment_polyhedron(), {1.0}, IntegrandKind::Exp, 100000, 42);
  McResult b = mc_oracle(g0->moment_polyhedron(), {1.0}, IntegrandKind::Exp, 100000, 42);
  bool repeat = a.estimate == b.estimate && a.standard_error == b.standard_error;
  return {check("mc_within_3_sigma", pass, worst_sigma),
          check("mc_seed_repeatability", repeat, repeat ? 0.0 : 1.0)};
}

// ---- convexity ------------------------------------------------------------

std::vector<CheckResult> suite_convexity(bool quick) {
  std::vector<CheckResult> out;
  auto germs = fixture_germs();
  CounterRng rng(303);

  // strict convexity of H along random Reeb-interior segments
  {
    const int trials = quick ? 10 : 50;
    double worst = 1.0;
    bool pass = true;
    for (int t = 0; t < trials; ++t) {
      const auto& g = germs[t % germs.size()];
      Vec a = to_double(interior_xi(*g, rng));
      Vec b = to_double(interior_xi(*g, rng));
      bool distinct = false;
      for (size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a[i] - b[i]) > 1e-12) distinct = true;
      if (!distinct) {
        --t;
        continue;
      }
      Vec mid(a.size());
      for (size_t i = 0; i < a.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
      double gap = 0.5 * (g->h_eval(a) + g->h_eval(b)) - g->h_eval(mid);
      worst = std::min(worst, gap);
      if (gap <= 1e-12) pass = false;
    }
    out.push_back(check("h_strictly_convex_on_segments", pass, worst));
  }

  // geodesic convexity witness over bi-variate DH measures, plus the exact
  // pushforward identity
  {
    const int trials = quick ? 20 : 100;
    double worst_second_diff = 1.0;
    Rat worst_dev = 0;
    bool pass = true;
    std::vector<std::shared_ptr<const Germ>> lg = {fixtures::make(fixtures::p1_spec()),
                                                   fixtures::make(fixtures::p2_spec()),
                                                   fixtures::make(fixtures::an_spec(2))};
    for (int t = 0; t < trials; ++t) {
      const auto& g = lg[t % lg.size()];
      long m = 1 + static_cast<long>(rng.next_u64() % (g->dim() == 1 ? 8 : 4));
      GradedLevel level = g->moment_polyhedron().bounded()
                              ? level_from_germ(*g, m)
                              : level_from_germ(*g, m, Rat(4));
      if (level.dim() > 60 || level.dim() < 2) {
        --t;
        continue;
      }
      Filtration f0 = sampling::random_monomial(level, rng);
      Filtration f1 = (rng.next_u64() & 1) ? sampling::random_monomial(level, rng)
                                           : sampling::random_flag(level, rng);
      BivariateMeasure bi = dh_bivariate(f0, f1, level);
      double mu0 = 1.0, mu1 = 0.5;  // any affine weights keep log-sum-exp convex
      auto gfun = [&](double s) {
        double acc = 0.0;
        for (const auto& [x, y, mass] : bi.atoms)
          acc += to_double(mass) * std::exp((1 - s) * (mu0 - to_double(x)) + s * (mu1 - to_double(y)));
        return std::log(acc);
      };
      std::vector<double> gv;
      for (int k = 0; k <= 20; ++k) gv.push_back(gfun(k / 20.0));
      for (int k = 1; k < 20; ++k) {
        double dd = gv[k + 1] - 2 * gv[k] + gv[k - 1];
        worst_second_diff = std::min(worst_second_diff, dd);
        if (dd < -1e-10) pass = false;
      }
      Rat tt = make_rat(1 + static_cast<long>(rng.next_u64() % 7), 8);
      GeodesicDhCheck idc = geodesic_dh_identity(f0, f1, level, tt);
      if (!idc.ok) pass = false;
      if (idc.deviation > worst_dev) worst_dev = idc.deviation;
    }
    out.push_back(check("geodesic_log_sum_exp_convex", pass && worst_dev == 0, worst_second_diff,
                        "pushforward deviation " + rat_to_string(worst_dev)));
  }
  return out;
}

// ---- monotonicity ---------------------------------------------------------

std::vector<CheckResult> suite_monotonicity(bool quick) {
  std::vector<CheckResult> out;
  CounterRng rng(404);
  auto germs = fixture_germs();
  const int trials = quick ? 8 : 30;

  double worst_mono = 0.0;   // most negative allowed slack observed
  double worst_bm = 0.0;     // largest positive second difference
  bool mono_pass = true, bm_pass = true, lam_pass = true;
  for (int t = 0; t < trials; ++t) {
    const auto& g = germs[t % germs.size()];
    MonomialValuation v = (t % 3 == 0 && g->dim() >= 2)
                              ? MonomialValuation::affine([&] {
                                  RatVec xi(g->dim());
                                  for (auto& x : xi) x = sampling::positive_rat(rng);
                                  return xi;
                                }())
                              : MonomialValuation::on_germ(g, interior_xi(*g, rng));
    const int n = v.dim();
    double tmax = v.dh_limit().finite_support() ? v.dh_limit().sup_support() : 3.0 * n;
    // vol/t^n non-increasing, exact on a log grid
    const int grid = quick ? 25 : 100;
    Rat prev_ratio = -1;
    for (int k = 0; k < grid; ++k) {
      double td = 1e-3 * std::pow(tmax / 1e-3, static_cast<double>(k) / (grid - 1));
      Rat tr = rat_from_double(td, 100000);
      if (tr <= 0) continue;
      Rat vol = v.vol_fn_limit(tr);
      Rat tn = 1;
      for (int i = 0; i < n; ++i) tn *= tr;
      Rat ratio = vol / tn;
      if (prev_ratio >= 0 && ratio > prev_ratio) {
        double slack = to_double(ratio - prev_ratio);
        worst_mono = std::max(worst_mono, slack);
        if (slack > 1e-12) mono_pass = false;
      }
      prev_ratio = ratio;
    }
    // lambda_min = 0: positive volume arbitrarily close to 0
    if (!(v.vol_fn_limit(Rat(1, 1000)) > 0)) lam_pass = false;
    // Brunn-Minkowski for n >= 2: (vol')^{1/(n-1)} concave on a grid
    if (n >= 2) {
      std::vector<double> ys;
      const int bgrid = 21;
      for (int k = 0; k < bgrid; ++k) {
        Rat tr = rat_from_double(0.05 + (0.9 * tmax - 0.05) * k / (bgrid - 1.0), 100000);
        ys.push_back(std::pow(to_double(v.vol_fn_derivative(tr)), 1.0 / (n - 1)));
      }
      for (int k = 1; k + 1 < bgrid; ++k) {
        double dd = ys[k + 1] - 2 * ys[k] + ys[k - 1];
        worst_bm = std::max(worst_bm, dd);
        if (dd > 1e-10 * std::max(1.0, std::fabs(ys[k]))) bm_pass = false;
      }
    }
  }
  out.push_back(check("vol_over_t_n_nonincreasing", mono_pass, worst_mono));
  out.push_back(check("brunn_minkowski_profile_concave", bm_pass, worst_bm));
  out.push_back(check("lambda_min_zero", lam_pass, lam_pass ? 0.0 : 1.0));

  // discrete -> limit volume convergence at O(1/m) rate
  {
    bool pass = true;
    double worst_ratio = 1.0;
    std::vector<MonomialValuation> vs = {
        MonomialValuation::on_germ(fixtures::make(fixtures::p1_spec()), rat_vec({1})),
        MonomialValuation::on_germ(fixtures::make(fixtures::p2_spec()), {Rat(1), Rat(2)}),
        MonomialValuation::affine(rat_vec({1, 1}))};
    for (const auto& v : vs) {
      double sup_prev = -1.0;
      for (long m : {8L, 16L, 32L, 64L}) {
        double sup = 0.0;
        for (int k = 1; k <= 40; ++k) {
          Rat tr = make_rat(k, 20);
          sup = std::max(sup, std::fabs(to_double(v.vol_fn_discrete(tr, m) - v.vol_fn_limit(tr))));
        }
        if (sup_prev > 0) {
          double ratio = sup / sup_prev;  // expect about 1/2 per doubling
          worst_ratio = ratio;
          if (ratio < 0.5 * 0.3 || ratio > 0.5 * 3.0) pass = false;
        }
        sup_prev = sup;
      }
    }
    out.push_back(check("vol_discrete_to_limit_rate", pass, worst_ratio));
  }
  return out;
}

// ---- bounds ---------------------------------------------------------------

std::vector<CheckResult> suite_bounds(bool quick) {
  std::vector<CheckResult> out;
  CounterRng rng(505);
  const int per_n = quick ? 30 : 200;

  // Weighted volume of normalized affine monomial valuations: minimized at
  // xi = (1,..,1) with value n! e^n; the infimum over valuations is the germ
  // weighted volume, which the n! e^n bound caps.
  double worst_min_gap = 0.0;  // most negative W/(n! e^n) - 1 over samples
  double worst_inf = 1e300;
  bool pass_min = true, pass_inf = true, pass_ones = true;
  for (int n = 1; n <= 4; ++n) {
    double ref = std::exp(n);
    for (int k = 2; k <= n; ++k) ref *= k;  // n! e^n
    MonomialValuation ones = MonomialValuation::affine(RatVec(n, Rat(1)));
    double w_ones = ones.weighted_vol();
    if (std::fabs(w_ones - ref) > 1e-9 * ref) pass_ones = false;
    double inf_w = w_ones;
    for (int s = 0; s < per_n; ++s) {
      RatVec xi(n);
      for (auto& x : xi) x = sampling::positive_rat(rng, 6);
      auto [a_star, norm] = MonomialValuation::affine(xi).normalize_scaling();
      double w = norm.weighted_vol();
      inf_w = std::min(inf_w, w);
      double gap = w / ref - 1.0;
      worst_min_gap = std::min(worst_min_gap, gap);
      if (gap < -1e-9) pass_min = false;
      // normalization bound A(v) <= n
      double a_norm = to_double(norm.a_value());
      if (a_norm > n + 1e-9) pass_min = false;
    }
    worst_inf = std::min(worst_inf, inf_w / ref);
    if (inf_w > ref * (1.0 + 1e-9)) pass_inf = false;
  }
  out.push_back(check("weighted_vol_min_at_ones", pass_min && pass_ones, worst_min_gap,
                      "normalized W >= n! e^n with equality at (1,..,1)"));
  out.push_back(check("germ_weighted_vol_bound", pass_inf, worst_inf,
                      "inf over normalized samples <= n! e^n"));

  // germ-toric normalization bound a_wt <= n
  {
    bool pass = true;
    double worst = -1e300;
    auto germs = fixture_germs();
    const int trials = quick ? 8 : 30;
    for (const auto& g : germs) {
      for (int s = 0; s < trials; ++s) {
        Vec xi = to_double(interior_xi(*g, rng));
        double a_star = g->normalize_scale(xi);
        Vec z(xi.size());
        for (size_t i = 0; i < xi.size(); ++i) z[i] = a_star * xi[i];
        bool closed = true;
        for (const RatVec& r : g->reeb_cone().recession_rays)
          if (dot(r, z) < 0) closed = false;
        if (!closed) continue;  // negative critical scale on a bounded germ
        double a = g->a_wt(z);
        worst = std::max(worst, a - g->dim());
        if (a > g->dim() + 1e-9) pass = false;
      }
    }
    out.push_back(check("normalized_a_wt_at_most_n", pass, worst));
  }

  // S^{(t)} bounds from the truncated lambda_max
  {
    bool pass = true;
    double worst = 0.0;
    auto g = fixtures::make(fixtures::p2_spec());
    const int trials = quick ? 5 : 20;
    for (int s = 0; s < trials; ++s) {
      GradedLevel level = level_from_germ(*g, 2 + static_cast<long>(rng.next_u64() % 3));
      RatVec xi0 = interior_xi(*g, rng);
      Filtration f0 = filtration_from_wt(level, xi0, g->a_wt(xi0));
      Filtration f = (rng.next_u64() & 1) ? sampling::random_monomial(level, rng)
                                          : sampling::random_flag(level, rng);
      double mu0 = to_double(g->a_wt(xi0));
      double t_cut = 1.0 + 2.0 * (s % 3);
      double lam, S;
      try {
        lam = lambda_max_truncated(f0, f, level, t_cut);
        S = s_weighted_m(f0, mu0, f, level, t_cut);
      } catch (const Error&) {
        continue;  // empty truncation window
      }
      int n = g->dim();
      // lower constant e^{-t}/(n+1): the exponential weights on x in [0,t]
      // lie in [e^{mu0-t}, e^{mu0}], which is exactly the slack between the
      // truncated volume and its e^{mu0-x}-weighted version
      double lower = std::exp(-t_cut) / (n + 1) * lam;
      if (S > lam + 1e-12 || S < lower - 1e-12) pass = false;
      worst = std::max(worst, std::max(S - lam, lower - S));
    }
    out.push_back(check("s_weighted_sandwich", pass, worst));
  }
  return out;
}

}  // namespace

bool known_suite(const std::string& suite) {
  return suite == "convexity" || suite == "monotonicity" || suite == "bounds" ||
         suite == "gradients" || suite == "oracle";
}

std::vector<CheckResult> run_verify_suite(const std::string& suite, bool quick) {
  if (suite == "gradients") return suite_gradients(quick);
  if (suite == "oracle") return suite_oracle(quick);
  if (suite == "convexity") return suite_convexity(quick);
  if (suite == "monotonicity") return suite_monotonicity(quick);
  if (suite == "bounds") return suite_bounds(quick);
  fail(ErrorKind::SpecInvalid, "unknown suite '" + suite + "'");
}

}  // namespace soliton
