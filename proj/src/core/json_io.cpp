#include "json_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "filtration.hpp"
#include "valuation.hpp"
#include "verify.hpp"

namespace soliton {

namespace {

using nlohmann::json;

void dump_string(std::ostream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      case '\r': os << "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          os << buf;
        } else {
          os << c;
        }
    }
  }
  os << '"';
}

json parse_or_fail(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::ParseError, "malformed JSON input");
  return j;
}

Rat rat_field(const json& j, const std::string& what) {
  if (j.is_string()) return rat_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (j.is_number_float()) return rat_from_double(j.get<double>());
  fail(ErrorKind::ParseError, what + ": expected a rational as \"p/q\" or a number");
}

RatVec rat_vec_field(const json& j, const std::string& what) {
  if (!j.is_array()) fail(ErrorKind::ParseError, what + ": expected an array");
  RatVec v;
  for (const auto& x : j) v.push_back(rat_field(x, what));
  return v;
}

}  // namespace

std::string format_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string JValue::dump() const {
  std::ostringstream os;
  struct V {
    std::ostream& os;
    void operator()(std::nullptr_t) { os << "null"; }
    void operator()(bool b) { os << (b ? "true" : "false"); }
    void operator()(std::int64_t i) { os << i; }
    void operator()(double d) { os << format_double(d); }
    void operator()(const std::string& s) { dump_string(os, s); }
    void operator()(const JArray& a) {
      os << '[';
      for (size_t i = 0; i < a.size(); ++i) {
        if (i) os << ',';
        os << a[i].dump();
      }
      os << ']';
    }
    void operator()(const JObject& o) {
      os << '{';
      for (size_t i = 0; i < o.size(); ++i) {
        if (i) os << ',';
        dump_string(os, o[i].first);
        os << ':' << o[i].second.dump();
      }
      os << '}';
    }
  } v{os};
  std::visit(v, v_);
  return os.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

GermFile parse_germ_json(const std::string& text) {
  json j = parse_or_fail(text);
  if (!j.is_object()) fail(ErrorKind::ParseError, "germ file: expected an object");
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    fail(ErrorKind::ParseError, "germ file: schema_version must be 1");
  GermFile out;
  out.spec.dim = j.value("dim", 0);
  out.spec.label = j.value("label", std::string{});
  if (!j.contains("facets") || !j["facets"].is_array())
    fail(ErrorKind::ParseError, "germ file: missing facets array");
  for (const auto& f : j["facets"]) {
    GermFacet gf;
    if (!f.contains("normal")) fail(ErrorKind::ParseError, "facet without a normal");
    for (const auto& x : f["normal"]) {
      if (!x.is_number_integer()) fail(ErrorKind::ParseError, "facet normals must be integer vectors");
      gf.normal.emplace_back(x.get<long>());
    }
    if (!f.contains("discrepancy")) fail(ErrorKind::ParseError, "facet without a discrepancy");
    gf.discrepancy = rat_field(f["discrepancy"], "discrepancy");
    out.spec.facets.push_back(std::move(gf));
  }
  if (j.contains("cutoff")) out.cutoff = rat_field(j["cutoff"], "cutoff");
  return out;
}

JValue germ_to_jvalue(const GermSpec& spec, const std::optional<Rat>& cutoff) {
  JArray facets;
  for (const GermFacet& f : spec.facets) {
    JArray normal;
    for (const Rat& x : f.normal) normal.push_back(JValue(static_cast<std::int64_t>(x.get_num().get_si())));
    facets.push_back(JValue(JObject{{"normal", JValue(std::move(normal))},
                                    {"discrepancy", JValue(f.discrepancy)}}));
  }
  JObject o{{"schema_version", JValue(1)},
            {"label", JValue(spec.label)},
            {"dim", JValue(spec.dim)},
            {"facets", JValue(std::move(facets))}};
  if (cutoff) o.emplace_back("cutoff", JValue(*cutoff));
  return JValue(std::move(o));
}

ValuationFile parse_valuation_json(const std::string& text) {
  json j = parse_or_fail(text);
  if (!j.is_object()) fail(ErrorKind::ParseError, "valuation file: expected an object");
  ValuationFile out;
  if (j.contains("germ")) {
    GermFile gf = parse_germ_json(j["germ"].dump());
    out.germ = std::make_shared<Germ>(gf.spec);
    out.cutoff = gf.cutoff;
  } else if (j.contains("an")) {
    out.an = j["an"].get<int>();
  } else if (j.contains("schema_version") && j.contains("facets")) {
    GermFile gf = parse_germ_json(text);
    out.germ = std::make_shared<Germ>(gf.spec);
    out.cutoff = gf.cutoff;
  } else {
    fail(ErrorKind::ParseError, "valuation file: needs \"germ\" or \"an\"");
  }
  if (j.contains("xi")) out.xi = rat_vec_field(j["xi"], "xi");
  if (j.contains("cutoff")) out.cutoff = rat_field(j["cutoff"], "cutoff");
  return out;
}

std::string result_record(const std::string& command, const std::string& input_digest_source,
                          JObject outputs, JObject diagnostics) {
  JObject rec{{"command", JValue(command)},
              {"inputs_digest", JValue(hex64(fnv1a64(input_digest_source)))},
              {"outputs", JValue(std::move(outputs))},
              {"diagnostics", JValue(std::move(diagnostics))}};
  return JValue(std::move(rec)).dump();
}

namespace {

JValue atoms_to_jvalue(const AtomicMeasure& a) {
  JArray arr;
  for (const auto& [x, m] : a.atoms) arr.push_back(JValue(JArray{JValue(x), JValue(m)}));
  return JValue(std::move(arr));
}

JValue atoms_to_jvalue(const BivariateMeasure& a) {
  JArray arr;
  for (const auto& [x, y, m] : a.atoms)
    arr.push_back(JValue(JArray{JValue(x), JValue(y), JValue(m)}));
  return JValue(std::move(arr));
}

JValue filtration_to_jvalue(const Filtration& f, const GradedLevel& level) {
  if (f.kind() == Filtration::Kind::Monomial) {
    JArray vals;
    for (const Rat& v : f.values()) vals.push_back(JValue(v));
    return JValue(JObject{{"kind", JValue("monomial")}, {"values", JValue(std::move(vals))}});
  }
  JArray jumps;
  for (const FlagJump& j : f.jumps())
    jumps.push_back(JValue(JObject{{"lambda", JValue(j.lambda)},
                                   {"rank", JValue(static_cast<std::int64_t>(rat_rank(j.generators)))}}));
  JArray minima;
  for (const auto& [lam, mult] : successive_minima(f, level))
    minima.push_back(JValue(JArray{JValue(lam), JValue(mult)}));
  return JValue(JObject{{"kind", JValue("flag")},
                        {"jumps", JValue(std::move(jumps))},
                        {"successive_minima", JValue(std::move(minima))}});
}

Filtration parse_filtration(const json& j, const GradedLevel& level, const Germ* germ) {
  if (!j.is_object() || !j.contains("kind"))
    fail(ErrorKind::PipelineError, "filtration needs a kind");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "wt") {
    RatVec xi = rat_vec_field(j.at("xi"), "wt filtration xi");
    if (!germ) fail(ErrorKind::PipelineError, "wt filtrations need a germ-backed level");
    return filtration_from_wt(level, xi, germ->a_wt(xi));
  }
  if (kind == "trivial") return trivial_filtration(level);
  if (kind == "monomial") {
    RatVec vals = rat_vec_field(j.at("values"), "monomial filtration values");
    if (vals.size() != level.dim())
      fail(ErrorKind::PipelineError, "monomial filtration size does not match the level");
    std::vector<Rat> v(vals.begin(), vals.end());
    return Filtration::monomial(std::move(v));
  }
  if (kind == "flag") {
    std::vector<FlagJump> jumps;
    for (const auto& jj : j.at("jumps")) {
      FlagJump fj;
      fj.lambda = rat_field(jj.at("lambda"), "flag jump lambda");
      for (const auto& row : jj.at("generators")) fj.generators.push_back(rat_vec_field(row, "flag row"));
      jumps.push_back(std::move(fj));
    }
    return Filtration::flag(std::move(jumps), level.dim());
  }
  fail(ErrorKind::PipelineError, "unknown filtration kind '" + kind + "'");
}

}  // namespace

std::string run_pipeline(const std::string& request_json) {
  json j = parse_or_fail(request_json);
  if (!j.is_object() || !j.contains("level"))
    fail(ErrorKind::PipelineError, "pipeline file: missing level");
  const json& jl = j["level"];
  std::shared_ptr<const Germ> germ;
  GradedLevel level;
  if (jl.contains("germ")) {
    GermFile gf = parse_germ_json(jl["germ"].dump());
    germ = std::make_shared<Germ>(gf.spec);
    long m = jl.value("m", 1L);
    std::optional<Rat> cutoff = gf.cutoff;
    if (jl.contains("cutoff")) cutoff = rat_field(jl["cutoff"], "cutoff");
    level = level_from_germ(*germ, m, cutoff);
  } else {
    level.n = jl.value("n", 0);
    level.m = jl.value("m", 1L);
    if (level.n < 1 || level.m < 1)
      fail(ErrorKind::PipelineError, "explicit level needs n >= 1 and m >= 1");
    if (!jl.contains("basis")) fail(ErrorKind::PipelineError, "explicit level needs a basis");
    for (const auto& row : jl["basis"]) {
      std::vector<long> pt;
      for (const auto& x : row) pt.push_back(x.get<long>());
      if (static_cast<int>(pt.size()) != level.n)
        fail(ErrorKind::PipelineError, "basis point width does not match n");
      level.basis.push_back(std::move(pt));
    }
    std::vector<std::vector<long>> dedup = level.basis;
    std::sort(dedup.begin(), dedup.end());
    if (std::adjacent_find(dedup.begin(), dedup.end()) != dedup.end())
      fail(ErrorKind::PipelineError, "basis points must be distinct");
  }
  bool strict = j.value("strict", false);

  std::map<std::string, Filtration> env;
  if (j.contains("filtrations"))
    for (auto it = j["filtrations"].begin(); it != j["filtrations"].end(); ++it)
      env.emplace(it.key(), parse_filtration(it.value(), level, germ.get()));

  auto get = [&](const json& step, const char* key) -> const Filtration& {
    std::string name = step.at(key).get<std::string>();
    auto it = env.find(name);
    if (it == env.end()) fail(ErrorKind::PipelineError, "unknown filtration '" + name + "'");
    return it->second;
  };

  JArray steps_out;
  if (j.contains("pipeline")) {
    for (const auto& step : j["pipeline"]) {
      std::string op = step.at("op").get<std::string>();
      JObject so{{"op", JValue(op)}};
      if (op == "echo") {
        so.emplace_back("filtration", filtration_to_jvalue(get(step, "f"), level));
      } else if (op == "successive_minima") {
        JArray arr;
        for (const auto& [lam, mult] : successive_minima(get(step, "f"), level))
          arr.push_back(JValue(JArray{JValue(lam), JValue(mult)}));
        so.emplace_back("minima", JValue(std::move(arr)));
      } else if (op == "rescale" || op == "shift" || op == "twist") {
        Filtration f = get(step, "f");
        Filtration r = f;
        if (op == "rescale") r = f.rescale(rat_field(step.at("a"), "a"));
        if (op == "shift") r = f.shift(rat_field(step.at("b"), "b"), level.m);
        if (op == "twist") r = twist(f, level, rat_vec_field(step.at("xi"), "xi"));
        so.emplace_back("filtration", filtration_to_jvalue(r, level));
        if (step.contains("store")) env.insert_or_assign(step["store"].get<std::string>(), std::move(r));
      } else if (op == "geodesic") {
        Filtration r = geodesic(get(step, "f0"), get(step, "f1"), level, rat_field(step.at("t"), "t"));
        so.emplace_back("filtration", filtration_to_jvalue(r, level));
        if (step.contains("store")) env.insert_or_assign(step["store"].get<std::string>(), std::move(r));
      } else if (op == "dh_discrete") {
        so.emplace_back("atoms", atoms_to_jvalue(dh_discrete(get(step, "f"), level)));
      } else if (op == "dh_bivariate") {
        so.emplace_back("atoms", atoms_to_jvalue(dh_bivariate(get(step, "f0"), get(step, "f1"), level)));
      } else if (op == "geodesic_dh_check") {
        GeodesicDhCheck c =
            geodesic_dh_identity(get(step, "f0"), get(step, "f1"), level, rat_field(step.at("t"), "t"));
        so.emplace_back("ok", JValue(c.ok));
        so.emplace_back("deviation", JValue(c.deviation));
      } else if (op == "s_tilde") {
        double mu = to_double(rat_field(step.at("mu"), "mu"));
        so.emplace_back("s_tilde", JValue(s_tilde_m(get(step, "f"), level)));
        so.emplace_back("h_m", JValue(h_m(get(step, "f"), level, mu)));
      } else if (op == "s_weighted") {
        double mu0 = to_double(rat_field(step.at("mu0"), "mu0"));
        double t_cut = step.value("t_cut", 1e30);
        so.emplace_back("s_weighted",
                        JValue(s_weighted_m(get(step, "f0"), mu0, get(step, "f"), level, t_cut)));
      } else {
        fail(ErrorKind::PipelineError, "unknown pipeline op '" + op + "'");
      }
      steps_out.push_back(JValue(std::move(so)));
    }
  }

  // multiplicativity spot-check across two degrees of the same germ
  std::optional<std::string> warning;
  if (germ && j.value("spot_check_multiplicativity", false)) {
    RatVec xi(level.n, Rat(1));
    if (germ->reeb_cone().contains_closed(xi)) {
      GradedLevel la = level, lab;
      try {
        lab = level_from_germ(*germ, 2 * level.m,
                              level.cutoff ? std::optional<Rat>(*level.cutoff * 2) : std::nullopt);
        Filtration fa = filtration_from_wt(la, xi, germ->a_wt(xi));
        Filtration fab = filtration_from_wt(lab, xi, germ->a_wt(xi));
        warning = multiplicativity_spot_check(la, fa, la, fa, lab, fab);
      } catch (const Error&) {
      }
    }
    if (warning && strict) fail(ErrorKind::PipelineError, *warning);
  }

  JObject outputs{{"level_dim", JValue(level.dim())}, {"steps", JValue(std::move(steps_out))}};
  if (warning) outputs.emplace_back("warning", JValue(*warning));
  JObject diag{{"m", JValue(level.m)}, {"n", JValue(level.n)}};
  if (level.cutoff) diag.emplace_back("cutoff", JValue(*level.cutoff));
  return result_record("filtration", request_json, std::move(outputs), std::move(diag));
}

std::string dh_profile(const ValuationFile& vf, const std::vector<long>& ms, bool with_limit,
                       double t_max) {
  JObject outputs;
  JObject diag;
  std::shared_ptr<const Germ> germ = vf.germ;
  MonomialValuation v =
      germ ? MonomialValuation::on_germ(germ, vf.xi) : MonomialValuation::affine(vf.xi);
  bool unbounded = germ ? !germ->moment_polyhedron().bounded() : true;
  if (unbounded && t_max <= 0)
    fail(ErrorKind::SpecInvalid, "unbounded germs need --t-max for DH profiles");
  double tm = t_max > 0 ? t_max : v.dh_limit().sup_support();
  diag.emplace_back("t_max", JValue(tm));

  JArray per_m;
  JArray gaps;
  for (long m : ms) {
    AtomicMeasure atoms;
    if (germ) {
      std::optional<Rat> cutoff;
      if (unbounded) cutoff = vf.cutoff ? *vf.cutoff : rat_from_double(tm) + 1;
      GradedLevel level = level_from_germ(*germ, m, cutoff);
      atoms = dh_discrete(filtration_from_wt(level, vf.xi, germ->a_wt(vf.xi)), level);
    } else {
      // affine valuation: atoms at <gamma,xi>/m over gamma with value < m*t_max
      std::map<Rat, long> counts;
      Rat bound = rat_from_double(tm) * Rat(m);
      auto walk = [&](auto&& self, int k, const Rat& part) -> void {
        if (part >= bound) return;
        if (k == v.dim()) {
          counts[part] += 1;
          return;
        }
        for (long i = 0;; ++i) {
          Rat p = part + Rat(i) * v.weights()[k];
          if (p >= bound) break;
          self(self, k + 1, p);
        }
      };
      walk(walk, 0, Rat(0));
      GradedLevel shape;
      shape.n = v.dim();
      shape.m = m;
      Rat unit = shape.mass_unit();
      for (const auto& [val, cnt] : counts) atoms.atoms.emplace_back(val / Rat(m), Rat(cnt) * unit);
    }
    // sup-norm gap against the limit CDF over the atom locations
    double gap = 0.0;
    double acc = 0.0;
    for (const auto& [x, mass] : atoms.atoms) {
      if (to_double(x) > tm) break;
      double lim_here = v.vol_fn_limit(to_double(x));
      gap = std::max(gap, std::fabs(acc - lim_here));  // just below the atom
      acc += to_double(mass);
      gap = std::max(gap, std::fabs(acc - lim_here));  // at the atom
    }
    JArray arr;
    for (const auto& [x, mass] : atoms.atoms)
      arr.push_back(JValue(JArray{JValue(x), JValue(mass)}));
    per_m.push_back(JValue(JObject{{"m", JValue(m)}, {"atoms", JValue(std::move(arr))}}));
    gaps.push_back(JValue(JObject{{"m", JValue(m)}, {"sup_gap", JValue(gap)}}));
  }
  outputs.emplace_back("discrete", JValue(std::move(per_m)));
  if (with_limit) {
    JArray curve;
    const int pts = 101;
    for (int k = 0; k < pts; ++k) {
      double t = tm * k / (pts - 1.0);
      curve.push_back(JValue(JArray{JValue(t), JValue(v.vol_fn_limit(t))}));
    }
    outputs.emplace_back("limit_cdf", JValue(std::move(curve)));
  }
  outputs.emplace_back("convergence", JValue(std::move(gaps)));
  std::string digest_src = "dh";
  for (const Rat& x : vf.xi) digest_src += ":" + rat_to_string(x);
  return result_record("dh", digest_src, std::move(outputs), std::move(diag));
}

std::string okounkov_report(const ValuationFile& vf) {
  MonomialValuation v =
      vf.germ ? MonomialValuation::on_germ(vf.germ, vf.xi) : MonomialValuation::affine(vf.xi);
  const OkounkovData& ok = v.okounkov();
  JArray verts, rays, slope;
  for (const RatVec& p : ok.body.vertices()) {
    JArray row;
    for (const Rat& x : p) row.push_back(JValue(x));
    verts.push_back(JValue(std::move(row)));
  }
  for (const RatVec& p : ok.body.rays()) {
    JArray row;
    for (const Rat& x : p) row.push_back(JValue(x));
    rays.push_back(JValue(std::move(row)));
  }
  for (const Rat& x : ok.slope) slope.push_back(JValue(x));
  JObject outputs{{"vertices", JValue(std::move(verts))},
                  {"rays", JValue(std::move(rays))},
                  {"concave_transform",
                   JValue(JObject{{"slope", JValue(std::move(slope))}, {"constant", JValue(ok.constant)}})},
                  {"a_value", JValue(v.a_value())}};
  std::string digest_src = "okounkov";
  for (const Rat& x : vf.xi) digest_src += ":" + rat_to_string(x);
  return result_record("okounkov", digest_src, std::move(outputs), JObject{});
}

std::string slope_report(const ValuationFile& vf, long m_max, double tol) {
  if (vf.germ) fail(ErrorKind::SpecInvalid, "log canonical slopes are computed on A^n germs");
  MonomialValuation v = MonomialValuation::affine(vf.xi);
  double mu = lc_slope_monomial(v, m_max, tol);
  JObject outputs{{"mu", JValue(mu)},
                  {"a_value", JValue(v.a_value())},
                  {"h_local", JValue(h_local(v, m_max, tol))},
                  {"weighted_vol", JValue(v.weighted_vol())}};
  JObject diag{{"m_max", JValue(m_max)}, {"tol", JValue(tol)}};
  std::string digest_src = "slope";
  for (const Rat& x : vf.xi) digest_src += ":" + rat_to_string(x);
  return result_record("slope", digest_src, std::move(outputs), std::move(diag));
}

std::string verify_report(const std::string& suite, bool quick) {
  std::vector<CheckResult> res = run_verify_suite(suite, quick);
  JArray checks;
  bool all = true;
  for (const CheckResult& c : res) {
    all = all && c.pass;
    JObject o{{"name", JValue(c.name)}, {"pass", JValue(c.pass)}, {"worst_slack", JValue(c.worst)}};
    if (!c.detail.empty()) o.emplace_back("detail", JValue(c.detail));
    checks.push_back(JValue(std::move(o)));
  }
  JObject outputs{{"suite", JValue(suite)}, {"pass", JValue(all)}, {"checks", JValue(std::move(checks))}};
  return result_record("verify", suite + (quick ? ":quick" : ""), std::move(outputs),
                       JObject{{"quick", JValue(quick)}});
}

}  // namespace soliton
