#include "soliton/soliton.h"

#include <cstring>
#include <string>

#include "core/error.hpp"
#include "core/germ.hpp"
#include "core/json_io.hpp"
#include "core/valuation.hpp"

using namespace soliton;

struct soliton_germ {
  Germ impl;
  std::string spec_json;  // canonical echo
};

namespace {

thread_local std::string g_last_error;

soliton_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return SOLITON_ERR_PARSE;
    case ErrorKind::SpecInvalid: return SOLITON_ERR_SPEC_INVALID;
    case ErrorKind::ReebViolation: return SOLITON_ERR_REEB_VIOLATION;
    case ErrorKind::NoConvergence: return SOLITON_ERR_NO_CONVERGENCE;
    case ErrorKind::UnboundedPolyhedron:
    case ErrorKind::UnboundedIntegral:
    case ErrorKind::UnboundedLevel: return SOLITON_ERR_UNBOUNDED;
    case ErrorKind::InfeasibleSystem: return SOLITON_ERR_INFEASIBLE;
    case ErrorKind::UnsupportedDimension:
    case ErrorKind::DegenerateInput:
    case ErrorKind::Lineality:
    case ErrorKind::ZeroIdeal: return SOLITON_ERR_UNSUPPORTED;
    case ErrorKind::NotEquivariant:
    case ErrorKind::PipelineError: return SOLITON_ERR_PIPELINE;
    case ErrorKind::Internal: return SOLITON_ERR_INTERNAL;
  }
  return SOLITON_ERR_INTERNAL;
}

template <typename F>
soliton_status guarded(F&& f) {
  try {
    f();
    return SOLITON_OK;
  } catch (const Error& e) {
    g_last_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = std::string("Internal: ") + e.what();
    return SOLITON_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

soliton_status need(bool cond, const char* what) {
  if (cond) return SOLITON_OK;
  g_last_error = std::string("InvalidArgument: ") + what;
  return SOLITON_ERR_INVALID_ARGUMENT;
}

Vec vec_of(const soliton_germ* g, const double* xi) { return Vec(xi, xi + g->impl.dim()); }

}  // namespace

extern "C" {

const char* soliton_version(void) { return "1.0.0"; }

const char* soliton_last_error(void) { return g_last_error.c_str(); }

void soliton_string_free(char* s) { ::free(s); }

soliton_status soliton_germ_from_json(const char* json, soliton_germ** out) {
  if (auto s = need(json && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] {
    GermFile gf = parse_germ_json(json);
    auto* handle = new soliton_germ{Germ(gf.spec), {}};
    handle->spec_json = germ_to_jvalue(handle->impl.spec(), gf.cutoff).dump();
    *out = handle;
  });
}

void soliton_germ_free(soliton_germ* germ) { delete germ; }

int soliton_germ_dim(const soliton_germ* germ) { return germ ? germ->impl.dim() : 0; }

soliton_status soliton_germ_describe(const soliton_germ* germ, char** json_out) {
  if (auto s = need(germ && json_out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] {
    const Polyhedron& P = germ->impl.moment_polyhedron();
    auto vec_rows = [](const std::vector<RatVec>& rows) {
      JArray arr;
      for (const RatVec& r : rows) {
        JArray row;
        for (const Rat& x : r) row.push_back(JValue(x));
        arr.push_back(JValue(std::move(row)));
      }
      return arr;
    };
    JObject o{{"dim", JValue(germ->impl.dim())},
              {"vertices", JValue(vec_rows(P.vertices()))},
              {"recession_rays", JValue(vec_rows(P.rays()))},
              {"reeb_rays", JValue(vec_rows(germ->impl.reeb_cone().cone.rays))},
              {"reeb_lineality", JValue(vec_rows(germ->impl.reeb_cone().cone.lineality))},
              {"bounded", JValue(P.bounded())}};
    *json_out = dup_string(JValue(std::move(o)).dump());
  });
}

soliton_status soliton_germ_spec_json(const soliton_germ* germ, char** json_out) {
  if (auto s = need(germ && json_out, "null argument"); s != SOLITON_OK) return s;
  *json_out = dup_string(germ->spec_json);
  return SOLITON_OK;
}

soliton_status soliton_h_eval(const soliton_germ* germ, const double* xi, double* out) {
  if (auto s = need(germ && xi && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *out = germ->impl.h_eval(vec_of(germ, xi)); });
}

soliton_status soliton_grad_h(const soliton_germ* germ, const double* xi, double* out) {
  if (auto s = need(germ && xi && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] {
    Vec g = germ->impl.grad_h(vec_of(germ, xi));
    std::copy(g.begin(), g.end(), out);
  });
}

soliton_status soliton_a_wt(const soliton_germ* germ, const double* xi, double* out) {
  if (auto s = need(germ && xi && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *out = germ->impl.a_wt(vec_of(germ, xi)); });
}

soliton_status soliton_futaki(const soliton_germ* germ, const double* xi0, const double* eta,
                              double* out) {
  if (auto s = need(germ && xi0 && eta && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *out = germ->impl.futaki(vec_of(germ, xi0), vec_of(germ, eta)); });
}

soliton_status soliton_ding(const soliton_germ* germ, const double* xi0, const double* xi,
                            double* out) {
  if (auto s = need(germ && xi0 && xi && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *out = germ->impl.ding_invariant(vec_of(germ, xi0), vec_of(germ, xi)); });
}

soliton_status soliton_dh_cdf(const soliton_germ* germ, const double* xi, double t, double* out) {
  if (auto s = need(germ && xi && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *out = germ->impl.dh_cdf(vec_of(germ, xi), t); });
}

soliton_status soliton_normalize_scale(const soliton_germ* germ, const double* xi, double* out) {
  if (auto s = need(germ && xi && out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *out = germ->impl.normalize_scale(vec_of(germ, xi)); });
}

soliton_status soliton_minimize(const soliton_germ* germ, double tol, int max_iters, double* xi0,
                                double* h_value, double* gradient_norm, double* hessian_min_eig,
                                int* newton_iters) {
  if (auto s = need(germ && xi0, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] {
    SolitonCertificate cert = germ->impl.minimize_h(tol, max_iters);
    std::copy(cert.xi0.begin(), cert.xi0.end(), xi0);
    if (h_value) *h_value = cert.h_value;
    if (gradient_norm) *gradient_norm = cert.gradient_norm;
    if (hessian_min_eig) *hessian_min_eig = cert.hessian_min_eig;
    if (newton_iters) *newton_iters = cert.newton_iters;
  });
}

soliton_status soliton_delta_toric(const soliton_germ* germ, const double* xi0, double tol, int starts,
                                   double* delta, double* argmin) {
  if (auto s = need(germ && xi0 && delta, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] {
    DeltaResult r = germ->impl.delta_toric(vec_of(germ, xi0), tol, starts);
    *delta = r.delta;
    if (argmin) std::copy(r.argmin.begin(), r.argmin.end(), argmin);
  });
}

soliton_status soliton_affine_weighted_vol(int n, const double* xi, double* out) {
  if (auto s = need(n >= 1 && xi && out, "bad arguments"); s != SOLITON_OK) return s;
  return guarded([&] {
    *out = MonomialValuation::affine(Vec(xi, xi + n)).weighted_vol();
  });
}

soliton_status soliton_affine_normalize(int n, const double* xi, double* a_star, double* a_norm) {
  if (auto s = need(n >= 1 && xi && a_star, "bad arguments"); s != SOLITON_OK) return s;
  return guarded([&] {
    auto [a, v] = MonomialValuation::affine(Vec(xi, xi + n)).normalize_scaling();
    *a_star = a;
    if (a_norm) *a_norm = to_double(v.a_value());
  });
}

soliton_status soliton_lct_monomial(int n, int ngens, const long* exponents, char** lct_out) {
  if (auto s = need(n >= 1 && ngens >= 1 && exponents && lct_out, "bad arguments"); s != SOLITON_OK)
    return s;
  return guarded([&] {
    MonomialIdeal a;
    a.dim = n;
    for (int g = 0; g < ngens; ++g)
      a.generators.emplace_back(exponents + g * n, exponents + (g + 1) * n);
    *lct_out = dup_string(rat_to_string(lct_monomial(a)));
  });
}

soliton_status soliton_okounkov_json(const char* valuation_json, char** json_out) {
  if (auto s = need(valuation_json && json_out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *json_out = dup_string(okounkov_report(parse_valuation_json(valuation_json))); });
}

soliton_status soliton_slope_json(const char* valuation_json, long m_max, double tol,
                                  char** json_out) {
  if (auto s = need(valuation_json && json_out, "null argument"); s != SOLITON_OK) return s;
  return guarded(
      [&] { *json_out = dup_string(slope_report(parse_valuation_json(valuation_json), m_max, tol)); });
}

soliton_status soliton_dh_profile_json(const char* valuation_json, const long* ms, int n_ms,
                                       int with_limit, double t_max, char** json_out) {
  if (auto s = need(valuation_json && json_out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] {
    std::vector<long> degs(ms, ms + std::max(0, n_ms));
    *json_out =
        dup_string(dh_profile(parse_valuation_json(valuation_json), degs, with_limit != 0, t_max));
  });
}

soliton_status soliton_pipeline_json(const char* request_json, char** json_out) {
  if (auto s = need(request_json && json_out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *json_out = dup_string(run_pipeline(request_json)); });
}

soliton_status soliton_verify_json(const char* suite, int quick, char** json_out) {
  if (auto s = need(suite && json_out, "null argument"); s != SOLITON_OK) return s;
  return guarded([&] { *json_out = dup_string(verify_report(suite, quick != 0)); });
}

}  // extern "C"
