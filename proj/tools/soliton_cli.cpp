// soliton — batch CLI over the C API. Data goes to stdout (or --out),
// diagnostics to stderr. Exit codes: 0 ok, 1 verify failure, 2 invalid
// input, 3 no convergence, 4 Reeb violation, 5 pipeline type error,
// 10 internal error.

#include <CLI11.hpp>
#include <json.hpp>
#include <soliton/soliton.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

int exit_code(soliton_status s) {
  switch (s) {
    case SOLITON_OK: return 0;
    case SOLITON_ERR_NO_CONVERGENCE: return 3;
    case SOLITON_ERR_REEB_VIOLATION: return 4;
    case SOLITON_ERR_PIPELINE: return 5;
    case SOLITON_ERR_INTERNAL: return 10;
    default: return 2;
  }
}

[[noreturn]] void die(soliton_status s) {
  std::cerr << "error: " << soliton_last_error() << "\n";
  std::exit(exit_code(s));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read '" << path << "'\n";
    std::exit(2);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& data, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << data;
    if (!data.empty() && data.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    std::exit(2);
  }
  out << data;
  if (!data.empty() && data.back() != '\n') out << "\n";
}

std::string fmt(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest(const std::string& data) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

std::vector<double> parse_vector(const std::string& text, int dim) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (dim > 0 && static_cast<int>(v.size()) != dim) {
    std::cerr << "error: expected " << dim << " comma-separated coordinates, got '" << text << "'\n";
    std::exit(2);
  }
  return v;
}

struct GermHandle {
  soliton_germ* g = nullptr;
  explicit GermHandle(const std::string& json_text) {
    if (auto s = soliton_germ_from_json(json_text.c_str(), &g); s != SOLITON_OK) die(s);
  }
  ~GermHandle() { soliton_germ_free(g); }
  int dim() const { return soliton_germ_dim(g); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  soliton_string_free(s);
  return out;
}

int cmd_minimize(const std::string& file, double tol, int max_iters, std::uint64_t seed,
                 const std::string& out) {
  std::string text = slurp(file);
  GermHandle germ(text);
  std::vector<double> xi0(germ.dim());
  double h = 0, gn = 0, eig = 0;
  int iters = 0;
  if (auto s = soliton_minimize(germ.g, tol, max_iters, xi0.data(), &h, &gn, &eig, &iters);
      s != SOLITON_OK)
    die(s);
  std::ostringstream os;
  os << "{\"command\":\"minimize\",\"inputs_digest\":\"" << digest(text) << "\",\"outputs\":{";
  os << "\"xi0\":[";
  for (size_t i = 0; i < xi0.size(); ++i) os << (i ? "," : "") << fmt(xi0[i]);
  os << "],\"h_value\":" << fmt(h) << ",\"gradient_norm\":" << fmt(gn)
     << ",\"hessian_min_eig\":" << fmt(eig) << "},\"diagnostics\":{\"newton_iters\":" << iters
     << ",\"tol\":" << fmt(tol) << ",\"seed\":" << seed << "}}";
  emit(os.str(), out);
  return 0;
}

int cmd_h_curve(const std::string& file, const std::string& direction, const std::string& t_range,
                int points, const std::string& out) {
  std::string text = slurp(file);
  GermHandle germ(text);
  const int n = germ.dim();
  std::vector<double> eta = parse_vector(direction, n);
  double lo = 0, hi = 0;
  if (std::sscanf(t_range.c_str(), "%lf:%lf", &lo, &hi) != 2) {
    std::cerr << "error: --t-range expects lo:hi\n";
    return 2;
  }
  if (points < 2) {
    std::cerr << "error: --points must be at least 2\n";
    return 2;
  }
  std::vector<double> xi0(n);
  if (auto s = soliton_minimize(germ.g, 1e-8, 200, xi0.data(), nullptr, nullptr, nullptr, nullptr);
      s != SOLITON_OK)
    die(s);
  std::ostringstream os;
  os << "t,h\n";
  for (int k = 0; k < points; ++k) {
    double t = lo + (hi - lo) * k / (points - 1);
    std::vector<double> xi(n);
    for (int i = 0; i < n; ++i) xi[i] = xi0[i] + t * eta[i];
    double h = 0;
    if (auto s = soliton_h_eval(germ.g, xi.data(), &h); s != SOLITON_OK) die(s);
    os << fmt(t) << "," << fmt(h) << "\n";
  }
  emit(os.str(), out);
  return 0;
}

int cmd_dh(const std::string& file, const std::string& ms_text, bool with_limit, double t_max,
           const std::string& out, const std::string& json_out) {
  std::string text = slurp(file);
  std::vector<long> ms;
  if (!ms_text.empty()) {
    std::stringstream ss(ms_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) ms.push_back(std::stol(tok));
  }
  char* rec = nullptr;
  if (auto s = soliton_dh_profile_json(text.c_str(), ms.data(), static_cast<int>(ms.size()),
                                       with_limit ? 1 : 0, t_max, &rec);
      s != SOLITON_OK)
    die(s);
  std::string record = take(rec);
  if (!json_out.empty()) emit(record, json_out);
  // CSV view of the limit CDF (or of the largest-m discrete CDF)
  json j = json::parse(record);
  std::ostringstream os;
  os << "t,cdf\n";
  if (j["outputs"].contains("limit_cdf")) {
    for (const auto& row : j["outputs"]["limit_cdf"])
      os << fmt(row[0].get<double>()) << "," << fmt(row[1].get<double>()) << "\n";
  } else if (!j["outputs"]["discrete"].empty()) {
    const auto& atoms = j["outputs"]["discrete"].back()["atoms"];
    double acc = 0.0;
    for (const auto& a : atoms) {
      // atoms carry exact rationals; evaluate for the curve
      auto ratval = [](const json& x) {
        std::string s = x.get<std::string>();
        auto k = s.find('/');
        if (k == std::string::npos) return std::stod(s);
        return std::stod(s.substr(0, k)) / std::stod(s.substr(k + 1));
      };
      acc += ratval(a[1]);
      os << fmt(ratval(a[0])) << "," << fmt(acc) << "\n";
    }
  }
  emit(os.str(), out);
  return 0;
}

int cmd_filtration(const std::string& file, const std::string& out) {
  std::string text = slurp(file);
  char* rec = nullptr;
  if (auto s = soliton_pipeline_json(text.c_str(), &rec); s != SOLITON_OK) die(s);
  emit(take(rec), out);
  return 0;
}

int cmd_okounkov(const std::string& file, const std::string& out) {
  std::string text = slurp(file);
  char* rec = nullptr;
  if (auto s = soliton_okounkov_json(text.c_str(), &rec); s != SOLITON_OK) die(s);
  emit(take(rec), out);
  return 0;
}

int cmd_slope(const std::string& file, long m_max, double tol, const std::string& out) {
  std::string text = slurp(file);
  char* rec = nullptr;
  if (auto s = soliton_slope_json(text.c_str(), m_max, tol, &rec); s != SOLITON_OK) die(s);
  emit(take(rec), out);
  return 0;
}

int cmd_delta(const std::string& file, const std::string& xi0_text, double tol, int starts,
              const std::string& out) {
  std::string text = slurp(file);
  GermHandle germ(text);
  const int n = germ.dim();
  std::vector<double> xi0(n);
  if (xi0_text.empty()) {
    if (auto s = soliton_minimize(germ.g, 1e-8, 200, xi0.data(), nullptr, nullptr, nullptr, nullptr);
        s != SOLITON_OK)
      die(s);
  } else {
    xi0 = parse_vector(xi0_text, n);
  }
  double delta = 0;
  std::vector<double> argmin(n);
  if (auto s = soliton_delta_toric(germ.g, xi0.data(), tol, starts, &delta, argmin.data());
      s != SOLITON_OK)
    die(s);
  std::ostringstream os;
  os << "{\"command\":\"delta\",\"inputs_digest\":\"" << digest(text) << "\",\"outputs\":{";
  os << "\"delta\":" << fmt(delta) << ",\"argmin\":[";
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << fmt(argmin[i]);
  os << "],\"xi0\":[";
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << fmt(xi0[i]);
  os << "]},\"diagnostics\":{\"tol\":" << fmt(tol) << ",\"starts\":" << starts << "}}";
  emit(os.str(), out);
  return 0;
}

int cmd_verify(const std::string& suite, bool quick, const std::string& out) {
  char* rec = nullptr;
  if (auto s = soliton_verify_json(suite.c_str(), quick ? 1 : 0, &rec); s != SOLITON_OK) die(s);
  std::string record = take(rec);
  emit(record, out);
  json j = json::parse(record);
  bool pass = j["outputs"]["pass"].get<bool>();
  if (!pass) {
    for (const auto& c : j["outputs"]["checks"])
      if (!c["pass"].get<bool>())
        std::cerr << "verify: FAIL " << c["name"].get<std::string>() << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toric H-functional toolkit: soliton candidates, DH measures, filtrations"};
  app.require_subcommand(1);

  std::string file, out, json_out, direction, t_range = "-1:1", ms_text, xi0_text;
  double tol = 1e-8, tol_slope = 1e-6, tol_delta = 1e-6, t_max = 0;
  long m_max = 64;
  int max_iters = 200, points = 41, starts = 20;
  std::uint64_t seed = 0;
  bool with_limit = false, quick = false;

  auto* minimize = app.add_subcommand("minimize", "soliton candidate of a germ");
  minimize->add_option("germ", file)->required();
  minimize->add_option("--tol", tol);
  minimize->add_option("--max-iters", max_iters);
  minimize->add_option("--seed", seed);
  minimize->add_option("--out", out);

  auto* hcurve = app.add_subcommand("h-curve", "H along a ray through the soliton candidate");
  hcurve->add_option("germ", file)->required();
  hcurve->add_option("--direction", direction)->required();
  hcurve->add_option("--t-range", t_range);
  hcurve->add_option("--points", points);
  hcurve->add_option("--out", out);

  auto* dh = app.add_subcommand("dh", "discrete and limit DH measures of a toric valuation");
  dh->add_option("valuation", file)->required();
  dh->add_option("--m", ms_text);
  dh->add_flag("--limit", with_limit);
  dh->add_option("--t-max", t_max);
  dh->add_option("--out", out);
  dh->add_option("--json-out", json_out);

  auto* filt = app.add_subcommand("filtration", "run a filtration pipeline");
  filt->add_option("pipeline", file)->required();
  filt->add_option("--out", out);

  auto* ok = app.add_subcommand("okounkov", "Okounkov body and concave transform");
  ok->add_option("valuation", file)->required();
  ok->add_option("--out", out);

  auto* slope = app.add_subcommand("slope", "log canonical slope of an A^n monomial valuation");
  slope->add_option("valuation", file)->required();
  slope->add_option("--m-max", m_max);
  slope->add_option("--tol", tol_slope);
  slope->add_option("--out", out);

  auto* delta = app.add_subcommand("delta", "equivariant weighted delta invariant");
  delta->add_option("germ", file)->required();
  delta->add_option("--xi0", xi0_text);
  delta->add_option("--tol", tol_delta);
  delta->add_option("--starts", starts);
  delta->add_option("--out", out);

  auto* verify = app.add_subcommand("verify", "run a named property suite");
  verify->add_option("suite", file)->required();
  verify->add_flag("--quick", quick);
  verify->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  if (minimize->parsed()) return cmd_minimize(file, tol, max_iters, seed, out);
  if (hcurve->parsed()) return cmd_h_curve(file, direction, t_range, points, out);
  if (dh->parsed()) return cmd_dh(file, ms_text, with_limit, t_max, out, json_out);
  if (filt->parsed()) return cmd_filtration(file, out);
  if (ok->parsed()) return cmd_okounkov(file, out);
  if (slope->parsed()) return cmd_slope(file, m_max, tol_slope, out);
  if (delta->parsed()) return cmd_delta(file, xi0_text, tol_delta, starts, out);
  if (verify->parsed()) return cmd_verify(file, quick, out);
  return 2;
}
