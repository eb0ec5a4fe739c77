// End-to-end exercise of the extern "C" surface, the same way the CLI (or
// any foreign-language binding) drives it.

#include <doctest.h>
#include <soliton/soliton.h>

#include <cmath>
#include <string>
#include <vector>

namespace {

const char* kP1 = R"({"schema_version":1,"label":"p1","dim":1,
  "facets":[{"normal":[1],"discrepancy":"1"},{"normal":[-1],"discrepancy":"1"}]})";

const char* kF1 = R"({"schema_version":1,"label":"f1","dim":2,
  "facets":[{"normal":[1,0],"discrepancy":"1"},{"normal":[0,1],"discrepancy":"1"},
            {"normal":[-1,1],"discrepancy":"1"},{"normal":[0,-1],"discrepancy":"1"}]})";

std::string take(char* s) {
  std::string out = s ? s : "";
  soliton_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("germ lifecycle and scalar calls") {
  soliton_germ* g = nullptr;
  REQUIRE(soliton_germ_from_json(kP1, &g) == SOLITON_OK);
  CHECK(soliton_germ_dim(g) == 1);

  double h = 0;
  double xi = 0.0;
  CHECK(soliton_h_eval(g, &xi, &h) == SOLITON_OK);
  CHECK(std::exp(h) == doctest::Approx(2.0).epsilon(1e-12));

  double a = 0;
  double one = 1.0;
  CHECK(soliton_a_wt(g, &one, &a) == SOLITON_OK);
  CHECK(a == doctest::Approx(1.0));

  double fut = 0;
  CHECK(soliton_futaki(g, &one, &one, &fut) == SOLITON_OK);
  CHECK(fut == doctest::Approx(1.0 / std::tanh(1.0) - 1.0).epsilon(1e-10));

  double cdf = 0;
  CHECK(soliton_dh_cdf(g, &one, 2.0, &cdf) == SOLITON_OK);
  CHECK(cdf == doctest::Approx(2.0).epsilon(1e-12));

  char* desc = nullptr;
  CHECK(soliton_germ_describe(g, &desc) == SOLITON_OK);
  std::string d = take(desc);
  CHECK(d.find("\"bounded\":true") != std::string::npos);

  char* spec = nullptr;
  CHECK(soliton_germ_spec_json(g, &spec) == SOLITON_OK);
  std::string echoed = take(spec);
  soliton_germ* g2 = nullptr;
  REQUIRE(soliton_germ_from_json(echoed.c_str(), &g2) == SOLITON_OK);
  CHECK(soliton_germ_dim(g2) == 1);
  soliton_germ_free(g2);
  soliton_germ_free(g);
}

TEST_CASE("status codes carry messages") {
  soliton_germ* g = nullptr;
  CHECK(soliton_germ_from_json("{not json", &g) == SOLITON_ERR_PARSE);
  CHECK(std::string(soliton_last_error()).size() > 0);
  const char* bad = R"({"schema_version":1,"label":"x","dim":1,
    "facets":[{"normal":[1],"discrepancy":"0"},{"normal":[-1],"discrepancy":"1"}]})";
  CHECK(soliton_germ_from_json(bad, &g) == SOLITON_ERR_SPEC_INVALID);
  CHECK(std::string(soliton_last_error()).find("facet #0") != std::string::npos);

  soliton_germ* ok = nullptr;
  REQUIRE(soliton_germ_from_json(kP1, &ok) == SOLITON_OK);
  double out = 0;
  // xi = 0 is fine for bounded germs; reeb violations appear on unbounded data
  const char* a2 = R"({"schema_version":1,"label":"a2","dim":2,
    "facets":[{"normal":[1,0],"discrepancy":"1"},{"normal":[0,1],"discrepancy":"1"}]})";
  soliton_germ* ga = nullptr;
  REQUIRE(soliton_germ_from_json(a2, &ga) == SOLITON_OK);
  double bad_xi[2] = {1.0, -1.0};
  CHECK(soliton_h_eval(ga, bad_xi, &out) == SOLITON_ERR_REEB_VIOLATION);
  soliton_germ_free(ga);
  soliton_germ_free(ok);
}

TEST_CASE("minimize and delta through the C API") {
  soliton_germ* g = nullptr;
  REQUIRE(soliton_germ_from_json(kF1, &g) == SOLITON_OK);
  std::vector<double> xi0(2);
  double h = 0, gn = 0, eig = 0;
  int iters = 0;
  REQUIRE(soliton_minimize(g, 1e-9, 300, xi0.data(), &h, &gn, &eig, &iters) == SOLITON_OK);
  CHECK(gn <= 1e-9);
  CHECK(eig > 0);
  double delta = 0;
  std::vector<double> argmin(2);
  REQUIRE(soliton_delta_toric(g, xi0.data(), 1e-6, 20, &delta, argmin.data()) == SOLITON_OK);
  CHECK(delta == doctest::Approx(1.0).epsilon(1e-4));
  soliton_germ_free(g);
}

TEST_CASE("affine helpers") {
  double xi[2] = {1.0, 1.0};
  double w = 0;
  REQUIRE(soliton_affine_weighted_vol(2, xi, &w) == SOLITON_OK);
  CHECK(w == doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-10));
  double xi2[2] = {2.0, 2.0};
  double astar = 0, anorm = 0;
  REQUIRE(soliton_affine_normalize(2, xi2, &astar, &anorm) == SOLITON_OK);
  CHECK(astar == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(anorm == doctest::Approx(2.0).epsilon(1e-9));
  long exps[4] = {2, 0, 0, 3};
  char* lct = nullptr;
  REQUIRE(soliton_lct_monomial(2, 2, exps, &lct) == SOLITON_OK);
  CHECK(take(lct) == "5/6");
}

TEST_CASE("json command surface") {
  const char* val = R"({"an":2,"xi":["1","2"]})";
  char* rec = nullptr;
  REQUIRE(soliton_okounkov_json(val, &rec) == SOLITON_OK);
  std::string ok = take(rec);
  CHECK(ok.find("\"command\":\"okounkov\"") != std::string::npos);
  REQUIRE(soliton_slope_json(val, 64, 1e-6, &rec) == SOLITON_OK);
  std::string slope = take(rec);
  CHECK(slope.find("\"mu\":3") != std::string::npos);

  long ms[2] = {2, 4};
  const char* vp1 = R"({"germ":{"schema_version":1,"label":"p1","dim":1,
    "facets":[{"normal":[1],"discrepancy":"1"},{"normal":[-1],"discrepancy":"1"}]},"xi":["1"]})";
  REQUIRE(soliton_dh_profile_json(vp1, ms, 2, 1, 0.0, &rec) == SOLITON_OK);
  std::string dh = take(rec);
  CHECK(dh.find("\"convergence\"") != std::string::npos);

  REQUIRE(soliton_verify_json("bounds", 1, &rec) == SOLITON_OK);
  std::string ver = take(rec);
  CHECK(ver.find("\"pass\":true") != std::string::npos);

  CHECK(soliton_verify_json("not-a-suite", 1, &rec) == SOLITON_ERR_SPEC_INVALID);
}
