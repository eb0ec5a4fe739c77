#pragma once

// Machine-readable I/O: germ-spec and pipeline JSON schemas (parsed with
// nlohmann), plus a small deterministic emitter of our own so that records
// serialize byte-identically (fixed field order, floats at 17 significant
// digits, exact rationals as "p/q" strings).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "germ.hpp"

namespace soliton {

class JValue;
using JArray = std::vector<JValue>;
using JObject = std::vector<std::pair<std::string, JValue>>;

class JValue {
 public:
  JValue() : v_(nullptr) {}
  JValue(std::nullptr_t) : v_(nullptr) {}
  JValue(bool b) : v_(b) {}
  JValue(int i) : v_(static_cast<std::int64_t>(i)) {}
  JValue(std::int64_t i) : v_(i) {}
  JValue(size_t i) : v_(static_cast<std::int64_t>(i)) {}
  JValue(double d) : v_(d) {}
  JValue(const char* s) : v_(std::string(s)) {}
  JValue(std::string s) : v_(std::move(s)) {}
  JValue(const Rat& q) : v_(rat_to_string(q)) {}
  JValue(JArray a) : v_(std::move(a)) {}
  JValue(JObject o) : v_(std::move(o)) {}

  std::string dump() const;

 private:
  std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, JArray, JObject> v_;
};

std::string format_double(double d);  // %.17g
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t x);

struct GermFile {
  GermSpec spec;
  std::optional<Rat> cutoff;
};

GermFile parse_germ_json(const std::string& text);
JValue germ_to_jvalue(const GermSpec& spec, const std::optional<Rat>& cutoff);

// Valuation input: {"germ": {...}, "xi": ["p/q",...]} or {"an": n, "xi": [...]}.
struct ValuationFile {
  std::shared_ptr<const Germ> germ;  // null for A^n
  int an = 0;
  RatVec xi;
  std::optional<Rat> cutoff;
};
ValuationFile parse_valuation_json(const std::string& text);

// Result records: {"command", "inputs_digest", "outputs", "diagnostics"}.
std::string result_record(const std::string& command, const std::string& input_digest_source,
                          JObject outputs, JObject diagnostics);

// Filtration pipeline interpreter (the `filtration` subcommand).
std::string run_pipeline(const std::string& request_json);

// Discrete vs limit DH profile for a toric or affine monomial valuation.
std::string dh_profile(const ValuationFile& vf, const std::vector<long>& ms, bool with_limit,
                       double t_max);

// Okounkov body report for a valuation file.
std::string okounkov_report(const ValuationFile& vf);

// Log canonical slope report for an A^n valuation file.
std::string slope_report(const ValuationFile& vf, long m_max, double tol);

std::string verify_report(const std::string& suite, bool quick);

}  // namespace soliton
