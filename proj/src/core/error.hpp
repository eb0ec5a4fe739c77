#pragma once

#include <stdexcept>
#include <string>

namespace soliton {

enum class ErrorKind {
  InfeasibleSystem,
  UnsupportedDimension,
  DegenerateInput,
  UnboundedPolyhedron,
  Lineality,
  ReebViolation,
  UnboundedIntegral,
  SpecInvalid,
  NoConvergence,
  UnboundedLevel,
  NotEquivariant,
  ZeroIdeal,
  PipelineError,
  ParseError,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InfeasibleSystem: return "InfeasibleSystem";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::UnboundedPolyhedron: return "UnboundedPolyhedron";
    case ErrorKind::Lineality: return "Lineality";
    case ErrorKind::ReebViolation: return "ReebViolation";
    case ErrorKind::UnboundedIntegral: return "UnboundedIntegral";
    case ErrorKind::SpecInvalid: return "SpecInvalid";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnboundedLevel: return "UnboundedLevel";
    case ErrorKind::NotEquivariant: return "NotEquivariant";
    case ErrorKind::ZeroIdeal: return "ZeroIdeal";
    case ErrorKind::PipelineError: return "PipelineError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace soliton
