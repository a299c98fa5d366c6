#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kleinian {

enum class ErrorCode {
  // projective_core
  EqualPoints,
  EqualLines,
  CenterOnLine,
  UndefinedAtCenter,
  CenterNotFixed,
  Inconclusive,
  Singular,
  // scalars
  FieldMismatch,
  ParseError,
  // toral_arithmetic
  NotUnimodular,
  NotHyperbolic,
  DecompositionDegenerate,
  IdentityViolation,
  // group_construction
  NonIntegralTranslation,
  SpecMismatch,
  ClosureViolation,
  NonCommuting,
  InvalidSpec,
  // recognition
  NoCommonFixedPair,
  NotFoundWithinBound,
  RankDeficient,
  NonDiscreteELat,
  CertificationFailed,
  // limit_set
  EmptyEnumeration,
  TooFewLines,
  CandidateOutsideLambda,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EqualPoints: return "EqualPoints";
    case ErrorCode::EqualLines: return "EqualLines";
    case ErrorCode::CenterOnLine: return "CenterOnLine";
    case ErrorCode::UndefinedAtCenter: return "UndefinedAtCenter";
    case ErrorCode::CenterNotFixed: return "CenterNotFixed";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::DecompositionDegenerate: return "DecompositionDegenerate";
    case ErrorCode::IdentityViolation: return "IdentityViolation";
    case ErrorCode::NonIntegralTranslation: return "NonIntegralTranslation";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::ClosureViolation: return "ClosureViolation";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NoCommonFixedPair: return "NoCommonFixedPair";
    case ErrorCode::NotFoundWithinBound: return "NotFoundWithinBound";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonDiscreteELat: return "NonDiscreteELat";
    case ErrorCode::CertificationFailed: return "CertificationFailed";
    case ErrorCode::EmptyEnumeration: return "EmptyEnumeration";
    case ErrorCode::TooFewLines: return "TooFewLines";
    case ErrorCode::CandidateOutsideLambda: return "CandidateOutsideLambda";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` is stable and is what callers
/// and the CLI dispatch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace kleinian
