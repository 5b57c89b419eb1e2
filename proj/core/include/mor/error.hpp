#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mor {

enum class ErrorKind {
  SingularShift,
  SingularE,
  DimensionTooLarge,
  DimensionMismatch,
  RankDeficient,
  SingularPencil,
  NotConjugateClosed,
  RepeatedPoles,
  FamilyPole,
  DegenerateDenominator,
  DuplicatePoints,
  SingularEk,
  UnstableSystem,
  NonProper,
  NoStableDr,
  IrkaFailed,
  ParseError,
  InvalidInput,
};

std::string_view to_string(ErrorKind kind);

/// All library failures are reported through this exception; `kind()` lets
/// callers branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularShift: return "SingularShift";
    case ErrorKind::SingularE: return "SingularE";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::SingularPencil: return "SingularPencil";
    case ErrorKind::NotConjugateClosed: return "NotConjugateClosed";
    case ErrorKind::RepeatedPoles: return "RepeatedPoles";
    case ErrorKind::FamilyPole: return "FamilyPole";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::DuplicatePoints: return "DuplicatePoints";
    case ErrorKind::SingularEk: return "SingularEk";
    case ErrorKind::UnstableSystem: return "UnstableSystem";
    case ErrorKind::NonProper: return "NonProper";
    case ErrorKind::NoStableDr: return "NoStableDr";
    case ErrorKind::IrkaFailed: return "IrkaFailed";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace mor
