#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gnslab {

enum class Errc {
  InvalidArgument,
  NotHermitian,
  NonFinite,
  LinearlyDependent,
  RankDeficient,
  SpectrumAtMinusOne,
  ShapeMismatch,
  AlgebraMismatch,
  ZeroVector,
  NotNormalized,
  OrthogonalRay,
  DimensionMismatch,
  DifferentSectors,
  NotMultiplicative,
  NotBlockPreserving,
  Antipodal,
  SectorMismatch,
  NotOrthonormal,
  NoSelfAdjointSolution,
  NoUnitarySolution,
  BranchCut,
  TooFar,
  VanishingLink,
  CurvatureSaturated,
  UncoveredPoint,
  SiteMismatch,
  SupportOutsideLattice,
  TooLarge,
  BrokenDivisibilityChain,
  NotDivisible,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NonFinite: return "NonFinite";
    case Errc::LinearlyDependent: return "LinearlyDependent";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::SpectrumAtMinusOne: return "SpectrumAtMinusOne";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::AlgebraMismatch: return "AlgebraMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::OrthogonalRay: return "OrthogonalRay";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DifferentSectors: return "DifferentSectors";
    case Errc::NotMultiplicative: return "NotMultiplicative";
    case Errc::NotBlockPreserving: return "NotBlockPreserving";
    case Errc::Antipodal: return "Antipodal";
    case Errc::SectorMismatch: return "SectorMismatch";
    case Errc::NotOrthonormal: return "NotOrthonormal";
    case Errc::NoSelfAdjointSolution: return "NoSelfAdjointSolution";
    case Errc::NoUnitarySolution: return "NoUnitarySolution";
    case Errc::BranchCut: return "BranchCut";
    case Errc::TooFar: return "TooFar";
    case Errc::VanishingLink: return "VanishingLink";
    case Errc::CurvatureSaturated: return "CurvatureSaturated";
    case Errc::UncoveredPoint: return "UncoveredPoint";
    case Errc::SiteMismatch: return "SiteMismatch";
    case Errc::SupportOutsideLattice: return "SupportOutsideLattice";
    case Errc::TooLarge: return "TooLarge";
    case Errc::BrokenDivisibilityChain: return "BrokenDivisibilityChain";
    case Errc::NotDivisible: return "NotDivisible";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
/// `index` names the offending input position where that is meaningful
/// (e.g. the vector that made Gram-Schmidt fail), `value` carries a
/// diagnostic number such as the residual that tripped a check.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt,
        std::optional<double> value = std::nullopt)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        index_(index),
        value_(value) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  std::optional<double> value() const noexcept { return value_; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
  std::optional<double> value_;
};

}  // namespace gnslab
