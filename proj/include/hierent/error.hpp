#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hierent {

enum class ErrorKind {
  NonUnimodular,
  NotHyperbolic,
  AmplitudeTooLarge,
  DimensionMismatch,
  DegenerateCocycle,
  LevelOutOfRange,
  NonConvergent,
  Singular,
  PreconditionViolated,
  NotDominatedWithin,
  DispersionExceeded,
  NotOnLeaf,
  EpsilonTooLarge,
  PatchTooSmall,
  NoPlateau,
  ResolutionTooCoarse,
  MeshTooCoarse,
  NotVolumePreserving,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline void require(bool condition, ErrorKind kind, const std::string& detail) {
  if (!condition) throw Error(kind, detail);
}

}  // namespace hierent
