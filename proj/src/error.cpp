#include "hierent/error.hpp"

namespace hierent {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonUnimodular: return "NonUnimodular";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::AmplitudeTooLarge: return "AmplitudeTooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateCocycle: return "DegenerateCocycle";
    case ErrorKind::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::NotDominatedWithin: return "NotDominatedWithin";
    case ErrorKind::DispersionExceeded: return "DispersionExceeded";
    case ErrorKind::NotOnLeaf: return "NotOnLeaf";
    case ErrorKind::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorKind::PatchTooSmall: return "PatchTooSmall";
    case ErrorKind::NoPlateau: return "NoPlateau";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorKind::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorKind::NotVolumePreserving: return "NotVolumePreserving";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace hierent
