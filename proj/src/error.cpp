#include "hydro/error.hpp"

namespace hydro {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroLaneRate: return "ZeroLaneRate";
    case ErrorCode::NotWeaklyIrreducible: return "NotWeaklyIrreducible";
    case ErrorCode::NoReversibleMeasure: return "NoReversibleMeasure";
    case ErrorCode::ExponentTooSmall: return "ExponentTooSmall";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::DisjointWindows: return "DisjointWindows";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::ProfileOutOfRange: return "ProfileOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ModelInvalid: return "ModelInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace hydro
