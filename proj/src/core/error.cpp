#include "mathprep/error.hpp"

namespace mathprep {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Format: return "format";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Conflict: return "conflict";
    case ErrorCode::Reference: return "reference";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Config: return "config";
    case ErrorCode::Contract: return "contract";
    case ErrorCode::Dispatch: return "dispatch";
    case ErrorCode::Generation: return "generation";
    case ErrorCode::Simulation: return "simulation";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Io: return "io";
    case ErrorCode::Version: return "version";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::Backend: return "backend";
  }
  return "unknown";
}

}  // namespace mathprep
