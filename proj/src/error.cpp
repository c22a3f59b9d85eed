#include "spacedec/error.h"

namespace spacedec {

const char* to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidInput: return "InvalidInput";
  case ErrorCode::RankDeficient: return "RankDeficient";
  case ErrorCode::ProjectionUndefined: return "ProjectionUndefined";
  case ErrorCode::InvalidTangent: return "InvalidTangent";
  case ErrorCode::EmptyManifold: return "EmptyManifold";
  case ErrorCode::CayleySingular: return "CayleySingular";
  case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  case ErrorCode::DegenerateGraphs: return "DegenerateGraphs";
  case ErrorCode::ObjectiveError: return "ObjectiveError";
  }
  return "Unknown";
}

} // namespace spacedec
