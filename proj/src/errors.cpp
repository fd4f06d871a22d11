#include "hjive/errors.hpp"

namespace hjive {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DegenerateAggregation: return "DegenerateAggregation";
    case ErrorKind::ThetaTooSmall: return "ThetaTooSmall";
    case ErrorKind::BoundaryPoint: return "BoundaryPoint";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace hjive
