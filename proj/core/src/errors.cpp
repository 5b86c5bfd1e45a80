#include "accel/errors.hpp"

namespace accel {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::TooFarFromManifold: return "TooFarFromManifold";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ShapeInvalid: return "ShapeInvalid";
    case ErrorKind::AntipodalPoints: return "AntipodalPoints";
    case ErrorKind::SingularCrossProduct: return "SingularCrossProduct";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace accel
