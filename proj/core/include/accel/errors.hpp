#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace accel {

enum class ErrorKind {
  RankDeficient,
  NonFinite,
  NotSymmetric,
  NotPositiveDefinite,
  TooFarFromManifold,
  DegenerateInput,
  ShapeMismatch,
  ShapeInvalid,
  AntipodalPoints,
  SingularCrossProduct,
  InvalidParams,
  ConfigInvalid,
  IOFailure,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace accel
