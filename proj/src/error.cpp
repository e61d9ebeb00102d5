#include "hapticaffect/error.hpp"

namespace hapticaffect {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Estimation: return "estimation";
    case ErrorKind::Io: return "io";
    case ErrorKind::Device: return "device";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::State: return "state";
    case ErrorKind::Aliasing: return "aliasing";
  }
  return "unknown";
}

const char* to_string(EstimationCause cause) noexcept {
  return cause == EstimationCause::Transport ? "transport" : "parse";
}

}  // namespace hapticaffect
