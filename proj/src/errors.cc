#include "fairceptron/errors.h"

namespace fairceptron {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain:
      return "domain_error";
    case ErrorKind::kValidation:
      return "validation_error";
    case ErrorKind::kConflict:
      return "conflict";
    case ErrorKind::kNotFound:
      return "not_found";
    case ErrorKind::kUnauthorized:
      return "unauthorized";
    case ErrorKind::kUnavailable:
      return "service_unavailable";
    case ErrorKind::kLoad:
      return "load_error";
  }
  return "error";
}

}  // namespace fairceptron
