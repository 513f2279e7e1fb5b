#ifndef FAIRCEPTRON_ERRORS_H_
#define FAIRCEPTRON_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fairceptron {

// Error categories map one-to-one onto HTTP status codes in the server and
// onto exit codes in the CLI.
enum class ErrorKind {
  kDomain,        // input outside an operation's mathematical domain
  kValidation,    // malformed or out-of-range input
  kConflict,      // state machine violation (order, duplicates)
  kNotFound,
  kUnauthorized,
  kUnavailable,
  kLoad,          // persisted file unreadable, wrong version or inconsistent
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorKind::kDomain, m) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m)
      : Error(ErrorKind::kValidation, m) {}
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& m)
      : Error(ErrorKind::kConflict, m) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& m)
      : Error(ErrorKind::kNotFound, m) {}
};

class UnauthorizedError : public Error {
 public:
  explicit UnauthorizedError(const std::string& m)
      : Error(ErrorKind::kUnauthorized, m) {}
};

class UnavailableError : public Error {
 public:
  explicit UnavailableError(const std::string& m)
      : Error(ErrorKind::kUnavailable, m) {}
};

class LoadError : public Error {
 public:
  explicit LoadError(const std::string& m) : Error(ErrorKind::kLoad, m) {}
};

}  // namespace fairceptron

#endif  // FAIRCEPTRON_ERRORS_H_
