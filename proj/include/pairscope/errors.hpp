#pragma once

#include <stdexcept>
#include <string>

namespace pairscope {

// Error taxonomy shared by the library, the C API and the CLI exit codes:
// validation errors mean the inputs violate a model precondition, numerical
// errors mean a computation could not be carried out at the requested point.
enum class ErrorKind {
  validation,
  numerical,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

inline Error validation_error(const std::string& name, const std::string& what) {
  return Error(ErrorKind::validation, name, what);
}
inline Error numerical_error(const std::string& name, const std::string& what) {
  return Error(ErrorKind::numerical, name, what);
}
inline Error io_error(const std::string& what) {
  return Error(ErrorKind::io, "IO_ERROR", what);
}

}  // namespace pairscope
