#pragma once

#include <stdexcept>
#include <string>

namespace mmlbn {

enum class ErrorCode {
  Io = 1,
  Format,
  MissingValue,
  DegenerateVariable,
  Argument,
  Cycle,
  ParentCap,
  NoArc,
  Capacity,
  ParameterCap,
  Convergence,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mmlbn
