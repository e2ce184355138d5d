#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace implquad {

enum class ErrorKind {
  Schema,
  Parse,
  EmptyData,
  OutOfRange,
  Argument,
  CannotEliminate,
  RankDeficiency,
  IncompleteData,
  Consistency,
  PlanExecution,
  Numeric,
  Domain,
  Provenance,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown when the basis stops having full row rank on the samples; carries the
// basis size at which that happened.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::size_t basis_count, const std::string& message)
      : Error(ErrorKind::RankDeficiency, message), basis_count_(basis_count) {}

  std::size_t basis_count() const noexcept { return basis_count_; }

 private:
  std::size_t basis_count_;
};

}  // namespace implquad
