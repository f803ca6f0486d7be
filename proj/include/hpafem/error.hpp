#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpafem {

enum class ErrorKind {
  ConfigurationMismatch,
  InvalidPartition,
  LevelOverflow,
  InputFunction,
  UnsupportedDegree,
  PartitionMismatch,
  CoercivityViolation,
  BudgetExceeded,
  Stagnation,
  CombinatorialBudget,
  Parameter,
  Config,
  Parse,
};

std::string_view to_string(ErrorKind kind);

/// Library failure with a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hpafem
