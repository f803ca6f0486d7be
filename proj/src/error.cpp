#include "hpafem/error.hpp"

namespace hpafem {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigurationMismatch: return "configuration_mismatch";
    case ErrorKind::InvalidPartition: return "invalid_partition";
    case ErrorKind::LevelOverflow: return "level_overflow";
    case ErrorKind::InputFunction: return "input_function";
    case ErrorKind::UnsupportedDegree: return "unsupported_degree";
    case ErrorKind::PartitionMismatch: return "partition_mismatch";
    case ErrorKind::CoercivityViolation: return "coercivity_violation";
    case ErrorKind::BudgetExceeded: return "budget_exceeded";
    case ErrorKind::Stagnation: return "stagnation";
    case ErrorKind::CombinatorialBudget: return "combinatorial_budget";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace hpafem
