#pragma once

#include <cstdint>
#include <optional>

#include "satforge/cnf.hpp"

namespace satforge {

enum class SolveStatus { kSat, kUnsat, kBudgetExceeded };

struct SolveResult {
  SolveStatus status = SolveStatus::kBudgetExceeded;
  /// Present iff status == kSat; always satisfies the formula.
  std::optional<Assignment> assignment;
  std::uint64_t decisions = 0;
};

/// Backtracking search with unit propagation and pure-literal elimination.
/// `budget` bounds the number of branching decisions (must be >= 1).
SolveResult dpll_solve(const CnfFormula& formula, std::uint64_t budget);

}  // namespace satforge
