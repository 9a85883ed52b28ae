#include "satforge/dpll.hpp"

#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace satforge {
namespace {

// Values: 0 unassigned, +1 true, -1 false.
class Dpll {
 public:
  Dpll(const CnfFormula& formula, std::uint64_t budget)
      : f_(formula), budget_(budget), value_(static_cast<std::size_t>(formula.num_vars) + 1, 0) {}

  SolveResult run() {
    SolveResult result;
    const int outcome = search();
    result.decisions = decisions_;
    if (outcome == 1) {
      result.status = SolveStatus::kSat;
      Assignment a;
      a.values.resize(static_cast<std::size_t>(f_.num_vars));
      for (int v = 1; v <= f_.num_vars; ++v) a.values[static_cast<std::size_t>(v - 1)] = value_[v] > 0;
      result.assignment = std::move(a);
    } else if (outcome == 0) {
      result.status = SolveStatus::kUnsat;
    } else {
      result.status = SolveStatus::kBudgetExceeded;
    }
    return result;
  }

 private:
  int lit_value(Literal lit) const {
    const int v = value_[static_cast<std::size_t>(std::abs(lit))];
    return lit > 0 ? v : -v;
  }

  void assign(Literal lit) {
    value_[static_cast<std::size_t>(std::abs(lit))] = lit > 0 ? 1 : -1;
    trail_.push_back(std::abs(lit));
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      value_[static_cast<std::size_t>(trail_.back())] = 0;
      trail_.pop_back();
    }
  }

  // Returns false on conflict.
  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Clause& clause : f_.clauses) {
        int unassigned = 0;
        Literal last = 0;
        bool sat = false;
        for (Literal lit : clause) {
          const int val = lit_value(lit);
          if (val > 0) {
            sat = true;
            break;
          }
          if (val == 0) {
            ++unassigned;
            last = lit;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          assign(last);
          changed = true;
        }
      }
      if (!changed) changed = assign_pure_literals();
    }
    return true;
  }

  bool assign_pure_literals() {
    // polarity bit 1 = positive seen, bit 2 = negative seen
    std::vector<int> polarity(value_.size(), 0);
    for (const Clause& clause : f_.clauses) {
      if (clause_satisfied(clause)) continue;
      for (Literal lit : clause) {
        if (lit_value(lit) != 0) continue;
        polarity[static_cast<std::size_t>(std::abs(lit))] |= lit > 0 ? 1 : 2;
      }
    }
    bool any = false;
    for (int v = 1; v <= f_.num_vars; ++v) {
      const int p = polarity[static_cast<std::size_t>(v)];
      if (p == 1) {
        assign(v);
        any = true;
      } else if (p == 2) {
        assign(-v);
        any = true;
      }
    }
    return any;
  }

  bool clause_satisfied(const Clause& clause) const {
    for (Literal lit : clause) {
      if (lit_value(lit) > 0) return true;
    }
    return false;
  }

  // Most frequent unassigned variable in unsatisfied clauses; 0 if none.
  Literal choose_branch() const {
    std::vector<int> pos(value_.size(), 0), neg(value_.size(), 0);
    for (const Clause& clause : f_.clauses) {
      if (clause_satisfied(clause)) continue;
      for (Literal lit : clause) {
        if (lit_value(lit) != 0) continue;
        (lit > 0 ? pos : neg)[static_cast<std::size_t>(std::abs(lit))]++;
      }
    }
    Literal best = 0;
    int best_score = 0;
    for (int v = 1; v <= f_.num_vars; ++v) {
      const int score = pos[static_cast<std::size_t>(v)] + neg[static_cast<std::size_t>(v)];
      if (score > best_score) {
        best_score = score;
        best = pos[static_cast<std::size_t>(v)] >= neg[static_cast<std::size_t>(v)] ? v : -v;
      }
    }
    return best;
  }

  // 1 = SAT, 0 = UNSAT, -1 = budget exhausted.
  int search() {
    const std::size_t mark = trail_.size();
    if (!propagate()) {
      undo_to(mark);
      return 0;
    }
    const Literal branch = choose_branch();
    if (branch == 0) return 1;  // every clause satisfied
    for (Literal choice : {branch, -branch}) {
      if (decisions_ >= budget_) {
        undo_to(mark);
        return -1;
      }
      ++decisions_;
      const std::size_t inner = trail_.size();
      assign(choice);
      const int r = search();
      if (r == 1) return 1;
      undo_to(inner);
      if (r == -1) {
        undo_to(mark);
        return -1;
      }
    }
    undo_to(mark);
    return 0;
  }

  const CnfFormula& f_;
  std::uint64_t budget_;
  std::uint64_t decisions_ = 0;
  std::vector<int> value_;
  std::vector<int> trail_;
};

}  // namespace

SolveResult dpll_solve(const CnfFormula& formula, std::uint64_t budget) {
  if (budget < 1) throw std::invalid_argument("dpll_solve: budget must be >= 1");
  formula.validate();
  for (const Clause& clause : formula.clauses) {
    if (clause.empty()) return SolveResult{SolveStatus::kUnsat, std::nullopt, 0};
  }
  return Dpll(formula, budget).run();
}

}  // namespace satforge
