#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satforge {

/// DIMACS-style literal: +v is variable v, -v its negation. Never 0.
using Literal = std::int32_t;
using Clause = std::vector<Literal>;

enum class Feasibility { kSat, kUnsat };

std::string_view to_string(Feasibility f);
std::optional<Feasibility> parse_feasibility(std::string_view text);

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;
  std::optional<std::string> family;
  std::optional<Feasibility> feasibility;
  std::optional<std::string> source_id;

  std::size_t num_clauses() const { return clauses.size(); }
  /// Throws DataError if a literal is 0 or exceeds num_vars.
  void validate() const;
};

/// Per-variable truth values, indexed 0..num_vars-1 for variables 1..num_vars.
struct Assignment {
  std::vector<bool> values;

  bool value_of(Literal lit) const;
};

bool satisfies(const CnfFormula& formula, const Assignment& assignment);

struct DimacsParse {
  CnfFormula formula;
  /// Set when the number of clauses read differs from the header's count.
  bool clause_count_mismatch = false;
};

/// Reads DIMACS CNF. Comment lines start with 'c'; a '%' line ends the input
/// (SATLIB convention). Throws DataError on malformed input.
DimacsParse parse_dimacs(std::string_view text);
std::string write_dimacs(const CnfFormula& formula);

CnfFormula read_dimacs_file(const std::string& path);
void write_dimacs_file(const CnfFormula& formula, const std::string& path);

}  // namespace satforge
