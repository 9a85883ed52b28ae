#include "satforge/cnf.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "satforge/error.hpp"

namespace satforge {

std::string_view to_string(Feasibility f) { return f == Feasibility::kSat ? "SAT" : "UNSAT"; }

std::optional<Feasibility> parse_feasibility(std::string_view text) {
  if (text == "SAT" || text == "sat") return Feasibility::kSat;
  if (text == "UNSAT" || text == "unsat") return Feasibility::kUnsat;
  return std::nullopt;
}

void CnfFormula::validate() const {
  if (num_vars < 0) throw DataError("negative variable count");
  for (const Clause& clause : clauses) {
    for (Literal lit : clause) {
      if (lit == 0) throw DataError("literal 0 inside clause");
      if (std::abs(lit) > num_vars) {
        throw DataError("literal " + std::to_string(lit) + " out of range for " +
                        std::to_string(num_vars) + " variables");
      }
    }
  }
}

bool Assignment::value_of(Literal lit) const {
  const bool v = values[static_cast<std::size_t>(std::abs(lit) - 1)];
  return lit > 0 ? v : !v;
}

bool satisfies(const CnfFormula& formula, const Assignment& assignment) {
  if (assignment.values.size() != static_cast<std::size_t>(formula.num_vars)) return false;
  for (const Clause& clause : formula.clauses) {
    bool sat = false;
    for (Literal lit : clause) {
      if (assignment.value_of(lit)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

long long parse_integer(std::string_view token, int line_no) {
  long long value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw DataError("line " + std::to_string(line_no) + ": non-integer token '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

DimacsParse parse_dimacs(std::string_view text) {
  DimacsParse result;
  CnfFormula& f = result.formula;
  bool have_header = false;
  long long declared_clauses = 0;
  Clause current;
  int line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto tokens = split_tokens(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tokens.front().front() == 'c') continue;
    if (tokens.front() == "%") break;
    if (tokens.front() == "p") {
      if (have_header) throw DataError("line " + std::to_string(line_no) + ": duplicate header");
      if (tokens.size() != 4 || tokens[1] != "cnf") {
        throw DataError("line " + std::to_string(line_no) + ": malformed header, expected 'p cnf <vars> <clauses>'");
      }
      const long long n = parse_integer(tokens[2], line_no);
      declared_clauses = parse_integer(tokens[3], line_no);
      if (n < 0 || declared_clauses < 0 || n > std::numeric_limits<Literal>::max()) {
        throw DataError("line " + std::to_string(line_no) + ": invalid header counts");
      }
      f.num_vars = static_cast<int>(n);
      have_header = true;
      continue;
    }
    if (!have_header) throw DataError("line " + std::to_string(line_no) + ": clause data before 'p cnf' header");
    for (std::string_view token : tokens) {
      const long long lit = parse_integer(token, line_no);
      if (lit == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (std::llabs(lit) > f.num_vars) {
        throw DataError("line " + std::to_string(line_no) + ": literal " + std::to_string(lit) +
                        " out of range for " + std::to_string(f.num_vars) + " variables");
      }
      current.push_back(static_cast<Literal>(lit));
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw DataError("missing 'p cnf' header");
  if (!current.empty()) throw DataError("last clause is missing its terminating 0");
  result.clause_count_mismatch = static_cast<long long>(f.clauses.size()) != declared_clauses;
  return result;
}

std::string write_dimacs(const CnfFormula& formula) {
  std::string out = "p cnf " + std::to_string(formula.num_vars) + " " + std::to_string(formula.clauses.size()) + "\n";
  for (const Clause& clause : formula.clauses) {
    for (Literal lit : clause) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfFormula read_dimacs_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  CnfFormula f = parse_dimacs(buf.str()).formula;
  f.source_id = path;
  return f;
}

void write_dimacs_file(const CnfFormula& formula, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << write_dimacs(formula);
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace satforge
