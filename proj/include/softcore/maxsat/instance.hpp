#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "softcore/sat/literal.hpp"

namespace softcore::maxsat {

using Weight = std::int64_t;

struct WeightedClause {
  std::vector<sat::Lit> lits;
  Weight weight = 1;
  friend bool operator==(const WeightedClause&, const WeightedClause&) = default;
};

/// Weighted partial MaxSAT instance. A clause whose weight equals `top` is hard.
struct SoftInstance {
  int num_vars = 0;
  Weight top = 1;
  std::vector<WeightedClause> clauses;

  bool is_hard(const WeightedClause& c) const { return c.weight >= top; }
  bool is_hard(std::size_t j) const { return is_hard(clauses.at(j)); }
  std::size_t num_soft() const;
  Weight total_soft_weight() const;
  friend bool operator==(const SoftInstance&, const SoftInstance&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// DIMACS WCNF with a `p wcnf <vars> <clauses> <top>` header.
SoftInstance parse_wcnf(std::string_view text);
SoftInstance read_wcnf(const std::string& path);
std::string serialize_wcnf(const SoftInstance& inst);

/// Truth value of a literal under an assignment indexed by variable (index 0 unused).
inline bool holds(sat::Lit l, const std::vector<bool>& assignment) {
  return assignment[l.var()] != l.negated();
}
bool satisfies(const WeightedClause& c, const std::vector<bool>& assignment);

/// Sum of weights of violated soft clauses, or nullopt when a hard clause is violated.
std::optional<Weight> cost(const SoftInstance& inst, const std::vector<bool>& assignment);

}  // namespace softcore::maxsat
