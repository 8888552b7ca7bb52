#include <charconv>
#include <fstream>
#include <sstream>

#include "softcore/maxsat/instance.hpp"

namespace softcore::maxsat {

std::size_t SoftInstance::num_soft() const {
  std::size_t n = 0;
  for (const auto& c : clauses) n += is_hard(c) ? 0 : 1;
  return n;
}

Weight SoftInstance::total_soft_weight() const {
  Weight w = 0;
  for (const auto& c : clauses) w += is_hard(c) ? 0 : c.weight;
  return w;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t to_int(std::string_view tok, int line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

SoftInstance parse_wcnf(std::string_view text) {
  SoftInstance inst;
  bool have_header = false;
  std::int64_t declared = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto toks = split(line);
    if (toks.empty() || toks[0][0] == 'c') continue;
    if (toks[0] == "p") {
      if (have_header) throw ParseError(line_no, "duplicate header");
      if (toks.size() != 5 || toks[1] != "wcnf") {
        throw ParseError(line_no, "malformed header, expected 'p wcnf <vars> <clauses> <top>'");
      }
      const auto vars = to_int(toks[2], line_no);
      declared = to_int(toks[3], line_no);
      inst.top = to_int(toks[4], line_no);
      if (vars < 0 || vars > INT32_MAX / 2 - 1 || declared < 0 || inst.top < 1) {
        throw ParseError(line_no, "malformed header values");
      }
      inst.num_vars = static_cast<int>(vars);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause before header");
    WeightedClause clause;
    clause.weight = to_int(toks[0], line_no);
    if (clause.weight <= 0) throw ParseError(line_no, "weight must be positive");
    if (clause.weight > inst.top) throw ParseError(line_no, "weight exceeds top");
    bool terminated = false;
    for (std::size_t k = 1; k < toks.size(); ++k) {
      const auto v = to_int(toks[k], line_no);
      if (v == 0) {
        if (k + 1 != toks.size()) throw ParseError(line_no, "tokens after clause terminator");
        terminated = true;
        break;
      }
      if (v > inst.num_vars || -v > inst.num_vars) {
        throw ParseError(line_no, "literal " + std::to_string(v) + " out of range");
      }
      clause.lits.push_back(sat::Lit::from_dimacs(static_cast<int>(v)));
    }
    if (!terminated) throw ParseError(line_no, "missing clause terminator 0");
    inst.clauses.push_back(std::move(clause));
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  if (static_cast<std::int64_t>(inst.clauses.size()) != declared) {
    throw ParseError(line_no, "header declares " + std::to_string(declared) + " clauses, found " +
                                  std::to_string(inst.clauses.size()));
  }
  return inst;
}

SoftInstance read_wcnf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_wcnf(buf.str());
}

std::string serialize_wcnf(const SoftInstance& inst) {
  std::ostringstream out;
  out << "p wcnf " << inst.num_vars << ' ' << inst.clauses.size() << ' ' << inst.top << '\n';
  for (const auto& c : inst.clauses) {
    out << c.weight;
    for (sat::Lit l : c.lits) out << ' ' << l.to_dimacs();
    out << " 0\n";
  }
  return out.str();
}

bool satisfies(const WeightedClause& c, const std::vector<bool>& assignment) {
  for (sat::Lit l : c.lits) {
    if (holds(l, assignment)) return true;
  }
  return false;
}

std::optional<Weight> cost(const SoftInstance& inst, const std::vector<bool>& assignment) {
  Weight z = 0;
  for (const auto& c : inst.clauses) {
    if (satisfies(c, assignment)) continue;
    if (inst.is_hard(c)) return std::nullopt;
    z += c.weight;
  }
  return z;
}

}  // namespace softcore::maxsat
