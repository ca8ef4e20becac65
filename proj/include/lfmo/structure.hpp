#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lfmo/errors.hpp"
#include "lfmo/rng.hpp"

namespace lfmo {

// Monotone boolean structure over n components. States are bitmasks with
// bit i set iff component i works (components are 0-indexed internally,
// 1-indexed in formula text and reports).

struct KOutOfNF {
  int k;  // system fails once k or more components have failed
};
struct Series {};
struct Parallel {};

// Formula restricted to AND/OR over component literals, compiled to a
// postfix program. Monotone by construction.
struct BooleanFormula {
  std::string text;
  // postfix ops: value >= 0 -> push literal of that component index;
  // -1 -> AND, -2 -> OR
  std::vector<int> program;
};

struct TwoTerminal {
  std::vector<std::string> nodes;
  std::vector<std::pair<int, int>> edges;  // node indices; edge i = component i
  int source = 0;
  int target = 0;
};

class SystemStructure {
 public:
  using Kind = std::variant<KOutOfNF, Series, Parallel, BooleanFormula, TwoTerminal>;

  static SystemStructure k_out_of_n_f(int n, int k) {
    if (n < 1) throw ValidationError("k_out_of_n_f: n must be >= 1");
    if (k < 1 || k > n)
      throw ValidationError("k_out_of_n_f: k must be in 1..n");
    return SystemStructure(n, KOutOfNF{k});
  }
  static SystemStructure series(int n) {
    if (n < 1) throw ValidationError("series: n must be >= 1");
    return SystemStructure(n, Series{});
  }
  static SystemStructure parallel(int n) {
    if (n < 1) throw ValidationError("parallel: n must be >= 1");
    return SystemStructure(n, Parallel{});
  }
  static SystemStructure formula(int n, const std::string& expr) {
    if (n < 1 || n > 63) throw ValidationError("formula: n must be in 1..63");
    BooleanFormula f;
    f.text = expr;
    f.program = compile_formula(expr, n);
    return SystemStructure(n, std::move(f));
  }
  static SystemStructure two_terminal(std::vector<std::string> nodes,
                                      const std::vector<std::pair<std::string, std::string>>& edges,
                                      const std::string& source,
                                      const std::string& target) {
    if (nodes.empty()) throw ValidationError("two_terminal: empty node list");
    if (edges.empty()) throw ValidationError("two_terminal: empty edge list");
    if (edges.size() > 63)
      throw ValidationError("two_terminal: at most 63 edges supported");
    std::map<std::string, int> index;
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (!index.emplace(nodes[i], static_cast<int>(i)).second)
        throw ValidationError("two_terminal: duplicate node " + nodes[i]);
    }
    auto lookup = [&](const std::string& name) {
      auto it = index.find(name);
      if (it == index.end())
        throw ValidationError("two_terminal: unknown node " + name);
      return it->second;
    };
    TwoTerminal t;
    t.nodes = std::move(nodes);
    for (auto& [a, b] : edges) {
      int ia = lookup(a), ib = lookup(b);
      if (ia == ib) throw ValidationError("two_terminal: self-loop at " + a);
      t.edges.emplace_back(ia, ib);
    }
    t.source = lookup(source);
    t.target = lookup(target);
    int n = static_cast<int>(t.edges.size());
    return SystemStructure(n, std::move(t));
  }

  int component_count() const { return n_; }
  const Kind& kind() const { return kind_; }

  // working_mask bit i = component i works.
  bool evaluate(uint64_t working_mask) const {
    int failed = n_ - popcount_masked(working_mask);
    return std::visit(
        [&](const auto& k) -> bool {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, KOutOfNF>) {
            return failed < k.k;
          } else if constexpr (std::is_same_v<T, Series>) {
            return failed == 0;
          } else if constexpr (std::is_same_v<T, Parallel>) {
            return failed < n_;
          } else if constexpr (std::is_same_v<T, BooleanFormula>) {
            return eval_formula(k.program, working_mask);
          } else {
            return two_terminal_connected(k, working_mask);
          }
        },
        kind_);
  }

 private:
  SystemStructure(int n, Kind kind) : n_(n), kind_(std::move(kind)) {}

  int popcount_masked(uint64_t working_mask) const {
    uint64_t mask = n_ >= 64 ? ~0ull : ((1ull << n_) - 1);
    return __builtin_popcountll(working_mask & mask);
  }

  static bool eval_formula(const std::vector<int>& program, uint64_t mask) {
    bool stack[64];
    int top = 0;
    for (int op : program) {
      if (op >= 0) {
        stack[top++] = (mask >> op) & 1ull;
      } else {
        bool b = stack[--top];
        bool a = stack[--top];
        stack[top++] = op == -1 ? (a && b) : (a || b);
      }
    }
    return stack[0];
  }

  static bool two_terminal_connected(const TwoTerminal& t, uint64_t mask) {
    int parent[64];
    int nn = static_cast<int>(t.nodes.size());
    for (int i = 0; i < nn; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    int rs = find(t.source);
    for (size_t e = 0; e < t.edges.size(); ++e) {
      if (!((mask >> e) & 1ull)) continue;
      int a = find(t.edges[e].first), b = find(t.edges[e].second);
      if (a != b) {
        parent[a] = b;
        rs = find(rs);
        if (rs == find(t.target)) return true;
      }
    }
    return find(t.source) == find(t.target);
  }

  // grammar: expr := term ('|' term)*; term := atom ('&' atom)*;
  // atom := INT | '(' expr ')'. INT is a 1-based component index.
  static std::vector<int> compile_formula(const std::string& expr, int n) {
    std::vector<int> prog;
    size_t pos = 0;
    auto skip = [&] {
      while (pos < expr.size() && std::isspace((unsigned char)expr[pos])) ++pos;
    };
    std::function<void()> parse_expr, parse_term, parse_atom;
    parse_atom = [&] {
      skip();
      if (pos >= expr.size()) throw ValidationError("formula: unexpected end");
      if (expr[pos] == '(') {
        ++pos;
        parse_expr();
        skip();
        if (pos >= expr.size() || expr[pos] != ')')
          throw ValidationError("formula: missing ')'");
        ++pos;
        return;
      }
      if (!std::isdigit((unsigned char)expr[pos]))
        throw ValidationError(std::string("formula: unexpected '") +
                              expr[pos] + "'");
      int v = 0;
      while (pos < expr.size() && std::isdigit((unsigned char)expr[pos]))
        v = v * 10 + (expr[pos++] - '0');
      if (v < 1 || v > n)
        throw ValidationError("formula: component index " + std::to_string(v) +
                              " out of 1.." + std::to_string(n));
      prog.push_back(v - 1);
    };
    parse_term = [&] {
      parse_atom();
      skip();
      while (pos < expr.size() && expr[pos] == '&') {
        ++pos;
        parse_atom();
        prog.push_back(-1);
        skip();
      }
    };
    parse_expr = [&] {
      parse_term();
      skip();
      while (pos < expr.size() && expr[pos] == '|') {
        ++pos;
        parse_term();
        prog.push_back(-2);
        skip();
      }
    };
    parse_expr();
    skip();
    if (pos != expr.size())
      throw ValidationError("formula: trailing input at '" +
                            expr.substr(pos) + "'");
    return prog;
  }

  int n_;
  Kind kind_;
};

struct ValidationReport {
  bool valid = true;
  std::string reason;
  // violating states when monotonicity fails: lower <= upper but
  // phi(lower) > phi(upper)
  std::optional<std::pair<uint64_t, uint64_t>> violation;
};

// Semi-coherence check over an arbitrary evaluator: phi(0)=0, phi(1)=1,
// monotone. Exhaustive over all single-bit upgrades for n <= 20, randomized
// comparable pairs (10^6, fixed seed) otherwise.
inline ValidationReport validate_semi_coherent(
    int n, const std::function<bool(uint64_t)>& phi) {
  ValidationReport report;
  uint64_t full = n >= 64 ? ~0ull : ((1ull << n) - 1);
  if (phi(0)) {
    report.valid = false;
    report.reason = "phi(all-failed) must be 0";
    return report;
  }
  if (!phi(full)) {
    report.valid = false;
    report.reason = "phi(all-working) must be 1";
    return report;
  }
  auto check_pair = [&](uint64_t lower, uint64_t upper) {
    if (phi(lower) && !phi(upper)) {
      report.valid = false;
      report.reason = "monotonicity violated";
      report.violation = {lower, upper};
      return false;
    }
    return true;
  };
  if (n <= 20) {
    for (uint64_t state = 0; state <= full; ++state) {
      for (int b = 0; b < n; ++b) {
        if ((state >> b) & 1ull) continue;
        if (!check_pair(state, state | (1ull << b))) return report;
      }
    }
    return report;
  }
  Xoshiro256 rng(0x5eedc0de5eedc0deull);
  for (int trial = 0; trial < 1000000; ++trial) {
    uint64_t x = rng.next() & full;
    uint64_t y = x | (rng.next() & full);
    if (!check_pair(x, y)) return report;
  }
  return report;
}

inline ValidationReport validate_semi_coherent(const SystemStructure& s) {
  return validate_semi_coherent(
      s.component_count(), [&s](uint64_t m) { return s.evaluate(m); });
}

}  // namespace lfmo
