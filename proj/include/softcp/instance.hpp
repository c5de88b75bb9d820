#pragma once

// Line-oriented instance format and the propagate / solve / check commands.
//
//   var <name> in {v1,v2,...}          or  {lo..hi}
//   dfa <name> states {..} alphabet {..} initial <q> accepting {..}
//       trans <q> <sym> -> <q> ...
//   constraint soft_gcc vars(<names>) bounds(v:l..u, ...) measure <var|val|overflow|weighted>
//       [over(v:w,...)] [under(v:w,...)] cost <z>
//   constraint soft_regular vars(<names>) dfa <name> measure <var|edit> [weights(s,i,d)] cost <z>
//   constraint sgca vars(<znames>) bounds(...) measure <...> cost <z>
//   minimize <z>
//
// '#' starts a comment. An upper bound of `inf` means unbounded.

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "softcp/aggregator.hpp"
#include "softcp/automaton.hpp"
#include "softcp/engine.hpp"
#include "softcp/oracle.hpp"

namespace softcp::cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_, column_;
};

struct Position {
  int line = 0;
  int column = 0;
};

struct VarDecl {
  std::string name;
  std::vector<std::string> values;
  Position pos;
  friend bool operator==(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.values == b.values;
  }
};

struct Transition {
  std::string from, symbol, to;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct DfaDecl {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::string initial;
  std::vector<std::string> accepting;
  std::vector<Transition> transitions;
  Position pos;
  friend bool operator==(const DfaDecl& a, const DfaDecl& b) {
    return a.name == b.name && a.states == b.states && a.alphabet == b.alphabet &&
           a.initial == b.initial && a.accepting == b.accepting && a.transitions == b.transitions;
  }
};

struct BoundDecl {
  std::string value;
  Count lower = 0;
  Count upper = kUnbounded;
  friend bool operator==(const BoundDecl&, const BoundDecl&) = default;
};

struct WeightDecl {
  std::string value;
  Cost weight = 0;
  friend bool operator==(const WeightDecl&, const WeightDecl&) = default;
};

enum class ConstraintKind { kSoftGcc, kSoftRegular, kSgca };

inline const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::kSoftGcc: return "soft_gcc";
    case ConstraintKind::kSoftRegular: return "soft_regular";
    case ConstraintKind::kSgca: return "sgca";
  }
  return "?";
}

struct ConstraintDecl {
  ConstraintKind kind = ConstraintKind::kSoftGcc;
  std::vector<std::string> vars;
  std::vector<BoundDecl> bounds;
  std::string measure;
  std::vector<WeightDecl> over, under;
  std::string dfa;
  std::optional<EditWeights> weights;
  std::string cost;
  Position pos;
  friend bool operator==(const ConstraintDecl& a, const ConstraintDecl& b) {
    return a.kind == b.kind && a.vars == b.vars && a.bounds == b.bounds && a.measure == b.measure &&
           a.over == b.over && a.under == b.under && a.dfa == b.dfa && a.weights == b.weights &&
           a.cost == b.cost;
  }
};

struct Instance {
  std::vector<VarDecl> vars;
  std::vector<DfaDecl> dfas;
  std::vector<ConstraintDecl> constraints;
  std::optional<std::string> minimize;
  Position minimize_pos;
  friend bool operator==(const Instance& a, const Instance& b) {
    return a.vars == b.vars && a.dfas == b.dfas && a.constraints == b.constraints &&
           a.minimize == b.minimize;
  }
};

namespace detail {

struct Token {
  std::string text;
  Position pos;
};

inline std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (text.compare(i, 2, "->") == 0 || text.compare(i, 2, "..") == 0) {
      out.push_back({text.substr(i, 2), {line, col}});
      advance(2);
    } else if (std::string_view("{}(),:").find(c) != std::string_view::npos) {
      out.push_back({std::string(1, c), {line, col}});
      advance(1);
    } else if (word_char(c) || (c == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      Position p{line, col};
      std::size_t j = i + 1;
      while (j < text.size() && word_char(text[j])) ++j;
      out.push_back({text.substr(i, j - i), p});
      advance(j - i);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

inline bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t start = s[0] == '-' ? 1 : 0;
  if (start == s.size()) return false;
  for (std::size_t i = start; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
    eof_.text = "<end of file>";
    eof_.pos = toks_.empty() ? Position{1, 1} : toks_.back().pos;
  }

  Instance parse() {
    Instance inst;
    while (!at_end()) {
      const Token& t = peek();
      if (t.text == "var") {
        inst.vars.push_back(parse_var());
      } else if (t.text == "dfa") {
        inst.dfas.push_back(parse_dfa());
      } else if (t.text == "constraint") {
        inst.constraints.push_back(parse_constraint());
      } else if (t.text == "minimize") {
        next();
        if (inst.minimize) fail(t, "duplicate minimize statement");
        inst.minimize_pos = peek().pos;
        inst.minimize = name();
      } else {
        fail(t, "expected 'var', 'dfa', 'constraint' or 'minimize', found '" + t.text + "'");
      }
    }
    return inst;
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek() const { return at_end() ? eof_ : toks_[pos_]; }
  const Token& next() {
    const Token& t = peek();
    if (!at_end()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(t.pos.line, t.pos.column, msg);
  }
  void expect(const std::string& text) {
    const Token& t = next();
    if (t.text != text) fail(t, "expected '" + text + "', found '" + t.text + "'");
  }
  bool accept(const std::string& text) {
    if (!at_end() && peek().text == text) {
      ++pos_;
      return true;
    }
    return false;
  }
  static bool is_punct(const std::string& s) {
    return s == "{" || s == "}" || s == "(" || s == ")" || s == "," || s == ":" || s == "->" ||
           s == "..";
  }
  std::string name() {
    if (at_end()) fail(eof_, "unexpected end of file");
    const Token& t = next();
    if (is_punct(t.text)) fail(t, "expected a name, found '" + t.text + "'");
    return t.text;
  }
  Count integer() {
    const Token& t = next();
    if (!is_integer(t.text)) fail(t, "expected an integer, found '" + t.text + "'");
    Count v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail(t, "integer out of range");
    return v;
  }

  std::vector<std::string> name_list(const std::string& open, const std::string& close) {
    expect(open);
    std::vector<std::string> out;
    if (accept(close)) return out;
    do out.push_back(name());
    while (accept(","));
    expect(close);
    return out;
  }

  VarDecl parse_var() {
    next();
    VarDecl v;
    v.pos = peek().pos;
    v.name = name();
    expect("in");
    expect("{");
    if (!accept("}")) {
      do {
        const Token& first = peek();
        std::string tok = name();
        if (accept("..")) {
          if (!is_integer(tok)) fail(first, "range bounds must be integers");
          Count hi = integer();
          Count lo = std::stoll(tok);
          if (hi < lo) fail(first, "empty range");
          if (hi - lo > 1000000) fail(first, "range too large");
          for (Count x = lo; x <= hi; ++x) v.values.push_back(std::to_string(x));
        } else {
          v.values.push_back(tok);
        }
      } while (accept(","));
      expect("}");
    }
    if (v.values.empty()) fail(peek(), "variable '" + v.name + "' has an empty domain");
    return v;
  }

  DfaDecl parse_dfa() {
    next();
    DfaDecl d;
    d.pos = peek().pos;
    d.name = name();
    expect("states");
    d.states = name_list("{", "}");
    expect("alphabet");
    d.alphabet = name_list("{", "}");
    expect("initial");
    d.initial = name();
    expect("accepting");
    d.accepting = name_list("{", "}");
    while (accept("trans")) {
      Transition t;
      t.from = name();
      t.symbol = name();
      expect("->");
      t.to = name();
      d.transitions.push_back(t);
    }
    return d;
  }

  std::vector<BoundDecl> bound_list() {
    expect("(");
    std::vector<BoundDecl> out;
    if (accept(")")) return out;
    do {
      BoundDecl b;
      b.value = name();
      expect(":");
      b.lower = integer();
      expect("..");
      if (accept("inf")) {
        b.upper = kUnbounded;
      } else {
        b.upper = integer();
      }
      out.push_back(b);
    } while (accept(","));
    expect(")");
    return out;
  }

  std::vector<WeightDecl> weight_list() {
    expect("(");
    std::vector<WeightDecl> out;
    if (accept(")")) return out;
    do {
      WeightDecl w;
      w.value = name();
      expect(":");
      w.weight = integer();
      out.push_back(w);
    } while (accept(","));
    expect(")");
    return out;
  }

  ConstraintDecl parse_constraint() {
    next();
    ConstraintDecl c;
    c.pos = peek().pos;
    const Token& kind = next();
    if (kind.text == "soft_gcc") c.kind = ConstraintKind::kSoftGcc;
    else if (kind.text == "soft_regular") c.kind = ConstraintKind::kSoftRegular;
    else if (kind.text == "sgca") c.kind = ConstraintKind::kSgca;
    else fail(kind, "unknown constraint kind '" + kind.text + "'");

    bool has_vars = false, has_cost = false;
    while (!at_end()) {
      const Token& key = peek();
      if (key.text == "vars") {
        next();
        c.vars = name_list("(", ")");
        has_vars = true;
      } else if (key.text == "bounds") {
        next();
        c.bounds = bound_list();
      } else if (key.text == "measure") {
        next();
        c.measure = name();
      } else if (key.text == "over") {
        next();
        c.over = weight_list();
      } else if (key.text == "under") {
        next();
        c.under = weight_list();
      } else if (key.text == "dfa") {
        // `dfa` opens a new statement unless it names this constraint's automaton.
        if (c.kind != ConstraintKind::kSoftRegular || !c.dfa.empty()) break;
        next();
        c.dfa = name();
      } else if (key.text == "weights") {
        next();
        expect("(");
        EditWeights w;
        w.substitution = integer();
        expect(",");
        w.insertion = integer();
        expect(",");
        w.deletion = integer();
        expect(")");
        c.weights = w;
      } else if (key.text == "cost") {
        next();
        c.cost = name();
        has_cost = true;
      } else {
        break;
      }
    }
    if (!has_vars) fail(kind, "constraint is missing vars(...)");
    if (!has_cost) fail(kind, "constraint is missing 'cost <variable>'");
    if (c.measure.empty()) c.measure = c.kind == ConstraintKind::kSoftRegular ? "var" : "val";
    return c;
  }

  std::vector<Token> toks_;
  Token eof_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Instance parse_instance(const std::string& text) {
  return detail::Parser(detail::tokenize(text)).parse();
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

namespace detail {

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

inline std::string bound_text(const BoundDecl& b) {
  return b.value + ":" + std::to_string(b.lower) + ".." +
         (b.upper >= kUnbounded ? std::string("inf") : std::to_string(b.upper));
}

}  // namespace detail

inline std::string serialize(const Instance& inst) {
  std::ostringstream os;
  for (const auto& v : inst.vars) os << "var " << v.name << " in {" << detail::join(v.values) << "}\n";
  for (const auto& d : inst.dfas) {
    os << "dfa " << d.name << " states {" << detail::join(d.states) << "} alphabet {"
       << detail::join(d.alphabet) << "} initial " << d.initial << " accepting {"
       << detail::join(d.accepting) << "}\n";
    for (const auto& t : d.transitions) os << "  trans " << t.from << ' ' << t.symbol << " -> " << t.to << '\n';
  }
  for (const auto& c : inst.constraints) {
    os << "constraint " << to_string(c.kind) << " vars(" << detail::join(c.vars) << ")";
    if (c.kind == ConstraintKind::kSoftRegular) os << " dfa " << c.dfa;
    if (!c.bounds.empty()) {
      os << " bounds(";
      for (std::size_t i = 0; i < c.bounds.size(); ++i) os << (i ? ", " : "") << detail::bound_text(c.bounds[i]);
      os << ")";
    }
    os << " measure " << c.measure;
    auto weights = [&](const char* key, const std::vector<WeightDecl>& ws) {
      if (ws.empty()) return;
      os << ' ' << key << '(';
      for (std::size_t i = 0; i < ws.size(); ++i) os << (i ? "," : "") << ws[i].value << ':' << ws[i].weight;
      os << ')';
    };
    weights("over", c.over);
    weights("under", c.under);
    if (c.weights)
      os << " weights(" << c.weights->substitution << ',' << c.weights->insertion << ','
         << c.weights->deletion << ')';
    os << " cost " << c.cost << '\n';
  }
  if (inst.minimize) os << "minimize " << *inst.minimize << '\n';
  return os.str();
}

// Value tokens: integers map to themselves, other names are interned above
// kSymbolBase in order of first appearance.
class ValueTable {
 public:
  static constexpr Value kSymbolBase = Value{1} << 40;

  Value intern(const std::string& token) {
    if (detail::is_integer(token)) {
      Value v = std::stoll(token);
      if (v >= kSymbolBase || v <= -kSymbolBase) throw std::invalid_argument("value " + token + " out of range");
      return v;
    }
    auto [it, inserted] = by_name_.emplace(token, kSymbolBase + static_cast<Value>(names_.size()));
    if (inserted) names_.push_back(token);
    return it->second;
  }

  [[nodiscard]] std::string name(Value v) const {
    if (v >= kSymbolBase) return names_.at(v - kSymbolBase);
    return std::to_string(v);
  }

  [[nodiscard]] static bool is_symbolic(Value v) { return v >= kSymbolBase; }

 private:
  std::map<std::string, Value> by_name_;
  std::vector<std::string> names_;
};

struct Overrides {
  std::optional<std::string> measure;
  std::optional<Cost> zmax;
  std::optional<EditWeights> edit_weights;
};

struct BuiltModel {
  Model model;
  ValueTable values;
  std::vector<bool> is_cost;  // by VarId
  std::vector<std::shared_ptr<const Dfa>> dfas;
};

namespace detail {

[[noreturn]] inline void invalid(const Position& p, const std::string& msg) {
  throw ParseError(p.line, p.column, msg);
}

inline ViolationMeasure gcc_measure(const ConstraintDecl& c, ValueTable& values) {
  ViolationMeasure m;
  if (c.measure == "var") {
    if (!c.over.empty() || !c.under.empty())
      invalid(c.pos, "over/under weights apply to value-based measures only");
    return ViolationMeasure::var();
  }
  if (c.measure == "val") m = ViolationMeasure::val();
  else if (c.measure == "overflow") m = overflow_only_measure();
  else if (c.measure == "weighted") m = proportional_overflow_measure();
  else invalid(c.pos, "unknown measure '" + c.measure + "' for " + to_string(c.kind));
  for (const auto& w : c.over) {
    if (w.weight < 0) invalid(c.pos, "weights must be nonnegative");
    m.over.table[values.intern(w.value)] = w.weight;
  }
  for (const auto& w : c.under) {
    if (w.weight < 0) invalid(c.pos, "weights must be nonnegative");
    m.under.table[values.intern(w.value)] = w.weight;
  }
  return m;
}

}  // namespace detail

inline BuiltModel build_model(const Instance& inst, const Overrides& ov = {}) {
  BuiltModel b;
  for (const auto& v : inst.vars) {
    std::vector<Value> vals;
    for (const auto& t : v.values) vals.push_back(b.values.intern(t));
    try {
      b.model.add_variable(v.name, Domain(std::move(vals)));
    } catch (const std::invalid_argument& e) {
      detail::invalid(v.pos, e.what());
    }
  }
  b.is_cost.assign(b.model.num_vars(), false);

  std::map<std::string, std::size_t> dfa_index;
  for (const auto& d : inst.dfas) {
    try {
      auto dfa = std::make_shared<Dfa>(d.states, d.alphabet);
      auto state = [&](const std::string& n) {
        auto q = dfa->state(n);
        if (!q) detail::invalid(d.pos, "unknown state '" + n + "' in automaton '" + d.name + "'");
        return *q;
      };
      dfa->set_initial(state(d.initial));
      for (const auto& q : d.accepting) dfa->set_accepting(state(q));
      for (const auto& t : d.transitions) {
        auto s = dfa->symbol(t.symbol);
        if (!s) detail::invalid(d.pos, "unknown symbol '" + t.symbol + "' in automaton '" + d.name + "'");
        dfa->add_transition(state(t.from), *s, state(t.to));
      }
      if (!dfa_index.emplace(d.name, b.dfas.size()).second)
        detail::invalid(d.pos, "duplicate automaton '" + d.name + "'");
      b.dfas.push_back(std::move(dfa));
    } catch (const std::invalid_argument& e) {
      detail::invalid(d.pos, e.what());
    }
  }

  auto resolve = [&](const ConstraintDecl& c, const std::string& n) {
    auto v = b.model.find(n);
    if (!v) detail::invalid(c.pos, "unknown variable '" + n + "'");
    return *v;
  };
  for (const auto& c : inst.constraints) {
    VarId cost = resolve(c, c.cost);
    b.is_cost[cost] = true;
  }
  // Cost variables range over nonnegative integers.
  for (VarId v = 0; v < b.model.num_vars(); ++v) {
    if (!b.is_cost[v]) continue;
    for (Value x : b.model.var(v).domain)
      if (ValueTable::is_symbolic(x) || x < 0)
        detail::invalid(inst.vars[v].pos, "cost variable '" + b.model.var(v).name +
                                              "' must range over nonnegative integers");
  }
  if (ov.zmax) {
    // Re-create cost variables capped at zmax.
    Model capped;
    for (VarId v = 0; v < b.model.num_vars(); ++v) {
      Domain d = b.model.var(v).domain;
      if (b.is_cost[v]) d.remove_above(*ov.zmax);
      if (d.empty()) detail::invalid(inst.vars[v].pos, "--zmax empties the domain of '" + b.model.var(v).name + "'");
      capped.add_variable(b.model.var(v).name, std::move(d));
    }
    b.model = std::move(capped);
  }

  for (const auto& c : inst.constraints) {
    std::vector<VarId> vars;
    for (const auto& n : c.vars) vars.push_back(resolve(c, n));
    VarId cost = resolve(c, c.cost);
    ConstraintDecl decl = c;
    if (ov.measure) {
      const std::string& m = *ov.measure;
      bool regular = c.kind == ConstraintKind::kSoftRegular;
      if (m == "var" || (regular && m == "edit") || (!regular && m != "edit")) decl.measure = m;
    }
    try {
      if (c.kind == ConstraintKind::kSoftRegular) {
        if (!c.bounds.empty() || !c.over.empty() || !c.under.empty())
          detail::invalid(c.pos, "soft_regular takes no bounds or value weights");
        auto it = dfa_index.find(c.dfa);
        if (it == dfa_index.end()) detail::invalid(c.pos, "unknown automaton '" + c.dfa + "'");
        RegularMeasure m;
        if (decl.measure == "var") m = RegularMeasure::kVar;
        else if (decl.measure == "edit") m = RegularMeasure::kEdit;
        else detail::invalid(c.pos, "unknown measure '" + decl.measure + "' for soft_regular");
        EditWeights w = ov.edit_weights ? *ov.edit_weights : c.weights.value_or(EditWeights{});
        const auto& dfa = b.dfas[it->second];
        std::vector<Value> symbol_values;
        for (const auto& s : dfa->alphabet()) symbol_values.push_back(b.values.intern(s));
        b.model.post_soft_regular(vars, dfa, m, w, cost, std::move(symbol_values));
        continue;
      }
      if (c.weights) detail::invalid(c.pos, "edit weights apply to soft_regular only");
      GccBounds bounds;
      for (const auto& bd : c.bounds) bounds.set(b.values.intern(bd.value), bd.lower, bd.upper);
      ViolationMeasure m = detail::gcc_measure(decl, b.values);
      std::vector<Domain> doms;
      for (VarId v : vars) doms.push_back(b.model.var(v).domain);
      std::vector<Value> universe = union_of(doms);
      for (const auto& [d, o] : bounds.entries())
        if (!std::binary_search(universe.begin(), universe.end(), d))
          detail::invalid(c.pos, "bounds mention value '" + b.values.name(d) +
                                     "' outside the domains of the constrained variables");
      if (m.over.proportional)
        for (Value d : universe)
          if (ValueTable::is_symbolic(d) || d < 0)
            detail::invalid(c.pos, "measure 'weighted' needs nonnegative integer values");
      if (c.kind == ConstraintKind::kSgca) {
        post_sgca(b.model, {vars, bounds, m, cost});
      } else {
        b.model.post_soft_gcc(vars, bounds, m, cost);
      }
    } catch (const std::invalid_argument& e) {
      detail::invalid(c.pos, e.what());
    }
  }
  if (inst.minimize) {
    auto v = b.model.find(*inst.minimize);
    if (!v) detail::invalid(inst.minimize_pos, "unknown variable '" + *inst.minimize + "'");
    b.model.minimize(*v);
  }
  return b;
}

inline std::string domain_text(const Domain& d, const ValueTable& values) {
  std::string out = "{";
  bool first = true;
  for (Value v : d) {
    out += (first ? "" : ",") + values.name(v);
    first = false;
  }
  return out + "}";
}

inline void print_store(std::ostream& os, const BuiltModel& b, const Store& store) {
  for (VarId v = 0; v < b.model.num_vars(); ++v) {
    const auto& name = b.model.var(v).name;
    if (b.is_cost[v])
      os << "bounds " << name << ": " << store[v].min() << ".." << store[v].max() << '\n';
    else
      os << "domain " << name << ": " << domain_text(store[v], b.values) << '\n';
  }
}

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;

inline int cmd_propagate(const BuiltModel& b, std::ostream& os) {
  auto store = propagate_fixpoint(b.model);
  if (!store) {
    os << "inconsistent\n";
    return kExitFail;
  }
  print_store(os, b, *store);
  return kExitOk;
}

inline int cmd_solve(const BuiltModel& b, std::ostream& os) {
  SearchResult r = solve_min(b.model);
  os << "status: " << to_string(r.status) << '\n';
  if (r.status == SearchStatus::kInfeasible) return kExitFail;
  os << "objective: " << r.objective << '\n';
  for (VarId v = 0; v < b.model.num_vars(); ++v)
    os << "assign " << b.model.var(v).name << ": " << b.values.name(r.assignment[v]) << '\n';
  os << "stats: nodes " << r.stats.nodes << " propagations " << r.stats.propagations << '\n';
  return kExitOk;
}

// Propagator under audit: the engine's own by default.
using PropagatorFn = std::function<std::variant<Store, FailReason>(const Constraint&, const Store&)>;

// Oracle view of one posted constraint: its scope domains and spec.
struct OracleView {
  Domains domains;
  oracle::ConstraintSpec spec;
};

inline OracleView oracle_view(const Constraint& c, const Store& store) {
  OracleView view;
  if (const auto* g = std::get_if<SoftGccConstraint>(&c)) {
    for (VarId v : g->vars) view.domains.push_back(store[v]);
    view.spec = oracle::GccSpec{g->bounds, g->measure, g->universe};
    return view;
  }
  const auto& r = std::get<SoftRegularConstraint>(c);
  std::map<Value, Symbol> code;
  for (Symbol s = 0; s < static_cast<Symbol>(r.symbol_values.size()); ++s) code[r.symbol_values[s]] = s;
  for (VarId v : r.vars) {
    std::vector<Value> codes;
    for (Value x : store[v]) codes.push_back(code.at(x));
    view.domains.emplace_back(std::move(codes));
  }
  view.spec = oracle::RegularSpec{r.dfa.get(), r.measure, r.weights};
  return view;
}

// Compares each constraint's propagator, run alone on the initial domains,
// with exhaustive enumeration. Prints MATCH or the first counterexample.
inline int cmd_check(const BuiltModel& b, std::ostream& os,
                     const PropagatorFn& propagator = propagate_constraint) {
  const Store initial = b.model.initial_store();
  try {
    for (std::size_t k = 0; k < b.model.constraints().size(); ++k) {
      const Constraint& c = b.model.constraints()[k];
      OracleView view = oracle_view(c, initial);
      const std::vector<VarId>& scope =
          std::visit([](const auto& x) -> const std::vector<VarId>& { return x.vars; }, c);
      const VarId cost = std::visit([](const auto& x) { return x.cost; }, c);
      const Domain& z = initial[cost];

      auto min_violation = oracle::enumerate_min_violation(view.domains, view.spec);
      std::optional<Domains> expected;
      if (min_violation && *min_violation <= z.max())
        expected = oracle::oracle_filter(view.domains, view.spec, z.max());
      std::optional<Domain> expected_z;
      if (expected) {
        expected_z = z;
        expected_z->remove_below(*min_violation);
      }

      auto got = propagator(c, initial);
      const Store* got_store = std::get_if<Store>(&got);
      auto header = [&] {
        os << "MISMATCH constraint #" << k << '\n';
      };
      if (!expected || !got_store) {
        if (!expected && !got_store) continue;
        header();
        os << "  oracle: " << (expected ? "consistent" : "fail") << '\n';
        os << "  propagator: "
           << (got_store ? "consistent" : to_string(std::get<FailReason>(got))) << '\n';
        return kExitFail;
      }
      bool ok = true;
      std::ostringstream dump;
      for (std::size_t i = 0; i < scope.size(); ++i) {
        Domain exp_d = (*expected)[i];
        if (const auto* r = std::get_if<SoftRegularConstraint>(&c)) {
          std::vector<Value> vals;
          for (Value s : exp_d) vals.push_back(r->symbol_values[s]);
          exp_d = Domain(std::move(vals));
        }
        const Domain& got_d = (*got_store)[scope[i]];
        if (!(exp_d == got_d)) {
          ok = false;
          dump << "  domain " << b.model.var(scope[i]).name << ": propagator "
               << domain_text(got_d, b.values) << " oracle " << domain_text(exp_d, b.values) << '\n';
        }
      }
      if (!((*got_store)[cost] == *expected_z)) {
        ok = false;
        dump << "  bounds " << b.model.var(cost).name << ": propagator " << (*got_store)[cost].min()
             << ".." << (*got_store)[cost].max() << " oracle " << expected_z->min() << ".."
             << expected_z->max() << '\n';
      }
      if (!ok) {
        header();
        os << dump.str();
        return kExitFail;
      }
    }
  } catch (const oracle::SizeGuardExceeded& e) {
    os << "error: " << e.what() << '\n';
    return kExitInput;
  }
  os << "MATCH\n";
  return kExitOk;
}

}  // namespace softcp::cli
