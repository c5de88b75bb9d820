#pragma once

// Deterministic finite automata with a partial transition function, and exact
// distances from a string to the language of an automaton.

#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "softcp/domain.hpp"

namespace softcp {

using StateId = int;
using Symbol = int;  // dense code into Dfa::alphabet()

inline constexpr StateId kNoTransition = -1;

class Dfa {
 public:
  Dfa(std::vector<std::string> states, std::vector<std::string> alphabet)
      : state_names_(std::move(states)),
        symbol_names_(std::move(alphabet)),
        delta_(state_names_.size() * symbol_names_.size(), kNoTransition),
        accepting_(state_names_.size(), false) {
    if (state_names_.empty()) throw std::invalid_argument("automaton needs at least one state");
    for (std::size_t i = 0; i < state_names_.size(); ++i)
      if (!state_index_.emplace(state_names_[i], static_cast<StateId>(i)).second)
        throw std::invalid_argument("duplicate state '" + state_names_[i] + "'");
    for (std::size_t i = 0; i < symbol_names_.size(); ++i)
      if (!symbol_index_.emplace(symbol_names_[i], static_cast<Symbol>(i)).second)
        throw std::invalid_argument("duplicate symbol '" + symbol_names_[i] + "'");
  }

  // Anonymous states "0".."n-1" and symbols "0".."k-1".
  static Dfa anonymous(int num_states, int num_symbols) {
    std::vector<std::string> q, s;
    for (int i = 0; i < num_states; ++i) q.push_back(std::to_string(i));
    for (int i = 0; i < num_symbols; ++i) s.push_back(std::to_string(i));
    return Dfa(std::move(q), std::move(s));
  }

  void set_initial(StateId q) {
    check_state(q);
    initial_ = q;
  }
  void set_accepting(StateId q, bool accepting = true) {
    check_state(q);
    accepting_[q] = accepting;
  }
  void add_transition(StateId from, Symbol symbol, StateId to) {
    check_state(from);
    check_state(to);
    check_symbol(symbol);
    StateId& slot = delta_[from * num_symbols() + symbol];
    if (slot != kNoTransition && slot != to)
      throw std::invalid_argument("nondeterministic transition from '" + state_names_[from] +
                                  "' on '" + symbol_names_[symbol] + "'");
    slot = to;
  }

  [[nodiscard]] int num_states() const { return static_cast<int>(state_names_.size()); }
  [[nodiscard]] int num_symbols() const { return static_cast<int>(symbol_names_.size()); }
  [[nodiscard]] StateId initial() const { return initial_; }
  [[nodiscard]] bool is_accepting(StateId q) const { return accepting_[q]; }
  [[nodiscard]] StateId next(StateId q, Symbol s) const { return delta_[q * num_symbols() + s]; }

  [[nodiscard]] const std::vector<std::string>& state_names() const { return state_names_; }
  [[nodiscard]] const std::vector<std::string>& alphabet() const { return symbol_names_; }

  [[nodiscard]] std::optional<StateId> state(const std::string& name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] std::optional<Symbol> symbol(const std::string& name) const {
    auto it = symbol_index_.find(name);
    if (it == symbol_index_.end()) return std::nullopt;
    return it->second;
  }

  // Interns a string of symbol names; throws on a symbol outside the alphabet.
  [[nodiscard]] std::vector<Symbol> encode(std::span<const std::string> word) const {
    std::vector<Symbol> out;
    out.reserve(word.size());
    for (const auto& w : word) {
      auto s = symbol(w);
      if (!s) throw std::invalid_argument("symbol '" + w + "' not in alphabet");
      out.push_back(*s);
    }
    return out;
  }

  // Encodes one character per symbol; convenient for single-letter alphabets.
  [[nodiscard]] std::vector<Symbol> encode_chars(const std::string& word) const {
    std::vector<std::string> parts;
    for (char c : word) parts.emplace_back(1, c);
    return encode(parts);
  }

  void check_symbol(Symbol s) const {
    if (s < 0 || s >= num_symbols()) throw std::invalid_argument("symbol code out of range");
  }

 private:
  void check_state(StateId q) const {
    if (q < 0 || q >= num_states()) throw std::invalid_argument("state id out of range");
  }

  std::vector<std::string> state_names_;
  std::vector<std::string> symbol_names_;
  std::vector<StateId> delta_;
  std::vector<bool> accepting_;
  StateId initial_ = 0;
  std::map<std::string, StateId> state_index_;
  std::map<std::string, Symbol> symbol_index_;
};

inline bool accepts(const Dfa& dfa, std::span<const Symbol> word) {
  StateId q = dfa.initial();
  for (Symbol s : word) {
    dfa.check_symbol(s);
    q = dfa.next(q, s);
    if (q == kNoTransition) return false;
  }
  return dfa.is_accepting(q);
}

inline constexpr Cost kNoDistance = std::numeric_limits<Cost>::max() / 4;

// min over words w in L(M) with |w| = |s| of the Hamming distance to s.
// nullopt when L(M) has no word of length |s|.
inline std::optional<Cost> hamming_to_language(const Dfa& dfa, std::span<const Symbol> word) {
  const int nq = dfa.num_states();
  std::vector<Cost> cur(nq, kNoDistance), nxt(nq);
  cur[dfa.initial()] = 0;
  for (Symbol target : word) {
    dfa.check_symbol(target);
    std::fill(nxt.begin(), nxt.end(), kNoDistance);
    for (StateId q = 0; q < nq; ++q) {
      if (cur[q] == kNoDistance) continue;
      for (Symbol s = 0; s < dfa.num_symbols(); ++s) {
        StateId r = dfa.next(q, s);
        if (r == kNoTransition) continue;
        nxt[r] = std::min(nxt[r], cur[q] + (s == target ? 0 : 1));
      }
    }
    std::swap(cur, nxt);
  }
  Cost best = kNoDistance;
  for (StateId q = 0; q < nq; ++q)
    if (dfa.is_accepting(q)) best = std::min(best, cur[q]);
  if (best == kNoDistance) return std::nullopt;
  return best;
}

struct EditWeights {
  Cost substitution = 1;
  Cost insertion = 1;
  Cost deletion = 1;

  void validate() const {
    if (substitution <= 0 || insertion <= 0 || deletion <= 0)
      throw std::invalid_argument("edit weights must be strictly positive");
  }
  friend bool operator==(const EditWeights&, const EditWeights&) = default;
};

// min over words w in L(M) of the weighted edit distance between s and w.
// Shortest path over nodes (position, state): consuming s[i] along a
// transition (match or substitution), deleting s[i], or inserting a symbol.
// nullopt when L(M) is empty.
inline std::optional<Cost> edit_to_language(const Dfa& dfa, std::span<const Symbol> word,
                                            const EditWeights& w = {}) {
  w.validate();
  for (Symbol s : word) dfa.check_symbol(s);
  const int nq = dfa.num_states();
  const int len = static_cast<int>(word.size());
  auto node = [nq](int pos, StateId q) { return pos * nq + q; };
  std::vector<Cost> dist((len + 1) * nq, kNoDistance);
  using Item = std::pair<Cost, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[node(0, dfa.initial())] = 0;
  heap.emplace(0, node(0, dfa.initial()));
  auto relax = [&](int to, Cost c) {
    if (c < dist[to]) {
      dist[to] = c;
      heap.emplace(c, to);
    }
  };
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d != dist[u]) continue;
    const int pos = u / nq;
    const StateId q = u % nq;
    if (pos == len && dfa.is_accepting(q)) return d;
    for (Symbol s = 0; s < dfa.num_symbols(); ++s) {
      StateId r = dfa.next(q, s);
      if (r == kNoTransition) continue;
      relax(node(pos, r), d + w.insertion);
      if (pos < len) relax(node(pos + 1, r), d + (s == word[pos] ? 0 : w.substitution));
    }
    if (pos < len) relax(node(pos + 1, q), d + w.deletion);
  }
  return std::nullopt;
}

}  // namespace softcp
