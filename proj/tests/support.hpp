#pragma once

// Random instance generators and reference implementations used only by the
// test suites. None of this code is shared with the library.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "softcp/automaton.hpp"
#include "softcp/domain.hpp"
#include "softcp/flow_network.hpp"
#include "softcp/soft_gcc.hpp"

namespace support {

using softcp::Cost;
using softcp::Domain;
using softcp::Value;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 gen_;
};

// Nonempty random subset of [lo, hi].
inline Domain random_domain(Rng& rng, Value lo, Value hi, double density = 0.6) {
  std::vector<Value> vals;
  for (Value v = lo; v <= hi; ++v)
    if (rng.coin(density)) vals.push_back(v);
  if (vals.empty()) vals.push_back(lo + rng.uniform(0, static_cast<int>(hi - lo)));
  return Domain(std::move(vals));
}

inline std::vector<Domain> random_domains(Rng& rng, int n, Value lo, Value hi) {
  std::vector<Domain> out;
  for (int i = 0; i < n; ++i) out.push_back(random_domain(rng, lo, hi));
  return out;
}

// Random [l_d, u_d] per value; with `satisfiable`, sum l <= n <= sum u.
inline softcp::GccBounds random_bounds(Rng& rng, const std::vector<Value>& universe, int n,
                                       bool satisfiable, bool zero_lower = false) {
  for (int attempt = 0;; ++attempt) {
    softcp::GccBounds b;
    softcp::Count lo = 0, hi = 0;
    for (Value d : universe) {
      if (rng.coin(0.25)) continue;  // unconstrained value
      softcp::Count l = zero_lower ? 0 : rng.uniform(0, 2);
      softcp::Count u = rng.coin(0.15) ? softcp::kUnbounded : l + rng.uniform(0, 2);
      b.set(d, l, u);
    }
    for (Value d : universe) {
      lo += b.lower(d);
      hi = std::min<softcp::Count>(softcp::kUnbounded, hi + b.upper(d));
    }
    if (!satisfiable || (lo <= n && n <= hi) || attempt > 50) return b;
  }
}

inline softcp::Dfa random_dfa(Rng& rng, int max_states, int max_symbols, double density = 0.7) {
  int nq = rng.uniform(1, max_states);
  int ns = rng.uniform(1, max_symbols);
  softcp::Dfa dfa = softcp::Dfa::anonymous(nq, ns);
  dfa.set_initial(0);
  bool any = false;
  for (int q = 0; q < nq; ++q) {
    if (rng.coin(0.4)) {
      dfa.set_accepting(q);
      any = true;
    }
    for (int s = 0; s < ns; ++s)
      if (rng.coin(density)) dfa.add_transition(q, s, rng.uniform(0, nq - 1));
  }
  if (!any) dfa.set_accepting(rng.uniform(0, nq - 1));
  return dfa;
}

// Runs of a (symbol 0) and b (symbol 1) each of length exactly two.
inline softcp::Dfa stretch2_dfa() {
  softcp::Dfa dfa({"q0", "a1", "a2", "b1", "b2"}, {"a", "b"});
  dfa.set_initial(0);
  for (softcp::StateId q : {0, 2, 4}) dfa.set_accepting(q);
  dfa.add_transition(0, 0, 1);
  dfa.add_transition(0, 1, 3);
  dfa.add_transition(1, 0, 2);
  dfa.add_transition(2, 1, 3);
  dfa.add_transition(3, 1, 4);
  dfa.add_transition(4, 0, 1);
  return dfa;
}

// Accepts exactly the given word.
inline softcp::Dfa single_word_dfa(const std::vector<std::string>& alphabet,
                                   const std::vector<softcp::Symbol>& word) {
  std::vector<std::string> states;
  for (std::size_t i = 0; i <= word.size(); ++i) states.push_back("p" + std::to_string(i));
  softcp::Dfa dfa(states, alphabet);
  dfa.set_initial(0);
  dfa.set_accepting(static_cast<softcp::StateId>(word.size()));
  for (std::size_t i = 0; i < word.size(); ++i)
    dfa.add_transition(static_cast<int>(i), word[i], static_cast<int>(i + 1));
  return dfa;
}

// ---------------------------------------------------------------------------
// Brute-force min-cost flow: enumerate every integral arc-flow vector.

struct BruteFlow {
  std::optional<Cost> min_cost;
  // Min cost among flows with positive flow on each arc.
  std::vector<std::optional<Cost>> min_cost_using;
};

inline BruteFlow brute_force_flow(const softcp::flow::FlowNetwork& net,
                                  std::optional<softcp::flow::Amount> value) {
  const int m = net.num_arcs();
  BruteFlow out;
  out.min_cost_using.resize(m);
  std::vector<softcp::flow::Amount> f(m);
  for (int a = 0; a < m; ++a) f[a] = net.arc(a).demand;
  std::function<void(int)> rec = [&](int a) {
    if (a == m) {
      std::vector<softcp::flow::Amount> bal(net.num_vertices(), 0);
      Cost cost = 0;
      for (int e = 0; e < m; ++e) {
        bal[net.arc(e).tail] -= f[e];
        bal[net.arc(e).head] += f[e];
        cost += f[e] * net.arc(e).cost;
      }
      for (int v = 0; v < net.num_vertices(); ++v)
        if (v != net.source() && v != net.sink() && bal[v] != 0) return;
      if (bal[net.sink()] != -bal[net.source()]) return;
      if (value && bal[net.sink()] != *value) return;
      if (bal[net.sink()] < 0) return;
      if (!out.min_cost || cost < *out.min_cost) out.min_cost = cost;
      for (int e = 0; e < m; ++e)
        if (f[e] > 0 && (!out.min_cost_using[e] || cost < *out.min_cost_using[e]))
          out.min_cost_using[e] = cost;
      return;
    }
    for (softcp::flow::Amount x = net.arc(a).demand; x <= net.arc(a).capacity; ++x) {
      f[a] = x;
      rec(a + 1);
    }
    f[a] = net.arc(a).demand;
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Edit distance to a language by walking accepted words depth first. Each
// word prefix carries its Levenshtein row against `s`; a prefix is abandoned
// once the row minimum reaches the best distance found.

inline std::optional<Cost> levenshtein_to_language(const softcp::Dfa& dfa,
                                                   const std::vector<softcp::Symbol>& s,
                                                   const softcp::EditWeights& w = {}) {
  const int n = static_cast<int>(s.size());
  // Row r[j]: cost of turning s[0..j) into the current prefix.
  std::vector<Cost> row(n + 1);
  for (int j = 0; j <= n; ++j) row[j] = j * w.deletion;
  // Delete everything and spell the shortest accepted word: an upper bound
  // that also caps the useful word length at n + bound / insertion.
  std::vector<int> depth_of(dfa.num_states(), -1);
  std::vector<softcp::StateId> queue{dfa.initial()};
  depth_of[dfa.initial()] = 0;
  int shortest = -1;
  for (std::size_t k = 0; k < queue.size(); ++k) {
    softcp::StateId q = queue[k];
    if (dfa.is_accepting(q) && shortest < 0) shortest = depth_of[q];
    for (softcp::Symbol a = 0; a < dfa.num_symbols(); ++a)
      if (int t = dfa.next(q, a); t != softcp::kNoTransition && depth_of[t] < 0) {
        depth_of[t] = depth_of[q] + 1;
        queue.push_back(t);
      }
  }
  if (shortest < 0) return std::nullopt;
  Cost best = n * w.deletion + shortest * w.insertion;
  const int max_len = n + static_cast<int>(best / w.insertion);
  std::function<void(softcp::StateId, const std::vector<Cost>&, int)> walk =
      [&](softcp::StateId q, const std::vector<Cost>& r, int depth) {
        if (dfa.is_accepting(q)) best = std::min(best, r[n]);
        if (*std::min_element(r.begin(), r.end()) >= best || depth >= max_len) return;
        for (softcp::Symbol a = 0; a < dfa.num_symbols(); ++a) {
          softcp::StateId next = dfa.next(q, a);
          if (next == softcp::kNoTransition) continue;
          std::vector<Cost> nr(n + 1);
          nr[0] = r[0] + w.insertion;
          for (int j = 1; j <= n; ++j)
            nr[j] = std::min({r[j] + w.insertion, nr[j - 1] + w.deletion,
                              r[j - 1] + (s[j - 1] == a ? 0 : w.substitution)});
          walk(next, nr, depth + 1);
        }
      };
  walk(dfa.initial(), row, 0);
  return best;
}

// ---------------------------------------------------------------------------
// Hard regular filter: keep v in D_i when some state reachable after i
// symbols moves on v to a state from which acceptance is still possible.

inline std::optional<std::vector<Domain>> hard_regular_filter(const softcp::Dfa& dfa,
                                                             const std::vector<Domain>& doms) {
  const int n = static_cast<int>(doms.size());
  const int nq = dfa.num_states();
  std::vector<std::vector<bool>> reach(n + 1, std::vector<bool>(nq, false));
  std::vector<std::vector<bool>> alive(n + 1, std::vector<bool>(nq, false));
  reach[0][dfa.initial()] = true;
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < nq; ++q)
      if (reach[i][q])
        for (Value v : doms[i])
          if (int nxt = dfa.next(q, static_cast<int>(v)); nxt != softcp::kNoTransition)
            reach[i + 1][nxt] = true;
  for (int q = 0; q < nq; ++q) alive[n][q] = dfa.is_accepting(q);
  for (int i = n - 1; i >= 0; --i)
    for (int q = 0; q < nq; ++q)
      for (Value v : doms[i])
        if (int nxt = dfa.next(q, static_cast<int>(v)); nxt != softcp::kNoTransition && alive[i + 1][nxt])
          alive[i][q] = true;
  if (!alive[0][dfa.initial()]) return std::nullopt;
  std::vector<Domain> out;
  for (int i = 0; i < n; ++i) {
    std::vector<Value> keep;
    for (Value v : doms[i]) {
      bool ok = false;
      for (int q = 0; q < nq && !ok; ++q) {
        int nxt = dfa.next(q, static_cast<int>(v));
        ok = reach[i][q] && nxt != softcp::kNoTransition && alive[i + 1][nxt];
      }
      if (ok) keep.push_back(v);
    }
    out.emplace_back(std::move(keep));
  }
  return out;
}

}  // namespace support
