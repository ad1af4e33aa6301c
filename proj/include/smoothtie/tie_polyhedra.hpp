#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyhedron.hpp"
#include "preference.hpp"
#include "rules.hpp"

namespace smoothtie {

inline IntVector score_diff_vector(const ScoringVector& s, Alternative a, Alternative b) {
  if (a == b) throw std::invalid_argument("score difference needs distinct alternatives");
  const int m = s.size();
  const auto& table = ranking_table(m);
  IntVector v(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) v[r] = s[table.position[r][a]] - s[table.position[r][b]];
  return v;
}

inline IntVector pair_diff_vector(Alternative a, Alternative b, int m) {
  if (a == b) throw std::invalid_argument("pair vector needs distinct alternatives");
  const auto& table = ranking_table(m);
  IntVector v(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) v[r] = table.prefers(r, a, b) ? 1 : -1;
  return v;
}

inline IntVector operator-(const IntVector& x, const IntVector& y) {
  IntVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

/// Histograms whose scoring winners are exactly T.
inline Polyhedron scoring_tie_polyhedron(const ScoringVector& s, AltMask T) {
  const int m = s.size();
  if (T == 0 || (T & ~full_mask(m))) throw std::invalid_argument("winner set must be a nonempty subset of the alternatives");
  IntMatrix A;
  RationalVector b;
  for (auto x : members(T))
    for (auto y : members(T))
      if (x != y) {
        A.push_back(score_diff_vector(s, x, y));
        b.push_back(0);
      }
  for (auto x : members(full_mask(m) & ~T))
    for (auto y : members(T)) {
      A.push_back(score_diff_vector(s, x, y));
      b.push_back(-1);
    }
  if (A.empty()) {
    A.push_back(IntVector(factorial(m), 0));
    b.push_back(0);
  }
  return Polyhedron(static_cast<int>(factorial(m)), std::move(A), std::move(b));
}

/// Histograms whose edge order is exactly o. Ties are chained and strict rows join adjacent tiers,
/// which describes the same set as listing every pair of edges.
inline Polyhedron palindromic_polyhedron(const PalindromicOrder& o) {
  const int m = o.m();
  IntMatrix A;
  RationalVector b;
  const auto tiers = o.all_tiers();
  for (const auto& tier : tiers)
    for (std::size_t i = 0; i + 1 < tier.size(); ++i) {
      auto p = pair_diff_vector(tier[i].first, tier[i].second, m);
      auto q = pair_diff_vector(tier[i + 1].first, tier[i + 1].second, m);
      A.push_back(p - q);
      b.push_back(0);
      A.push_back(q - p);
      b.push_back(0);
    }
  std::vector<const std::vector<Edge>*> nonempty;
  for (const auto& tier : tiers)
    if (!tier.empty()) nonempty.push_back(&tier);
  for (std::size_t i = 0; i + 1 < nonempty.size(); ++i) {
    const auto& hi = nonempty[i]->front();
    const auto& lo = nonempty[i + 1]->front();
    A.push_back(pair_diff_vector(lo.first, lo.second, m) - pair_diff_vector(hi.first, hi.second, m));
    b.push_back(-1);
  }
  return Polyhedron(static_cast<int>(factorial(m)), std::move(A), std::move(b));
}

/// Per-ranking score difference between a and b in the round where B has been removed.
inline IntVector restricted_pair_vector(AltMask B, Alternative a, Alternative b, const MRSERule& rule) {
  const int m = rule.m;
  if (a == b) throw std::invalid_argument("restricted pair vector needs distinct alternatives");
  if ((B >> a & 1) || (B >> b & 1)) throw std::invalid_argument("a and b must not be removed");
  const auto& table = ranking_table(m);
  const auto& s = rule.round(m - popcount(B));
  IntVector v(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    int pos = 0, pa = 0, pb = 0;
    for (auto x : table.rankings[r]) {
      if (B >> x & 1) continue;
      if (x == a) pa = pos;
      if (x == b) pb = pos;
      ++pos;
    }
    v[r] = s[pa] - s[pb];
  }
  return v;
}

/// Histograms whose PUT structure under `rule` is exactly w.
inline Polyhedron put_polyhedron(const PUTStructure& w, const MRSERule& rule) {
  w.validate();
  if (w.m != rule.m) throw std::invalid_argument("PUT structure and rule disagree on m");
  IntMatrix A;
  RationalVector b;
  for (AltMask B = 0; B + 1 < (AltMask{1} << w.m); ++B) {
    const auto& tiers = w[B].tiers;
    for (const auto& tier : tiers)
      for (std::size_t i = 0; i + 1 < tier.size(); ++i) {
        A.push_back(restricted_pair_vector(B, tier[i + 1], tier[i], rule));
        b.push_back(0);
        A.push_back(restricted_pair_vector(B, tier[i], tier[i + 1], rule));
        b.push_back(0);
      }
    for (std::size_t i = 0; i + 1 < tiers.size(); ++i) {
      A.push_back(restricted_pair_vector(B, tiers[i + 1].front(), tiers[i].front(), rule));
      b.push_back(-1);
    }
  }
  if (A.empty()) {
    A.push_back(IntVector(factorial(w.m), 0));
    b.push_back(0);
  }
  return Polyhedron(static_cast<int>(factorial(w.m)), std::move(A), std::move(b));
}

/// sign -1: x.t <= -1, 0: x.t = 0, +1: -x.t <= -1.
inline Polyhedron gisr_signature_polyhedron(const IntMatrix& hyperplanes, const std::vector<int>& signs) {
  if (hyperplanes.size() != signs.size()) throw std::invalid_argument("one sign per hyperplane is required");
  if (hyperplanes.empty()) throw std::invalid_argument("at least one hyperplane is required");
  IntMatrix A;
  RationalVector b;
  const IntVector zero(hyperplanes.front().size(), 0);
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const auto& t = hyperplanes[i];
    if (signs[i] < 0) {
      A.push_back(t);
      b.push_back(-1);
    } else if (signs[i] == 0) {
      A.push_back(t);
      b.push_back(0);
      A.push_back(zero - t);
      b.push_back(0);
    } else {
      A.push_back(zero - t);
      b.push_back(-1);
    }
  }
  return Polyhedron(static_cast<int>(hyperplanes.front().size()), std::move(A), std::move(b));
}

// ---------------------------------------------------------------------------
// Enumeration.

namespace detail {

// Ordered set partitions of `items` with sum(|block|-1) <= budget.
template <typename T>
bool ordered_partitions(std::vector<T> items, int budget, std::vector<std::vector<T>>& prefix,
                        const std::function<bool(const std::vector<std::vector<T>>&)>& visit) {
  if (items.empty()) return visit(prefix);
  const std::size_t n = items.size();
  for (std::uint32_t sub = 1; sub < (1u << n); ++sub) {
    const int cost = __builtin_popcount(sub) - 1;
    if (cost > budget) continue;
    std::vector<T> block, rest;
    for (std::size_t i = 0; i < n; ++i) (sub >> i & 1 ? block : rest).push_back(items[i]);
    prefix.push_back(std::move(block));
    bool go = ordered_partitions(std::move(rest), budget - cost, prefix, visit);
    prefix.pop_back();
    if (!go) return false;
  }
  return true;
}

}  // namespace detail

inline constexpr int kMaxEnumerationAlternatives = 4;

/// Visits every palindromic order over m alternatives with Ties <= max_ties; stop by returning false.
inline void enumerate_palindromic_orders(int m, const std::function<bool(const PalindromicOrder&)>& visit,
                                         bool empty_middle_only = false, int max_ties = -1) {
  if (m < 2 || m > kMaxEnumerationAlternatives)
    throw std::invalid_argument("palindromic order enumeration supports 2 <= m <= 4");
  std::vector<Edge> pairs;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
  const int P = static_cast<int>(pairs.size());
  const int budget_all = max_ties < 0 ? P : max_ties;
  for (std::uint32_t mid = 0; mid < (1u << P); ++mid) {
    const int mid_pairs = __builtin_popcount(mid);
    if (empty_middle_only && mid_pairs) continue;
    if (mid_pairs > budget_all) continue;
    std::vector<Edge> middle, rest;
    for (int i = 0; i < P; ++i) {
      if (mid >> i & 1) {
        middle.push_back(pairs[i]);
        middle.push_back(flip(pairs[i]));
      } else {
        rest.push_back(pairs[i]);
      }
    }
    const int R = static_cast<int>(rest.size());
    for (std::uint32_t orient = 0; orient < (1u << R); ++orient) {
      std::vector<Edge> upper;
      for (int i = 0; i < R; ++i) upper.push_back(orient >> i & 1 ? flip(rest[i]) : rest[i]);
      std::vector<std::vector<Edge>> prefix;
      bool go = detail::ordered_partitions<Edge>(upper, budget_all - mid_pairs, prefix,
                                                 [&](const std::vector<std::vector<Edge>>& tiers) {
                                                   return visit(PalindromicOrder(m, tiers, middle));
                                                 });
      if (!go) return;
    }
  }
}

inline std::vector<PalindromicOrder> palindromic_orders(int m, bool empty_middle_only = false, int max_ties = -1) {
  std::vector<PalindromicOrder> out;
  enumerate_palindromic_orders(m, [&](const PalindromicOrder& o) {
    out.push_back(o);
    return true;
  }, empty_middle_only, max_ties);
  return out;
}

/// Visits every PUT structure over m alternatives with Ties <= max_ties.
inline void enumerate_put_structures(int m, const std::function<bool(const PUTStructure&)>& visit, int max_ties = -1) {
  if (m < 2 || m > kMaxEnumerationAlternatives) throw std::invalid_argument("PUT enumeration supports 2 <= m <= 4");
  if (m == 4 && max_ties < 0) throw std::invalid_argument("unbounded PUT enumeration is limited to m <= 3");
  const int budget = max_ties < 0 ? 1 << 20 : max_ties;
  PUTStructure w;
  w.m = m;
  w.w.resize(std::size_t{1} << m);
  std::vector<AltMask> nodes;
  for (AltMask B = 0; B + 1 < (AltMask{1} << m); ++B) {
    if (popcount(full_mask(m) & ~B) == 1) w.w[B].tiers = {members(full_mask(m) & ~B)};
    else nodes.push_back(B);
  }
  std::function<bool(std::size_t, int)> rec = [&](std::size_t idx, int left) -> bool {
    if (idx == nodes.size()) return visit(w);
    const AltMask B = nodes[idx];
    std::vector<std::vector<Alternative>> prefix;
    return detail::ordered_partitions<Alternative>(members(full_mask(m) & ~B), left, prefix,
                                                   [&](const std::vector<std::vector<Alternative>>& tiers) {
                                                     w.w[B].tiers = tiers;
                                                     int cost = 0;
                                                     for (const auto& t : tiers) cost += static_cast<int>(t.size()) - 1;
                                                     return rec(idx + 1, left - cost);
                                                   });
  };
  rec(0, budget);
}

inline std::string format_preorder(const TotalPreorder& p) {
  std::string s;
  for (std::size_t i = 0; i < p.tiers.size(); ++i) {
    if (i) s += '>';
    for (std::size_t j = 0; j < p.tiers[i].size(); ++j) {
      if (j) s += '=';
      s += std::to_string(p.tiers[i][j] + 1);
    }
  }
  return s;
}

inline std::string format_put(const PUTStructure& w) {
  std::string s;
  for (AltMask B = 0; B + 1 < (AltMask{1} << w.m); ++B) {
    if (popcount(full_mask(w.m) & ~B) < 2) continue;
    if (!s.empty()) s += '|';
    s += format_set(B) + ":" + format_preorder(w[B]);
  }
  return s;
}

namespace detail {

inline Alternative parse_alternative(const std::string& tok, int m) {
  std::size_t used = 0;
  int a = 0;
  try {
    a = std::stoi(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size() || a < 1 || a > m) throw std::invalid_argument("bad alternative '" + tok + "'");
  return a - 1;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// Inverse of format_preorder, e.g. "2>1=3".
inline TotalPreorder parse_preorder(const std::string& text, int m) {
  TotalPreorder p;
  for (const auto& tier : detail::split(text, '>')) {
    std::vector<Alternative> t;
    for (const auto& tok : detail::split(tier, '=')) t.push_back(detail::parse_alternative(tok, m));
    p.tiers.push_back(std::move(t));
  }
  return p;
}

/// Inverse of format_put; entries with a single remaining alternative may be omitted.
inline PUTStructure parse_put(const std::string& text, int m) {
  PUTStructure w;
  w.m = m;
  w.w.resize(std::size_t{1} << m);
  std::vector<bool> seen(w.w.size(), false);
  for (const auto& entry : detail::split(text, '|')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos || entry.size() < 2 || entry.front() != '{' || entry[colon - 1] != '}')
      throw std::invalid_argument("PUT entries look like {B}:preorder, got '" + entry + "'");
    AltMask B = 0;
    const auto inner = entry.substr(1, colon - 2);
    if (!inner.empty())
      for (const auto& tok : detail::split(inner, ',')) B |= AltMask{1} << detail::parse_alternative(tok, m);
    if (B + 1 >= (AltMask{1} << m)) throw std::invalid_argument("removed set must be proper");
    if (seen[B]) throw std::invalid_argument("duplicate PUT entry " + format_set(B));
    seen[B] = true;
    w.w[B] = parse_preorder(entry.substr(colon + 1), m);
  }
  for (AltMask B = 0; B + 1 < (AltMask{1} << m); ++B) {
    const auto rest = members(full_mask(m) & ~B);
    if (rest.size() == 1 && !seen[B]) w.w[B].tiers = {rest};
    else if (!seen[B]) throw std::invalid_argument("missing PUT entry " + format_set(B));
  }
  w.validate();
  return w;
}

// ---------------------------------------------------------------------------
// Tie events.

enum class ConstituentKind { WinnerSet, EdgeOrder, PUT };

struct Constituent {
  ConstituentKind kind = ConstituentKind::WinnerSet;
  std::string provenance;
  int ties = 0;               // |T|-1, Ties(O) or Ties(W)
  bool middle_empty = true;   // edge orders only
  std::function<Polyhedron()> build;

  int claimed_dimension(int q) const { return q - ties; }
};

struct TieEvent {
  std::string rule;
  int m = 0;
  int k = 0;
  std::vector<Constituent> constituents;
};

/// Does `rule` at (m, k) fall inside the enumeration guards of tie_event?
inline bool tie_event_supported(const RuleSpec& rule, int m) {
  switch (rule.family) {
    case RuleFamily::Scoring: return m >= 2 && m <= kMaxHistogramAlternatives;
    case RuleFamily::MRSE: return m == 3;
    default: return m >= 2 && m <= kMaxEnumerationAlternatives;
  }
}

/// Union of polyhedra whose integer points are exactly the n-histograms with |r(P)| = k.
/// Odd n drops edge orders with a nonempty middle tier, since every margin is odd.
inline TieEvent tie_event(const RuleSpec& rule, int m, int k, std::int64_t n, int max_ties = -1) {
  if (k < 1 || k > m) throw std::invalid_argument("k must lie in 1..m");
  if (!tie_event_supported(rule, m))
    throw std::invalid_argument("tie event for " + rule.id + " at m = " + std::to_string(m) + " exceeds the enumeration guard");
  TieEvent ev{rule.id, m, k, {}};
  if (rule.family == RuleFamily::Scoring) {
    const auto s = rule.scoring_vector(m);
    for (AltMask T = 1; T <= full_mask(m); ++T) {
      if (popcount(T) != k) continue;
      if (max_ties >= 0 && k - 1 > max_ties) continue;
      ev.constituents.push_back({ConstituentKind::WinnerSet, "T: " + format_set(T), k - 1, true,
                                 [s, T] { return scoring_tie_polyhedron(s, T); }});
    }
  } else if (rule.family == RuleFamily::MRSE) {
    const auto r = rule.mrse_rule(m);
    enumerate_put_structures(m, [&](const PUTStructure& w) {
      if (popcount(major_component(w).winners) == k)
        ev.constituents.push_back({ConstituentKind::PUT, "W: " + format_put(w), ties_count(w), true,
                                   [w, r] { return put_polyhedron(w, r); }});
      return true;
    }, max_ties);
  } else {
    enumerate_palindromic_orders(m, [&](const PalindromicOrder& o) {
      if (popcount(eo_rule_winners(rule, o)) == k)
        ev.constituents.push_back({ConstituentKind::EdgeOrder, "O: " + format_order(o), o.ties(), o.middle_tier().empty(),
                                   [o] { return palindromic_polyhedron(o); }});
      return true;
    }, n % 2 == 1, max_ties);
  }
  std::stable_sort(ev.constituents.begin(), ev.constituents.end(),
                   [](const Constituent& x, const Constituent& y) { return x.ties < y.ties; });
  return ev;
}

inline TieEvent tie_event(const std::string& rule_id, int m, int k, std::int64_t n, int max_ties = -1) {
  return tie_event(parse_rule(rule_id), m, k, n, max_ties);
}

inline nlohmann::json tie_event_to_json(const TieEvent& ev) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : ev.constituents) {
    auto j = polyhedron_to_json(c.build());
    j["provenance"] = c.provenance;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace smoothtie
