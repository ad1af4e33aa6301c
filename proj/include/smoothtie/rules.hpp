#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <sstream>
#include <type_traits>
#include <vector>

#include "preference.hpp"

namespace smoothtie {

/// Bitmask over alternatives 0..m-1.
using WinnerSet = AltMask;

inline std::vector<Alternative> members(AltMask mask) {
  std::vector<Alternative> out;
  for (int a = 0; mask >> a; ++a)
    if (mask >> a & 1) out.push_back(a);
  return out;
}

inline AltMask full_mask(int m) { return (AltMask{1} << m) - 1; }

inline std::string format_set(AltMask mask) {
  std::string s = "{";
  bool first = true;
  for (auto a : members(mask)) {
    if (!first) s += ',';
    s += std::to_string(a + 1);
    first = false;
  }
  return s + "}";
}

struct ScoringVector {
  std::vector<std::int64_t> s;

  ScoringVector() = default;
  explicit ScoringVector(std::vector<std::int64_t> v) : s(std::move(v)) {
    if (s.size() < 2) throw std::invalid_argument("scoring vector needs at least two entries");
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] > s[i - 1]) throw std::invalid_argument("scoring vector must be weakly decreasing");
    if (s.front() == s.back()) throw std::invalid_argument("scoring vector must not be constant");
  }
  int size() const { return static_cast<int>(s.size()); }
  std::int64_t operator[](int i) const { return s[i]; }
};

inline ScoringVector plurality_vector(int m) {
  std::vector<std::int64_t> v(m, 0);
  v[0] = 1;
  return ScoringVector(v);
}

inline ScoringVector veto_vector(int m) {
  std::vector<std::int64_t> v(m, 1);
  v[m - 1] = 0;
  return ScoringVector(v);
}

inline ScoringVector borda_vector(int m) {
  std::vector<std::int64_t> v(m);
  for (int i = 0; i < m; ++i) v[i] = m - 1 - i;
  return ScoringVector(v);
}

/// rounds[i] is the scoring vector used when i alternatives remain (i = 2..m).
struct MRSERule {
  int m = 0;
  std::vector<ScoringVector> rounds;

  const ScoringVector& round(int remaining) const { return rounds.at(remaining); }
};

enum class MRSEKind { STV, Coombs, Baldwin };

inline MRSERule make_mrse(MRSEKind kind, int m) {
  MRSERule r;
  r.m = m;
  r.rounds.resize(m + 1);
  for (int i = 2; i <= m; ++i) {
    switch (kind) {
      case MRSEKind::STV: r.rounds[i] = plurality_vector(i); break;
      case MRSEKind::Coombs: r.rounds[i] = veto_vector(i); break;
      case MRSEKind::Baldwin: r.rounds[i] = borda_vector(i); break;
    }
  }
  return r;
}

/// Tiers listed from top to bottom.
struct TotalPreorder {
  std::vector<std::vector<Alternative>> tiers;

  AltMask ground() const {
    AltMask g = 0;
    for (const auto& t : tiers)
      for (auto a : t) g |= AltMask{1} << a;
    return g;
  }
  int tier_of(Alternative a) const {
    for (std::size_t i = 0; i < tiers.size(); ++i)
      if (std::find(tiers[i].begin(), tiers[i].end(), a) != tiers[i].end()) return static_cast<int>(i);
    throw std::invalid_argument("alternative not in preorder");
  }
  bool strictly_above(Alternative a, Alternative b) const { return tier_of(a) < tier_of(b); }
  int ties() const {
    int s = 0;
    for (const auto& t : tiers) s += static_cast<int>(t.size()) - 1;
    return s;
  }
  bool operator==(const TotalPreorder&) const = default;
};

/// W(B) for every proper subset B, indexed by the bitmask of B.
struct PUTStructure {
  int m = 0;
  std::vector<TotalPreorder> w;

  const TotalPreorder& operator[](AltMask removed) const { return w.at(removed); }
  bool operator==(const PUTStructure&) const = default;

  void validate() const {
    if (static_cast<std::size_t>(1u << m) != w.size()) throw std::invalid_argument("PUT structure needs 2^m entries");
    for (AltMask b = 0; b + 1 < (AltMask{1} << m); ++b) {
      const auto& p = w[b];
      AltMask g = 0;
      for (const auto& t : p.tiers) {
        if (t.empty()) throw std::invalid_argument("empty tier in PUT structure");
        for (auto a : t) {
          if (g >> a & 1) throw std::invalid_argument("alternative repeated in W(B)");
          g |= AltMask{1} << a;
        }
      }
      if (g != (full_mask(m) & ~b)) throw std::invalid_argument("W(B) must cover exactly A \\ B");
    }
  }
};

// ---------------------------------------------------------------------------
// Rule identifiers.

enum class RuleFamily { Scoring, Copeland, Maximin, Schulze, RankedPairs, MRSE };

struct RuleSpec {
  std::string id;
  RuleFamily family = RuleFamily::Scoring;
  std::string scoring_name;  // plurality, borda, veto, or empty for explicit vectors
  std::vector<std::int64_t> explicit_vector;
  Rational alpha = 0;
  MRSEKind mrse = MRSEKind::STV;

  bool edge_order_based() const {
    return family == RuleFamily::Copeland || family == RuleFamily::Maximin || family == RuleFamily::Schulze ||
           family == RuleFamily::RankedPairs;
  }

  ScoringVector scoring_vector(int m) const {
    if (family != RuleFamily::Scoring) throw std::invalid_argument(id + " is not a positional scoring rule");
    if (scoring_name == "plurality") return plurality_vector(m);
    if (scoring_name == "borda") return borda_vector(m);
    if (scoring_name == "veto") return veto_vector(m);
    if (static_cast<int>(explicit_vector.size()) != m)
      throw std::invalid_argument("scoring vector length " + std::to_string(explicit_vector.size()) +
                                  " does not match m = " + std::to_string(m));
    return ScoringVector(explicit_vector);
  }

  MRSERule mrse_rule(int m) const {
    if (family != RuleFamily::MRSE) throw std::invalid_argument(id + " is not an elimination rule");
    return make_mrse(mrse, m);
  }
};

inline RuleSpec parse_rule(const std::string& id) {
  RuleSpec r;
  r.id = id;
  auto strip = [](std::string s) {
    if (!s.empty() && s.front() == '<' && s.back() == '>') s = s.substr(1, s.size() - 2);
    return s;
  };
  if (id == "plurality" || id == "borda" || id == "veto") {
    r.family = RuleFamily::Scoring;
    r.scoring_name = id;
  } else if (id.rfind("scoring:", 0) == 0) {
    r.family = RuleFamily::Scoring;
    std::stringstream ss(strip(id.substr(8)));
    std::string tok;
    while (std::getline(ss, tok, ',')) r.explicit_vector.push_back(std::stoll(tok));
    ScoringVector check(r.explicit_vector);
  } else if (id.rfind("copeland:", 0) == 0) {
    r.family = RuleFamily::Copeland;
    r.alpha = parse_rational(strip(id.substr(9)));
    if (r.alpha < 0 || r.alpha > 1) throw std::invalid_argument("Copeland alpha must lie in [0,1]");
  } else if (id == "maximin") {
    r.family = RuleFamily::Maximin;
  } else if (id == "schulze") {
    r.family = RuleFamily::Schulze;
  } else if (id == "rankedpairs") {
    r.family = RuleFamily::RankedPairs;
  } else if (id == "stv" || id == "coombs" || id == "baldwin") {
    r.family = RuleFamily::MRSE;
    r.mrse = id == "stv" ? MRSEKind::STV : id == "coombs" ? MRSEKind::Coombs : MRSEKind::Baldwin;
  } else {
    throw std::invalid_argument("unknown rule id '" + id + "'");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Helpers shared by integer and rational histograms.

template <typename T>
AltMask argmax_set(const std::vector<T>& scores, AltMask ground) {
  std::optional<T> best;
  AltMask out = 0;
  for (auto a : members(ground)) {
    if (!best || scores[a] > *best) {
      best = scores[a];
      out = AltMask{1} << a;
    } else if (scores[a] == *best) {
      out |= AltMask{1} << a;
    }
  }
  return out;
}

template <typename T>
std::vector<T> positional_scores(const std::vector<T>& weights, int m, const ScoringVector& s) {
  if (s.size() != m) throw std::invalid_argument("scoring vector length does not match the number of alternatives");
  const auto& table = ranking_table(m);
  if (weights.size() != table.size()) throw std::invalid_argument("weight vector length must be m!");
  std::vector<T> score(m, T(0));
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (weights[r] == 0) continue;
    for (int a = 0; a < m; ++a) score[a] += weights[r] * T(s[table.position[r][a]]);
  }
  return score;
}

template <typename T>
WinnerSet scoring_winners(const std::vector<T>& weights, int m, const ScoringVector& s) {
  return argmax_set(positional_scores(weights, m, s), full_mask(m));
}

inline WinnerSet scoring_winners(const Histogram& h, const ScoringVector& s) {
  return scoring_winners(h.counts, h.m, s);
}

template <typename T>
WinnerSet copeland_winners(const WeightedMajorityGraph<T>& g, const Rational& alpha) {
  if (alpha < 0 || alpha > 1) throw std::invalid_argument("Copeland alpha must lie in [0,1]");
  std::vector<Rational> score(g.m, Rational(0));
  for (int a = 0; a < g.m; ++a)
    for (int b = 0; b < g.m; ++b) {
      if (a == b) continue;
      if (g.w[a][b] > 0) score[a] += 1;
      else if (g.w[a][b] == 0) score[a] += alpha;
    }
  return argmax_set(score, full_mask(g.m));
}

inline WinnerSet copeland_winners(const Histogram& h, const Rational& alpha) {
  return copeland_winners(weighted_majority_graph(h), alpha);
}

template <typename T>
WinnerSet maximin_winners(const WeightedMajorityGraph<T>& g) {
  std::vector<T> score(g.m);
  for (int a = 0; a < g.m; ++a) {
    std::optional<T> low;
    for (int b = 0; b < g.m; ++b)
      if (a != b && (!low || g.w[a][b] < *low)) low = g.w[a][b];
    score[a] = *low;
  }
  return argmax_set(score, full_mask(g.m));
}

inline WinnerSet maximin_winners(const Histogram& h) { return maximin_winners(weighted_majority_graph(h)); }

/// Widest-path strengths over positive-weight edges; p[a][a] is unused.
template <typename T>
std::vector<std::vector<T>> schulze_strengths(const WeightedMajorityGraph<T>& g) {
  const int m = g.m;
  std::vector<std::vector<T>> p(m, std::vector<T>(m, T(0)));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && g.w[a][b] > 0) p[a][b] = g.w[a][b];
  for (int c = 0; c < m; ++c)
    for (int a = 0; a < m; ++a) {
      if (a == c) continue;
      for (int b = 0; b < m; ++b) {
        if (b == a || b == c) continue;
        T via = std::min(p[a][c], p[c][b]);
        if (via > p[a][b]) p[a][b] = via;
      }
    }
  return p;
}

template <typename T>
WinnerSet schulze_winners(const WeightedMajorityGraph<T>& g) {
  auto p = schulze_strengths(g);
  WinnerSet out = 0;
  for (int a = 0; a < g.m; ++a) {
    bool top = true;
    for (int b = 0; b < g.m && top; ++b)
      if (a != b && p[b][a] > p[a][b]) top = false;
    if (top) out |= AltMask{1} << a;
  }
  return out;
}

inline WinnerSet schulze_winners(const Histogram& h) { return schulze_winners(weighted_majority_graph(h)); }

namespace detail {

struct RankedPairsSearch {
  int m;
  std::vector<std::vector<Edge>> tiers;
  WinnerSet winners = 0;
  std::map<std::pair<int, std::uint64_t>, bool> visited;

  std::uint64_t bit(const Edge& e) const { return std::uint64_t{1} << (e.first * m + e.second); }

  bool reaches(std::uint64_t locked, Alternative from, Alternative to) const {
    std::uint32_t seen = 1u << from;
    std::vector<Alternative> stack{from};
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      if (x == to) return true;
      for (int y = 0; y < m; ++y)
        if ((locked >> (x * m + y) & 1) && !(seen >> y & 1)) {
          seen |= 1u << y;
          stack.push_back(y);
        }
    }
    return false;
  }

  // Explores every order of the edges of tier `ti`, `remaining` marks edges still unprocessed.
  void within_tier(int ti, std::uint32_t remaining, std::uint64_t locked,
                   std::set<std::pair<std::uint32_t, std::uint64_t>>& memo, std::set<std::uint64_t>& results) {
    if (!memo.insert({remaining, locked}).second) return;
    if (remaining == 0) {
      results.insert(locked);
      return;
    }
    const auto& tier = tiers[ti];
    for (std::size_t i = 0; i < tier.size(); ++i) {
      if (!(remaining >> i & 1)) continue;
      const auto& e = tier[i];
      std::uint64_t next = reaches(locked, e.second, e.first) ? locked : locked | bit(e);
      within_tier(ti, remaining & ~(1u << i), next, memo, results);
    }
  }

  void run(int ti, std::uint64_t locked) {
    if (!visited.emplace(std::make_pair(ti, locked), true).second) return;
    if (ti == static_cast<int>(tiers.size())) {
      for (int a = 0; a < m; ++a) {
        bool source = true;
        for (int b = 0; b < m && source; ++b)
          if (locked >> (b * m + a) & 1) source = false;
        if (source) winners |= AltMask{1} << a;
      }
      return;
    }
    std::set<std::pair<std::uint32_t, std::uint64_t>> memo;
    std::set<std::uint64_t> results;
    within_tier(ti, (1u << tiers[ti].size()) - 1, locked, memo, results);
    for (auto next : results) run(ti + 1, next);
  }
};

}  // namespace detail

/// Ranked pairs under parallel-universes tie-breaking. Zero-weight pairs are never fixed.
template <typename T>
WinnerSet ranked_pairs_winners(const WeightedMajorityGraph<T>& g) {
  if (g.m > kMaxHistogramAlternatives) throw std::invalid_argument("ranked pairs PUT supports at most 6 alternatives");
  std::vector<std::pair<T, Edge>> positive;
  for (int a = 0; a < g.m; ++a)
    for (int b = 0; b < g.m; ++b)
      if (a != b && g.w[a][b] > 0) positive.push_back({g.w[a][b], {a, b}});
  std::sort(positive.begin(), positive.end(),
            [](const auto& x, const auto& y) { return x.first != y.first ? x.first > y.first : x.second < y.second; });
  detail::RankedPairsSearch search{g.m, {}, 0, {}};
  for (std::size_t i = 0; i < positive.size(); ++i) {
    if (i == 0 || positive[i].first != positive[i - 1].first) search.tiers.emplace_back();
    search.tiers.back().push_back(positive[i].second);
  }
  search.run(0, 0);
  return search.winners;
}

inline WinnerSet ranked_pairs_winners(const Histogram& h) { return ranked_pairs_winners(weighted_majority_graph(h)); }

// ---------------------------------------------------------------------------
// Multi-round score-based elimination.

/// Round scores of the alternatives outside `removed`, using the scoring vector for |A \ B| alternatives.
template <typename T>
std::vector<T> round_scores(const std::vector<T>& weights, int m, AltMask removed, const MRSERule& rule) {
  const auto& table = ranking_table(m);
  const int remaining = m - popcount(removed);
  const auto& s = rule.round(remaining);
  std::vector<T> score(m, T(0));
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (weights[r] == 0) continue;
    int pos = 0;
    for (auto a : table.rankings[r]) {
      if (removed >> a & 1) continue;
      score[a] += weights[r] * T(s[pos]);
      ++pos;
    }
  }
  return score;
}

template <typename T>
PUTStructure put_structure(const std::vector<T>& weights, int m, const MRSERule& rule) {
  if (rule.m != m) throw std::invalid_argument("MRSE rule built for a different number of alternatives");
  PUTStructure w;
  w.m = m;
  w.w.resize(std::size_t{1} << m);
  for (AltMask b = 0; b + 1 < (AltMask{1} << m); ++b) {
    auto remaining = members(full_mask(m) & ~b);
    if (remaining.size() == 1) {
      w.w[b].tiers = {remaining};
      continue;
    }
    auto score = round_scores(weights, m, b, rule);
    std::sort(remaining.begin(), remaining.end(), [&](Alternative x, Alternative y) {
      return score[x] != score[y] ? score[x] > score[y] : x < y;
    });
    auto& tiers = w.w[b].tiers;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (i == 0 || score[remaining[i]] != score[remaining[i - 1]]) tiers.emplace_back();
      tiers.back().push_back(remaining[i]);
    }
  }
  return w;
}

inline PUTStructure put_structure(const Histogram& h, const MRSERule& rule) {
  return put_structure(h.counts, h.m, rule);
}

inline PUTStructure put_structure(const Profile& p, const MRSERule& rule) { return put_structure(histogram(p), rule); }

struct MajorComponent {
  std::vector<AltMask> nodes;  // sorted by size, then by mask
  WinnerSet winners = 0;
};

inline MajorComponent major_component(const PUTStructure& w) {
  const AltMask all = full_mask(w.m);
  std::vector<bool> reached(std::size_t{1} << w.m, false);
  std::queue<AltMask> queue;
  queue.push(0);
  reached[0] = true;
  while (!queue.empty()) {
    AltMask b = queue.front();
    queue.pop();
    if (popcount(b) >= w.m - 1) continue;
    for (auto a : w[b].tiers.back()) {
      AltMask next = b | (AltMask{1} << a);
      if (!reached[next]) {
        reached[next] = true;
        queue.push(next);
      }
    }
  }
  MajorComponent mc;
  for (AltMask b = 0; b < all; ++b)
    if (reached[b]) mc.nodes.push_back(b);
  std::sort(mc.nodes.begin(), mc.nodes.end(), [](AltMask x, AltMask y) {
    return popcount(x) != popcount(y) ? popcount(x) < popcount(y) : x < y;
  });
  for (int a = 0; a < w.m; ++a)
    if (reached[all & ~(AltMask{1} << a)]) mc.winners |= AltMask{1} << a;
  return mc;
}

inline WinnerSet mrse_winners(const Histogram& h, const MRSERule& rule) {
  return major_component(put_structure(h, rule)).winners;
}

inline WinnerSet mrse_winners(const Profile& p, const MRSERule& rule) { return mrse_winners(histogram(p), rule); }

inline int ties_count(const PalindromicOrder& o) { return o.ties(); }

inline int ties_count(const PUTStructure& w) {
  int s = 0;
  for (AltMask b = 0; b + 1 < (AltMask{1} << w.m); ++b) s += w[b].ties();
  return s;
}

inline bool refines(const TotalPreorder& p1, const TotalPreorder& p2) {
  for (std::size_t i = 0; i < p2.tiers.size(); ++i)
    for (std::size_t j = i + 1; j < p2.tiers.size(); ++j)
      for (auto a : p2.tiers[i])
        for (auto b : p2.tiers[j])
          if (!p1.strictly_above(a, b)) return false;
  return true;
}

inline bool refines(const PUTStructure& w1, const PUTStructure& w2) {
  if (w1.m != w2.m) throw std::invalid_argument("PUT structures over different alternative sets");
  for (AltMask b = 0; b + 1 < (AltMask{1} << w1.m); ++b)
    if (!refines(w1[b], w2[b])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Dispatch.

/// Integer weighted majority graph whose edge order is `o`: tier i gets weight t+1-i, the middle tier 0.
inline IntWMG representative_graph(const PalindromicOrder& o) {
  IntWMG g(o.m());
  const int t = o.t();
  for (int i = 0; i < t; ++i)
    for (const auto& e : o.upper_tiers()[i]) g.set(e.first, e.second, t - i);
  return g;
}

template <typename T>
WinnerSet edge_rule_winners(const RuleSpec& rule, const WeightedMajorityGraph<T>& g) {
  switch (rule.family) {
    case RuleFamily::Copeland: return copeland_winners(g, rule.alpha);
    case RuleFamily::Maximin: return maximin_winners(g);
    case RuleFamily::Schulze: return schulze_winners(g);
    case RuleFamily::RankedPairs: return ranked_pairs_winners(g);
    default: throw std::invalid_argument(rule.id + " is not an edge-order-based rule");
  }
}

inline WinnerSet eo_rule_winners(const RuleSpec& rule, const PalindromicOrder& o) {
  return edge_rule_winners(rule, representative_graph(o));
}

inline WinnerSet eo_rule_winners(const std::string& rule_id, const PalindromicOrder& o) {
  return eo_rule_winners(parse_rule(rule_id), o);
}

/// Winners of any supported rule on an integer or rational weight vector over the m! rankings.
template <typename T>
WinnerSet winners(const RuleSpec& rule, const std::vector<T>& weights, int m) {
  switch (rule.family) {
    case RuleFamily::Scoring: return scoring_winners(weights, m, rule.scoring_vector(m));
    case RuleFamily::MRSE: return major_component(put_structure(weights, m, rule.mrse_rule(m))).winners;
    default: break;
  }
  if constexpr (std::is_same_v<T, Rational>) {
    return edge_rule_winners(rule, weighted_majority_graph(weights, m));
  } else {
    return edge_rule_winners(rule, weighted_majority_graph(Histogram(m, weights)));
  }
}

inline WinnerSet winners(const RuleSpec& rule, const Histogram& h) {
  switch (rule.family) {
    case RuleFamily::Scoring: return scoring_winners(h, rule.scoring_vector(h.m));
    case RuleFamily::MRSE: return mrse_winners(h, rule.mrse_rule(h.m));
    default: return edge_rule_winners(rule, weighted_majority_graph(h));
  }
}

}  // namespace smoothtie
