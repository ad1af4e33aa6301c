#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rational.hpp"

namespace smoothtie {

// Alternatives are 0-based internally and printed 1-based.
using Alternative = int;
using Ranking = std::vector<Alternative>;
using AltMask = std::uint32_t;

inline constexpr int kMaxHistogramAlternatives = 6;

inline int popcount(AltMask mask) { return __builtin_popcount(mask); }

inline std::int64_t factorial(int m) {
  std::int64_t f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

inline void check_histogram_size(int m) {
  if (m < 2 || m > kMaxHistogramAlternatives)
    throw std::invalid_argument("number of alternatives must be in [2, 6] for histogram-indexed structures, got " +
                                std::to_string(m));
}

/// All m! rankings of {0..m-1} in lexicographic order, with per-ranking position lookup.
struct RankingTable {
  int m = 0;
  std::vector<Ranking> rankings;
  // position[r][a] = 0-based rank of alternative a in ranking r
  std::vector<std::array<int, kMaxHistogramAlternatives>> position;

  std::size_t size() const { return rankings.size(); }

  std::size_t index_of(const Ranking& r) const {
    // Lehmer code gives the lexicographic index.
    std::size_t idx = 0;
    std::vector<bool> used(m, false);
    for (int i = 0; i < m; ++i) {
      int smaller = 0;
      for (int a = 0; a < r[i]; ++a)
        if (!used[a]) ++smaller;
      used[r[i]] = true;
      idx = idx * (m - i) + smaller;
    }
    return idx;
  }

  bool prefers(std::size_t r, Alternative a, Alternative b) const { return position[r][a] < position[r][b]; }
};

inline RankingTable build_ranking_table(int m) {
  RankingTable t;
  t.m = m;
  Ranking r(m);
  std::iota(r.begin(), r.end(), 0);
  do {
    t.rankings.push_back(r);
    std::array<int, kMaxHistogramAlternatives> pos{};
    for (int i = 0; i < m; ++i) pos[r[i]] = i;
    t.position.push_back(pos);
  } while (std::next_permutation(r.begin(), r.end()));
  return t;
}

inline const RankingTable& ranking_table(int m) {
  check_histogram_size(m);
  static const std::array<RankingTable, kMaxHistogramAlternatives + 1> tables = [] {
    std::array<RankingTable, kMaxHistogramAlternatives + 1> out;
    for (int k = 2; k <= kMaxHistogramAlternatives; ++k) out[k] = build_ranking_table(k);
    return out;
  }();
  return tables[m];
}

inline std::vector<Ranking> enumerate_rankings(int m) { return ranking_table(m).rankings; }

inline bool is_permutation_of(const Ranking& r, const std::vector<Alternative>& ground) {
  if (r.size() != ground.size()) return false;
  Ranking s = r;
  std::sort(s.begin(), s.end());
  return s == ground;
}

inline std::string format_ranking(const Ranking& r) {
  std::string out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += '>';
    out += std::to_string(r[i] + 1);
  }
  return out;
}

inline Ranking parse_ranking(const std::string& text) {
  Ranking r;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, '>')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) throw std::invalid_argument("empty alternative in ranking '" + text + "'");
    int a = std::stoi(tok);
    if (a < 1) throw std::invalid_argument("alternatives are positive integers: '" + text + "'");
    r.push_back(a - 1);
  }
  return r;
}

inline Ranking reversed(Ranking r) {
  std::reverse(r.begin(), r.end());
  return r;
}

struct WeightedRanking {
  Ranking ranking;
  Rational weight;
};

/// Multiset of weighted rankings over a ground set of alternatives.
/// Ordinary profiles carry positive integer weights; fractional profiles allow any rationals.
class Profile {
 public:
  Profile() = default;
  explicit Profile(int m) : alternatives_(m) { std::iota(alternatives_.begin(), alternatives_.end(), 0); }
  explicit Profile(std::vector<Alternative> ground) : alternatives_(std::move(ground)) {
    std::sort(alternatives_.begin(), alternatives_.end());
    if (std::adjacent_find(alternatives_.begin(), alternatives_.end()) != alternatives_.end())
      throw std::invalid_argument("duplicate alternative in ground set");
  }

  void add(Ranking r, Rational weight = 1) {
    if (!is_permutation_of(r, alternatives_))
      throw std::invalid_argument("ranking " + format_ranking(r) + " is not a permutation of the ground set");
    entries_.push_back({std::move(r), std::move(weight)});
  }

  int m() const { return static_cast<int>(alternatives_.size()); }
  const std::vector<Alternative>& alternatives() const { return alternatives_; }
  const std::vector<WeightedRanking>& entries() const { return entries_; }

  Rational total_weight() const {
    Rational s = 0;
    for (const auto& e : entries_) s += e.weight;
    return s;
  }

  bool is_ordinary() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const WeightedRanking& e) { return is_integer(e.weight) && e.weight >= 0; });
  }

  // Position of alternative a within the sorted ground set.
  int local_index(Alternative a) const {
    auto it = std::lower_bound(alternatives_.begin(), alternatives_.end(), a);
    if (it == alternatives_.end() || *it != a) throw std::invalid_argument("alternative not in ground set");
    return static_cast<int>(it - alternatives_.begin());
  }

 private:
  std::vector<Alternative> alternatives_;
  std::vector<WeightedRanking> entries_;
};

/// Anonymized integer profile: counts per ranking in canonical lexicographic order.
struct Histogram {
  int m = 0;
  IntVector counts;

  Histogram() = default;
  explicit Histogram(int m_) : m(m_), counts(factorial(m_), 0) { check_histogram_size(m_); }
  Histogram(int m_, IntVector c) : m(m_), counts(std::move(c)) {
    check_histogram_size(m_);
    if (static_cast<std::int64_t>(counts.size()) != factorial(m_))
      throw std::invalid_argument("histogram length must be m!");
    for (auto x : counts)
      if (x < 0) throw std::invalid_argument("histogram entries must be nonnegative");
  }

  std::int64_t n() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }
  bool operator==(const Histogram&) const = default;
};

namespace detail {
inline Ranking to_local(const Profile& p, const Ranking& r) {
  Ranking out;
  out.reserve(r.size());
  for (auto a : r) out.push_back(p.local_index(a));
  return out;
}
}  // namespace detail

inline Histogram histogram(const Profile& p) {
  Histogram h(p.m());
  const auto& table = ranking_table(p.m());
  for (const auto& e : p.entries()) {
    if (!is_integer(e.weight) || e.weight < 0)
      throw std::invalid_argument("histogram() requires nonnegative integer weights; use fractional_histogram()");
    h.counts[table.index_of(detail::to_local(p, e.ranking))] += to_int64(e.weight.get_num());
  }
  return h;
}

/// Rational weight vector of a (possibly fractional) profile in canonical order.
inline RationalVector fractional_histogram(const Profile& p) {
  const auto& table = ranking_table(p.m());
  RationalVector v(table.size(), Rational(0));
  for (const auto& e : p.entries()) v[table.index_of(detail::to_local(p, e.ranking))] += e.weight;
  return v;
}

inline Profile profile_of(const Histogram& h) {
  Profile p(h.m);
  const auto& table = ranking_table(h.m);
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    if (h.counts[i] > 0) p.add(table.rankings[i], Rational(static_cast<long>(h.counts[i])));
  return p;
}

/// Removes the alternatives in `removed`; remaining rankings keep their relative order and labels.
inline Profile restrict_profile(const Profile& p, const std::vector<Alternative>& removed) {
  std::vector<Alternative> keep;
  for (auto a : p.alternatives())
    if (std::find(removed.begin(), removed.end(), a) == removed.end()) keep.push_back(a);
  for (auto a : removed)
    if (std::find(p.alternatives().begin(), p.alternatives().end(), a) == p.alternatives().end())
      throw std::invalid_argument("removed alternative not in profile");
  if (keep.empty()) throw std::invalid_argument("cannot remove every alternative");
  Profile out(keep);
  for (const auto& e : p.entries()) {
    Ranking r;
    for (auto a : e.ranking)
      if (std::find(removed.begin(), removed.end(), a) == removed.end()) r.push_back(a);
    out.add(std::move(r), e.weight);
  }
  return out;
}

/// Antisymmetric weights w(a,b) = P[a > b] - P[b > a].
template <typename T>
struct WeightedMajorityGraph {
  int m = 0;
  std::vector<std::vector<T>> w;

  WeightedMajorityGraph() = default;
  explicit WeightedMajorityGraph(int m_) : m(m_), w(m_, std::vector<T>(m_, T(0))) {}

  const T& operator()(Alternative a, Alternative b) const { return w[a][b]; }
  void set(Alternative a, Alternative b, T value) {
    w[a][b] = value;
    w[b][a] = -value;
  }
  bool operator==(const WeightedMajorityGraph&) const = default;
};

using IntWMG = WeightedMajorityGraph<std::int64_t>;
using RationalWMG = WeightedMajorityGraph<Rational>;

inline std::int64_t pairwise_margin(const Histogram& h, Alternative a, Alternative b) {
  if (a == b) throw std::invalid_argument("pairwise_margin requires distinct alternatives");
  if (a < 0 || b < 0 || a >= h.m || b >= h.m) throw std::invalid_argument("alternative out of range");
  const auto& table = ranking_table(h.m);
  std::int64_t s = 0;
  for (std::size_t r = 0; r < h.counts.size(); ++r)
    s += table.prefers(r, a, b) ? h.counts[r] : -h.counts[r];
  return s;
}

inline IntWMG weighted_majority_graph(const Histogram& h) {
  IntWMG g(h.m);
  const auto& table = ranking_table(h.m);
  for (std::size_t r = 0; r < h.counts.size(); ++r) {
    const auto c = h.counts[r];
    if (c == 0) continue;
    const auto& rk = table.rankings[r];
    for (int i = 0; i < h.m; ++i)
      for (int j = i + 1; j < h.m; ++j) {
        g.w[rk[i]][rk[j]] += c;
        g.w[rk[j]][rk[i]] -= c;
      }
  }
  return g;
}

inline RationalWMG weighted_majority_graph(const RationalVector& fractional, int m) {
  const auto& table = ranking_table(m);
  if (fractional.size() != table.size()) throw std::invalid_argument("fractional histogram length must be m!");
  RationalWMG g(m);
  for (std::size_t r = 0; r < fractional.size(); ++r) {
    if (fractional[r] == 0) continue;
    const auto& rk = table.rankings[r];
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        g.w[rk[i]][rk[j]] += fractional[r];
        g.w[rk[j]][rk[i]] -= fractional[r];
      }
  }
  return g;
}

/// Edge a->b iff w(a,b) > 0; a and b are tied iff w(a,b) = 0.
struct UnweightedMajorityGraph {
  int m = 0;
  std::vector<std::vector<bool>> beats;

  bool tied(Alternative a, Alternative b) const { return a != b && !beats[a][b] && !beats[b][a]; }
};

template <typename T>
UnweightedMajorityGraph unweighted_majority_graph(const WeightedMajorityGraph<T>& g) {
  UnweightedMajorityGraph u{g.m, std::vector<std::vector<bool>>(g.m, std::vector<bool>(g.m, false))};
  for (int a = 0; a < g.m; ++a)
    for (int b = 0; b < g.m; ++b)
      if (a != b && g.w[a][b] > 0) u.beats[a][b] = true;
  return u;
}

inline UnweightedMajorityGraph unweighted_majority_graph(const Histogram& h) {
  return unweighted_majority_graph(weighted_majority_graph(h));
}

// ---------------------------------------------------------------------------
// Palindromic orders over ordered pairs of alternatives.

using Edge = std::pair<Alternative, Alternative>;

inline Edge flip(const Edge& e) { return {e.second, e.first}; }

/// Tier representation T_1 > ... > T_t > T_0 > T_{t+1} > ... > T_{2t}. Only the upper tiers and the
/// middle tier are stored; T_{2t+1-i} is the edgewise flip of T_i.
class PalindromicOrder {
 public:
  PalindromicOrder() = default;
  PalindromicOrder(int m, std::vector<std::vector<Edge>> upper, std::vector<Edge> middle)
      : m_(m), upper_(std::move(upper)), middle_(std::move(middle)) {
    validate();
    canonicalize();
  }

  int m() const { return m_; }
  const std::vector<std::vector<Edge>>& upper_tiers() const { return upper_; }
  const std::vector<Edge>& middle_tier() const { return middle_; }
  int t() const { return static_cast<int>(upper_.size()); }

  /// Level in the full order: 1..t for upper tiers, t+1 for T_0, t+2..2t+1 for lower tiers.
  int level(const Edge& e) const { return level_[e.first][e.second]; }
  bool above(const Edge& e1, const Edge& e2) const { return level(e1) < level(e2); }
  bool tied(const Edge& e1, const Edge& e2) const { return level(e1) == level(e2); }

  int ties() const {
    int s = 0;
    for (const auto& tier : upper_) s += static_cast<int>(tier.size()) - 1;
    return s + static_cast<int>(middle_.size()) / 2;
  }

  /// Full list of tiers in order, including the middle tier (possibly empty) and flipped lower tiers.
  std::vector<std::vector<Edge>> all_tiers() const {
    std::vector<std::vector<Edge>> out(upper_.begin(), upper_.end());
    out.push_back(middle_);
    for (auto it = upper_.rbegin(); it != upper_.rend(); ++it) {
      std::vector<Edge> f;
      for (const auto& e : *it) f.push_back(flip(e));
      std::sort(f.begin(), f.end());
      out.push_back(std::move(f));
    }
    return out;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b)
        if (a != b) out.emplace_back(a, b);
    return out;
  }

  bool operator==(const PalindromicOrder& o) const {
    return m_ == o.m_ && upper_ == o.upper_ && middle_ == o.middle_;
  }

 private:
  void validate() {
    if (m_ < 2) throw std::invalid_argument("palindromic order needs at least two alternatives");
    std::vector<std::vector<int>> seen(m_, std::vector<int>(m_, 0));
    auto mark = [&](const Edge& e) {
      if (e.first < 0 || e.second < 0 || e.first >= m_ || e.second >= m_ || e.first == e.second)
        throw std::invalid_argument("invalid edge in palindromic order");
      if (seen[e.first][e.second]++) throw std::invalid_argument("edge appears in more than one tier");
    };
    for (const auto& tier : upper_) {
      if (tier.empty()) throw std::invalid_argument("only the middle tier may be empty");
      for (const auto& e : tier) {
        mark(e);
        mark(flip(e));
      }
    }
    for (const auto& e : middle_) mark(e);
    for (const auto& e : middle_)
      if (std::find(middle_.begin(), middle_.end(), flip(e)) == middle_.end())
        throw std::invalid_argument("middle tier must be closed under flipping");
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b)
        if (a != b && seen[a][b] != 1) throw std::invalid_argument("every edge must appear in exactly one tier");
  }

  void canonicalize() {
    for (auto& tier : upper_) std::sort(tier.begin(), tier.end());
    std::sort(middle_.begin(), middle_.end());
    level_.assign(m_, std::vector<int>(m_, 0));
    const int t = this->t();
    for (int i = 0; i < t; ++i)
      for (const auto& e : upper_[i]) {
        level_[e.first][e.second] = i + 1;
        level_[e.second][e.first] = 2 * t + 1 - i;
      }
    for (const auto& e : middle_) level_[e.first][e.second] = t + 1;
  }

  int m_ = 0;
  std::vector<std::vector<Edge>> upper_;
  std::vector<Edge> middle_;
  std::vector<std::vector<int>> level_;
};

/// Groups edges by descending weight; weight-0 edges form the middle tier.
template <typename T>
PalindromicOrder edge_order(const WeightedMajorityGraph<T>& g) {
  std::vector<std::pair<T, Edge>> positive;
  std::vector<Edge> middle;
  for (int a = 0; a < g.m; ++a)
    for (int b = 0; b < g.m; ++b) {
      if (a == b) continue;
      if (g.w[a][b] != -g.w[b][a]) throw std::invalid_argument("weighted majority graph is not antisymmetric");
      if (g.w[a][b] > 0) positive.push_back({g.w[a][b], {a, b}});
      else if (g.w[a][b] == 0) middle.emplace_back(a, b);
    }
  std::sort(positive.begin(), positive.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<std::vector<Edge>> upper;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    if (i == 0 || positive[i].first != positive[i - 1].first) upper.emplace_back();
    upper.back().push_back(positive[i].second);
  }
  return PalindromicOrder(g.m, std::move(upper), std::move(middle));
}

inline PalindromicOrder edge_order(const Histogram& h) { return edge_order(weighted_majority_graph(h)); }

/// O1 refines O2 iff every strict relation of O2 also holds in O1.
inline bool refines(const PalindromicOrder& o1, const PalindromicOrder& o2) {
  if (o1.m() != o2.m()) throw std::invalid_argument("palindromic orders over different alternative sets");
  const auto edges = o1.edges();
  for (const auto& e1 : edges)
    for (const auto& e2 : edges)
      if (o2.above(e1, e2) && !o1.above(e1, e2)) return false;
  return true;
}

// Text form: "T1={(1,2),(1,3)}|T0={(2,3),(3,2)}|T2={(2,1),(3,1)}"; lower tiers are optional on input.
inline std::string format_order(const PalindromicOrder& o) {
  auto tier_str = [](const std::vector<Edge>& tier) {
    std::string s = "{";
    for (std::size_t i = 0; i < tier.size(); ++i) {
      if (i) s += ',';
      s += "(" + std::to_string(tier[i].first + 1) + "," + std::to_string(tier[i].second + 1) + ")";
    }
    return s + "}";
  };
  std::string out;
  const int t = o.t();
  for (int i = 0; i < t; ++i) out += "T" + std::to_string(i + 1) + "=" + tier_str(o.upper_tiers()[i]) + "|";
  out += "T0=" + tier_str(o.middle_tier());
  auto all = o.all_tiers();
  for (int i = 0; i < t; ++i) out += "|T" + std::to_string(t + i + 1) + "=" + tier_str(all[t + 1 + i]);
  return out;
}

inline PalindromicOrder parse_order(const std::string& text, int m) {
  std::vector<std::pair<int, std::vector<Edge>>> tiers;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '|')) {
    auto eq = part.find('=');
    if (eq == std::string::npos || part.find('T') == std::string::npos)
      throw std::invalid_argument("malformed tier '" + part + "'");
    int index = std::stoi(part.substr(part.find('T') + 1, eq - part.find('T') - 1));
    std::vector<Edge> edges;
    std::size_t pos = eq;
    while ((pos = part.find('(', pos)) != std::string::npos) {
      auto close = part.find(')', pos);
      auto comma = part.find(',', pos);
      if (close == std::string::npos || comma == std::string::npos || comma > close)
        throw std::invalid_argument("malformed edge in '" + part + "'");
      int a = std::stoi(part.substr(pos + 1, comma - pos - 1));
      int b = std::stoi(part.substr(comma + 1, close - comma - 1));
      edges.emplace_back(a - 1, b - 1);
      pos = close;
    }
    tiers.emplace_back(index, std::move(edges));
  }
  std::vector<Edge> middle;
  std::vector<std::pair<int, std::vector<Edge>>> upper;
  for (auto& [idx, edges] : tiers) {
    if (idx == 0) middle = edges;
    else upper.emplace_back(idx, edges);
  }
  std::sort(upper.begin(), upper.end());
  // Keep only T_1..T_t (lower tiers are implied); t is half the number of non-middle tiers when all are given.
  std::size_t t = upper.size();
  bool with_lower = t % 2 == 0 && t > 0;
  if (with_lower) {
    for (std::size_t i = 0; i < t / 2; ++i) {
      auto f = upper[i].second;
      for (auto& e : f) e = flip(e);
      std::sort(f.begin(), f.end());
      auto lower = upper[t - 1 - i].second;
      std::sort(lower.begin(), lower.end());
      if (f != lower) {
        with_lower = false;
        break;
      }
    }
  }
  std::vector<std::vector<Edge>> kept;
  for (std::size_t i = 0; i < (with_lower ? t / 2 : t); ++i) kept.push_back(upper[i].second);
  return PalindromicOrder(m, std::move(kept), std::move(middle));
}

// ---------------------------------------------------------------------------
// Text and JSON I/O.

/// Parses lines of the form "1>3>2: 4"; '#' starts a comment.
inline Profile parse_profile(const std::string& text) {
  std::vector<std::pair<Ranking, Rational>> rows;
  std::stringstream ss(text);
  std::string line;
  int m = -1;
  while (std::getline(ss, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("profile line missing ':' multiplicity: " + line);
    Ranking r = parse_ranking(line.substr(0, colon));
    Rational mult = parse_rational(line.substr(colon + 1));
    if (m < 0) m = static_cast<int>(r.size());
    if (static_cast<int>(r.size()) != m) throw std::invalid_argument("rankings of different lengths in profile");
    rows.emplace_back(std::move(r), std::move(mult));
  }
  if (m < 0) throw std::invalid_argument("profile has no rankings");
  Profile p(m);
  for (auto& [r, w] : rows) p.add(std::move(r), std::move(w));
  return p;
}

inline std::string format_profile(const Profile& p) {
  std::string out;
  for (const auto& e : p.entries()) out += format_ranking(e.ranking) + ": " + to_string(e.weight) + "\n";
  return out;
}

inline nlohmann::json histogram_to_json(const Histogram& h) { return {{"m", h.m}, {"counts", h.counts}}; }

inline Histogram histogram_from_json(const nlohmann::json& j) {
  return Histogram(j.at("m").get<int>(), j.at("counts").get<IntVector>());
}

}  // namespace smoothtie
