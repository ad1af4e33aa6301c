#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "preference.hpp"
#include "rules.hpp"

namespace smoothtie {

namespace detail {

// [a, b, rest...] and [rest reversed..., a, b]: together they add 2 to w(a,b) and nothing elsewhere.
inline void add_mcgarvey_pair(Profile& p, Alternative a, Alternative b, std::int64_t copies) {
  if (copies <= 0) return;
  const int m = p.m();
  Ranking first{a, b}, second;
  for (int x = 0; x < m; ++x)
    if (x != a && x != b) first.push_back(x);
  for (int i = m - 1; i >= 2; --i) second.push_back(first[i]);
  second.push_back(a);
  second.push_back(b);
  p.add(first, copies);
  p.add(second, copies);
}

inline std::int64_t pow4(int m) { return static_cast<std::int64_t>(m) * m * m * m; }

}  // namespace detail

/// n-profile whose edge order is `target`. Even n: tier i gets weight 2(t+1-i); odd n: 2(t-i)+1.
inline Profile mcgarvey_profile(const PalindromicOrder& target, std::int64_t n) {
  const int m = target.m();
  if (n < detail::pow4(m))
    throw std::invalid_argument("n = " + std::to_string(n) + " is below the proven bound m^4 = " +
                                std::to_string(detail::pow4(m)));
  const bool odd = n % 2 == 1;
  if (odd && !target.middle_tier().empty())
    throw std::invalid_argument("odd n forces every margin to be odd, so the middle tier must be empty");
  const int t = target.t();
  Profile p(m);
  Ranking identity(m);
  std::iota(identity.begin(), identity.end(), 0);
  std::int64_t used = 0;
  if (odd) {
    p.add(identity, 1);
    used = 1;
  }
  for (int i = 0; i < t; ++i) {
    const std::int64_t weight = odd ? 2 * (t - 1 - i) + 1 : 2 * (t - i);
    for (const auto& e : target.upper_tiers()[i]) {
      std::int64_t current = 0;
      if (odd) current = e.first < e.second ? 1 : -1;
      const std::int64_t pairs = (weight - current) / 2;
      detail::add_mcgarvey_pair(p, e.first, e.second, pairs);
      used += 2 * pairs;
    }
  }
  if (used > n || (n - used) % 2 != 0)
    throw std::invalid_argument("n is too small for the base construction");
  const std::int64_t pad = (n - used) / 2;
  if (pad > 0) {
    p.add(identity, pad);
    p.add(reversed(identity), pad);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Almost linear PUT structures under STV.

/// Every W(B) with at least two alternatives has at least two tiers and only the bottom tier may be tied.
inline bool almost_linear(const PUTStructure& w) {
  for (AltMask B = 0; B + 1 < (AltMask{1} << w.m); ++B) {
    if (popcount(full_mask(w.m) & ~B) < 2) continue;
    const auto& tiers = w[B].tiers;
    if (tiers.size() < 2) return false;
    for (std::size_t i = 0; i + 1 < tiers.size(); ++i)
      if (tiers[i].size() != 1) return false;
  }
  return true;
}

/// Uniformly shuffled linear order per W(B) with a random bottom tier of size 1..|A \ B|-1.
template <class URBG>
PUTStructure random_almost_linear(int m, URBG& gen) {
  PUTStructure w;
  w.m = m;
  w.w.resize(std::size_t{1} << m);
  for (AltMask B = 0; B + 1 < (AltMask{1} << m); ++B) {
    auto rest = members(full_mask(m) & ~B);
    std::shuffle(rest.begin(), rest.end(), gen);
    const int l = static_cast<int>(rest.size());
    if (l == 1) {
      w.w[B].tiers = {rest};
      continue;
    }
    const int bottom = std::uniform_int_distribution<int>(1, l - 1)(gen);
    auto& tiers = w.w[B].tiers;
    for (int i = 0; i < l - bottom; ++i) tiers.push_back({rest[i]});
    std::vector<Alternative> last(rest.begin() + (l - bottom), rest.end());
    std::sort(last.begin(), last.end());
    tiers.push_back(last);
  }
  return w;
}

inline std::int64_t stv_construction_bound(int m) {
  const std::int64_t f = factorial(m);
  return (std::int64_t{1} << m) * f * (f + static_cast<std::int64_t>(m) * m);
}

namespace detail {

// Rankings of L(A) with B removed first: "B' > x > y > T", with B' and T in increasing order.
inline Ranking block_ranking(int m, AltMask Bp, Alternative x, Alternative y) {
  Ranking r;
  for (auto a : members(Bp)) r.push_back(a);
  r.push_back(x);
  r.push_back(y);
  for (int a = 0; a < m; ++a)
    if (!(Bp >> a & 1) && a != x && a != y) r.push_back(a);
  return r;
}

/// Histogram of the m!-profile that moves one plurality point from b to a after B is removed, and nowhere else.
inline IntVector stv_block(int m, AltMask B, Alternative a, Alternative b) {
  const auto& table = ranking_table(m);
  IntVector counts(table.size(), 1);
  const AltMask free = full_mask(m) & ~B & ~(AltMask{1} << a) & ~(AltMask{1} << b);
  // enumerate B' = B + S for every S subset of `free`
  for (AltMask S = free;; S = (S - 1) & free) {
    const AltMask Bp = B | S;
    const bool even = popcount(S) % 2 == 0;
    const Ranking from = even ? block_ranking(m, Bp, b, a) : block_ranking(m, Bp, a, b);
    const Ranking to = even ? block_ranking(m, Bp, a, b) : block_ranking(m, Bp, b, a);
    counts[table.index_of(from)] -= 1;
    counts[table.index_of(to)] += 1;
    if (S == 0) break;
  }
  return counts;
}

}  // namespace detail

/// n-profile whose PUT structure under STV is `target`.
inline Profile stv_put_profile(const PUTStructure& target, std::int64_t n) {
  target.validate();
  const int m = target.m;
  if (!almost_linear(target)) throw std::invalid_argument("target PUT structure is not almost linear");
  if (n < stv_construction_bound(m))
    throw std::invalid_argument("n = " + std::to_string(n) + " is below the construction bound " +
                                std::to_string(stv_construction_bound(m)));
  const auto& table = ranking_table(m);
  const std::int64_t f = factorial(m);
  const std::int64_t r = n % f;
  const std::int64_t groups = n / f;
  IntVector hist(table.size(), 0);
  for (std::int64_t i = 0; i < r; ++i) hist[i] += 1;

  const auto stv = make_mrse(MRSEKind::STV, m);
  std::int64_t blocks = 0;
  for (AltMask B = 0; B + 1 < (AltMask{1} << m); ++B) {
    const auto remaining = members(full_mask(m) & ~B);
    const int l = static_cast<int>(remaining.size());
    if (l < 2) continue;
    // current scores: the r leading votes plus `groups` copies of L(A), which add the same amount to everyone
    auto score = round_scores(hist, m, B, stv);
    const auto& tiers = target[B].tiers;
    const int u = static_cast<int>(tiers.size()) - 1;  // singleton tiers above the bottom tier
    std::int64_t S = 0;
    for (auto a : remaining) S += score[a];
    const std::int64_t L = (S - static_cast<std::int64_t>(u) * (u + 1) / 2) >= 0
                               ? (S - static_cast<std::int64_t>(u) * (u + 1) / 2) / l
                               : -((static_cast<std::int64_t>(u) * (u + 1) / 2 - S + l - 1) / l);
    std::vector<std::int64_t> want(m, 0);
    std::int64_t assigned = 0;
    for (int i = 0; i < u; ++i) {
      want[tiers[i].front()] = L + (u - i);
      assigned += L + (u - i);
    }
    for (auto a : tiers.back()) {
      want[a] = L;
      assigned += L;
    }
    want[tiers.front().front()] += S - assigned;
    std::vector<std::int64_t> diff(m, 0);
    for (auto a : remaining) diff[a] = want[a] - score[a];
    for (auto a : remaining) {
      while (diff[a] > 0) {
        Alternative donor = -1;
        for (auto b : remaining)
          if (diff[b] < 0) {
            donor = b;
            break;
          }
        auto block = detail::stv_block(m, B, a, donor);
        for (std::size_t i = 0; i < block.size(); ++i) hist[i] += block[i] - 1;
        ++diff[donor];
        --diff[a];
        ++blocks;
      }
    }
  }
  if (blocks > groups) throw std::invalid_argument("n is too small for the required adjustments");
  for (auto& x : hist) x += groups;
  for (auto x : hist)
    if (x < 0) throw std::logic_error("construction produced a negative count");
  return profile_of(Histogram(m, hist));
}

}  // namespace smoothtie
