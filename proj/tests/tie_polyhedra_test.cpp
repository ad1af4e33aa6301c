#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "smoothtie/tie_polyhedra.hpp"

using namespace smoothtie;

namespace {

std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ordered set partitions of n items
std::int64_t fubini(int n) {
  std::vector<std::int64_t> f(n + 1, 0);
  f[0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j) f[i] += binomial(i, j) * f[i - j];
  return f[n];
}

// choose the tied pairs, orient the rest, then split the oriented edges into ordered tiers
std::int64_t palindromic_count(int m, bool empty_middle_only) {
  const int pairs = m * (m - 1) / 2;
  std::int64_t total = 0;
  for (int j = 0; j <= (empty_middle_only ? 0 : pairs); ++j) total += binomial(pairs, j) * (std::int64_t{1} << (pairs - j)) * fubini(pairs - j);
  return total;
}

// weak orders on l items counted by ties (sum of tier size minus one)
std::vector<std::int64_t> weak_orders_by_ties(int l) {
  std::vector<std::int64_t> out(l, 0);
  std::function<void(int, int)> rec = [&](int left, int ties) {
    if (left == 0) {
      ++out[ties];
      return;
    }
    for (int size = 1; size <= left; ++size)
      for (std::int64_t c = binomial(left, size); c > 0; --c) rec(left - size, ties + size - 1);
  };
  rec(l, 0);
  return out;
}

std::vector<std::int64_t> multiply(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::vector<std::int64_t> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

TEST(DifferenceVectors, PairVectorsAreAntisymmetricAndCountMargins) {
  std::mt19937_64 gen(2);
  for (int m = 3; m <= 4; ++m) {
    const auto counts = oracle::random_counts(m, 9, gen);
    const auto votes = oracle::expand(m, counts);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (a == b) continue;
        const auto v = pair_diff_vector(a, b, m);
        EXPECT_EQ(v, IntVector(v.size(), 0) - pair_diff_vector(b, a, m));
        std::int64_t dot = 0;
        for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * counts[i];
        EXPECT_EQ(dot, oracle::margin(votes, a, b));
      }
  }
  const auto v = pair_diff_vector(0, 1, 3);
  EXPECT_EQ(v[0] * 1 + v[1] * 1, 2);
}

TEST(DifferenceVectors, ScoreVectorsSumToZero) {
  for (int m = 3; m <= 5; ++m) {
    const auto s = borda_vector(m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (a == b) continue;
        const auto v = score_diff_vector(s, a, b);
        EXPECT_EQ(std::accumulate(v.begin(), v.end(), std::int64_t{0}), 0);
      }
  }
}

TEST(Membership, ScoringPolyhedronSelectsTheWinnerSet) {
  std::mt19937_64 gen(6);
  for (int m = 3; m <= 4; ++m)
    for (const char* id : {"plurality", "borda", "veto"}) {
      const auto s = parse_rule(id).scoring_vector(m);
      std::vector<Polyhedron> polys;
      for (AltMask T = 1; T <= full_mask(m); ++T) polys.push_back(scoring_tie_polyhedron(s, T));
      for (int trial = 0; trial < 60; ++trial) {
        const auto counts = oracle::random_counts(m, 1 + trial % 10, gen);
        const auto w = oracle::scoring(oracle::expand(m, counts), m, s.s);
        for (AltMask T = 1; T <= full_mask(m); ++T) EXPECT_EQ(polys[T - 1].contains(counts), T == w) << id;
      }
    }
}

TEST(Membership, PalindromicPolyhedronSelectsTheEdgeOrder) {
  std::mt19937_64 gen(7);
  const auto orders = palindromic_orders(3);
  std::vector<Polyhedron> polys;
  for (const auto& o : orders) polys.push_back(palindromic_polyhedron(o));
  for (int trial = 0; trial < 80; ++trial) {
    const auto counts = oracle::random_counts(3, 1 + trial % 12, gen);
    const auto eo = edge_order(Histogram(3, counts));
    int hits = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      EXPECT_EQ(polys[i].contains(counts), orders[i] == eo);
      hits += polys[i].contains(counts);
    }
    EXPECT_EQ(hits, 1);
  }
}

TEST(Membership, PUTPolyhedronSelectsTheStructure) {
  std::mt19937_64 gen(8);
  for (auto kind : {MRSEKind::STV, MRSEKind::Coombs, MRSEKind::Baldwin}) {
    const auto rule = make_mrse(kind, 3);
    std::vector<PUTStructure> all;
    enumerate_put_structures(3, [&](const PUTStructure& w) {
      all.push_back(w);
      return true;
    });
    std::vector<Polyhedron> polys;
    for (const auto& w : all) polys.push_back(put_polyhedron(w, rule));
    for (int trial = 0; trial < 40; ++trial) {
      const auto counts = oracle::random_counts(3, 1 + trial % 12, gen);
      const auto w = put_structure(Histogram(3, counts), rule);
      int hits = 0;
      for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(polys[i].contains(counts), all[i] == w);
        hits += polys[i].contains(counts);
      }
      EXPECT_EQ(hits, 1);
    }
  }
}

TEST(Enumeration, PalindromicOrderCounts) {
  for (int m = 2; m <= 4; ++m) {
    std::int64_t all = 0, empty = 0;
    enumerate_palindromic_orders(m, [&](const PalindromicOrder& o) {
      ++all;
      EXPECT_EQ(o.edges().size(), static_cast<std::size_t>(m * (m - 1)));
      return true;
    });
    enumerate_palindromic_orders(m, [&](const PalindromicOrder& o) {
      EXPECT_TRUE(o.middle_tier().empty());
      ++empty;
      return true;
    }, true);
    EXPECT_EQ(all, palindromic_count(m, false)) << m;
    EXPECT_EQ(empty, palindromic_count(m, true)) << m;
  }
  EXPECT_EQ(palindromic_count(3, false), 147);
  EXPECT_EQ(palindromic_count(3, true), 104);
}

TEST(Enumeration, OrdersRespectTheTiesBudget) {
  std::int64_t count = 0;
  enumerate_palindromic_orders(3, [&](const PalindromicOrder& o) {
    EXPECT_LE(o.ties(), 1);
    ++count;
    return true;
  }, false, 1);
  std::int64_t direct = 0;
  for (const auto& o : palindromic_orders(3)) direct += o.ties() <= 1;
  EXPECT_EQ(count, direct);
}

TEST(Enumeration, PUTStructureCountsByTies) {
  // one weak order on three alternatives at the root and on two alternatives at each singleton
  auto gen = weak_orders_by_ties(3);
  for (int i = 0; i < 3; ++i) gen = multiply(gen, weak_orders_by_ties(2));
  std::int64_t all = 0, cheap = 0;
  for (std::size_t t = 0; t < gen.size(); ++t) {
    all += gen[t];
    if (t <= 2) cheap += gen[t];
  }
  std::int64_t seen = 0, seen_cheap = 0;
  enumerate_put_structures(3, [&](const PUTStructure& w) {
    ++seen;
    return true;
  });
  enumerate_put_structures(3, [&](const PUTStructure& w) {
    EXPECT_LE(ties_count(w), 2);
    ++seen_cheap;
    return true;
  }, 2);
  EXPECT_EQ(seen, all);
  EXPECT_EQ(seen, 351);
  EXPECT_EQ(seen_cheap, cheap);
}

TEST(DimensionLaw, ScoringTiesOnThreeAndFour) {
  for (int m = 3; m <= 4; ++m)
    for (const char* id : {"plurality", "borda", "veto"}) {
      const auto s = parse_rule(id).scoring_vector(m);
      for (AltMask T = 1; T <= full_mask(m); ++T)
        EXPECT_EQ(cone_dimension(scoring_tie_polyhedron(s, T)), factorial(m) - popcount(T) + 1) << id << " " << format_set(T);
    }
}

TEST(DimensionLaw, EveryPalindromicOrderOnThree) {
  for (const auto& o : palindromic_orders(3)) EXPECT_EQ(cone_dimension(palindromic_polyhedron(o)), 6 - o.ties()) << format_order(o);
}

TEST(DimensionLaw, SampledPalindromicOrdersOnFour) {
  std::int64_t i = 0;
  int checked = 0;
  enumerate_palindromic_orders(4, [&](const PalindromicOrder& o) {
    if (i++ % 7919 == 0) {
      EXPECT_EQ(cone_dimension(palindromic_polyhedron(o)), 24 - o.ties()) << format_order(o);
      ++checked;
    }
    return true;
  });
  EXPECT_GT(checked, 40);
}

TEST(DimensionLaw, STVStructuresWithFewTies) {
  const auto stv = make_mrse(MRSEKind::STV, 3);
  enumerate_put_structures(3, [&](const PUTStructure& w) {
    EXPECT_EQ(cone_dimension(put_polyhedron(w, stv)), 6 - ties_count(w)) << format_put(w);
    return true;
  }, 2);
}

TEST(PUTText, RoundTripAndErrors) {
  enumerate_put_structures(3, [&](const PUTStructure& w) {
    EXPECT_EQ(parse_put(format_put(w), 3), w);
    return true;
  });
  EXPECT_THROW(parse_put("{}:1>2>3", 3), std::invalid_argument);
  EXPECT_THROW(parse_put("{}:1>2|{1}:2>3|{2}:1>3|{3}:1>2", 3), std::invalid_argument);
  EXPECT_THROW(parse_preorder("1>4", 3), std::invalid_argument);
}

class TieEventCoversExactlyKWinners : public ::testing::TestWithParam<std::string> {};

TEST_P(TieEventCoversExactlyKWinners, RandomHistograms) {
  const auto rule = parse_rule(GetParam());
  std::mt19937_64 gen(std::hash<std::string>{}(GetParam()));
  for (std::int64_t n : {7, 8})
    for (int k = 1; k <= 3; ++k) {
      const auto ev = tie_event(rule, 3, k, n);
      std::vector<Polyhedron> polys;
      for (const auto& c : ev.constituents) polys.push_back(c.build());
      for (std::size_t i = 1; i < ev.constituents.size(); ++i)
        EXPECT_LE(ev.constituents[i - 1].ties, ev.constituents[i].ties);
      for (int trial = 0; trial < 30; ++trial) {
        const auto counts = oracle::random_counts(3, static_cast<int>(n), gen);
        bool inside = false;
        for (const auto& p : polys) inside = inside || p.contains(counts);
        EXPECT_EQ(inside, popcount(winners(rule, Histogram(3, counts))) == k) << GetParam() << " k=" << k << " n=" << n;
      }
    }
}

INSTANTIATE_TEST_SUITE_P(Rules, TieEventCoversExactlyKWinners,
                         ::testing::Values("plurality", "borda", "veto", "copeland:1/2", "maximin", "schulze",
                                           "rankedpairs", "stv", "coombs", "baldwin"));

TEST(TieEvent, JsonCarriesProvenance) {
  const auto j = tie_event_to_json(tie_event("borda", 3, 2, 10));
  ASSERT_EQ(j.size(), 3u);
  for (const auto& p : j) {
    EXPECT_EQ(p["q"], 6);
    EXPECT_EQ(p["provenance"].get<std::string>().rfind("T: ", 0), 0u);
  }
}

TEST(TieEvent, GuardsAreEnforced) {
  EXPECT_THROW(tie_event("maximin", 5, 2, 10), std::invalid_argument);
  EXPECT_THROW(tie_event("stv", 4, 2, 10), std::invalid_argument);
  EXPECT_THROW(tie_event("borda", 3, 4, 10), std::invalid_argument);
}

TEST(GISR, SignaturePolyhedron) {
  const auto h = gisr_signature_polyhedron({{1, -1}, {0, 1}}, {0, 1});
  EXPECT_TRUE(h.contains(IntVector{2, 2}));
  EXPECT_FALSE(h.contains(IntVector{0, 0}));
  EXPECT_FALSE(h.contains(IntVector{2, 1}));
  EXPECT_THROW(gisr_signature_polyhedron({{1, 0}}, {0, 1}), std::invalid_argument);
}
