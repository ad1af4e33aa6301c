#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "construction.hpp"
#include "polyhedron.hpp"
#include "regime.hpp"
#include "rules.hpp"
#include "tie_polyhedra.hpp"

namespace smoothtie {

struct SuiteCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Cone dimensions at m = 3 for scoring ties, every palindromic order and STV PUT structures with Ties <= 2.
inline std::vector<SuiteCheck> dimension_suite() {
  std::vector<SuiteCheck> out;
  const int m = 3;
  const int q = static_cast<int>(factorial(m));
  for (const char* name : {"borda", "plurality", "veto"}) {
    const auto s = parse_rule(name).scoring_vector(m);
    int bad = 0, total = 0;
    for (AltMask T = 1; T <= full_mask(m); ++T) {
      ++total;
      if (cone_dimension(scoring_tie_polyhedron(s, T)) != q - popcount(T) + 1) ++bad;
    }
    out.push_back({std::string("scoring ties ") + name, bad == 0,
                   std::to_string(total - bad) + "/" + std::to_string(total) + " subsets"});
  }
  {
    int bad = 0, total = 0;
    enumerate_palindromic_orders(m, [&](const PalindromicOrder& o) {
      ++total;
      if (cone_dimension(palindromic_polyhedron(o)) != q - o.ties()) ++bad;
      return true;
    });
    out.push_back({"palindromic orders", bad == 0 && total == 147,
                   std::to_string(total - bad) + "/" + std::to_string(total) + " orders"});
  }
  {
    const auto stv = make_mrse(MRSEKind::STV, m);
    int bad = 0, total = 0;
    enumerate_put_structures(
        m,
        [&](const PUTStructure& w) {
          ++total;
          if (cone_dimension(put_polyhedron(w, stv)) != q - ties_count(w)) ++bad;
          return true;
        },
        2);
    out.push_back({"STV PUT structures, Ties <= 2", bad == 0 && total > 0,
                   std::to_string(total - bad) + "/" + std::to_string(total) + " structures"});
  }
  return out;
}

inline const std::vector<std::string>& table1_rules() {
  static const std::vector<std::string> rules{"borda",   "plurality", "veto", "maximin", "schulze",
                                              "copeland:1/2", "stv",    "coombs", "baldwin"};
  return rules;
}

/// Generic classifier against the closed forms over m = 3, k in {2, 3}, n in 30..36.
inline std::vector<SuiteCheck> table1_suite() {
  std::vector<SuiteCheck> out;
  for (const auto& rule : table1_rules()) {
    int agree = 0, total = 0;
    std::string first_miss;
    for (int k = 2; k <= 3; ++k)
      for (std::int64_t n = 30; n <= 36; ++n) {
        ++total;
        const auto cv = cross_validate(rule, 3, k, n);
        if (cv.agree) {
          ++agree;
        } else if (first_miss.empty()) {
          std::ostringstream os;
          os << "; first disagreement k=" << k << " n=" << n << " generic " << regime_to_json(cv.generic).dump()
             << " closed " << regime_to_json(cv.closed).dump();
          first_miss = os.str();
        }
      }
    out.push_back({rule, agree == total, std::to_string(agree) + "/" + std::to_string(total) + first_miss});
  }
  {
    const auto cv = cross_validate("rankedpairs", 3, 2, 100);
    out.push_back({"rankedpairs k=2", cv.agree, "closed form " + regime_to_json(cv.closed).dump()});
  }
  return out;
}

/// Random palindromic orders through mcgarvey_profile and random almost linear structures through stv_put_profile.
inline std::vector<SuiteCheck> construction_suite(std::uint64_t seed = 2024, int orders = 200, int structures = 50) {
  std::vector<SuiteCheck> out;
  std::mt19937_64 gen(seed);
  {
    const auto all = palindromic_orders(3);
    int bad = 0;
    for (int i = 0; i < orders; ++i) {
      const auto& o = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(gen)];
      std::int64_t n = std::uniform_int_distribution<std::int64_t>(81, 400)(gen);
      if (!o.middle_tier().empty() && n % 2 == 1) ++n;
      const auto p = mcgarvey_profile(o, n);
      const auto h = histogram(p);
      if (h.n() != n || !(edge_order(h) == o)) ++bad;
    }
    out.push_back({"edge orders via McGarvey", bad == 0,
                   std::to_string(orders - bad) + "/" + std::to_string(orders) + " round-trips"});
  }
  {
    int bad = 0;
    for (int i = 0; i < structures; ++i) {
      const int m = i % 5 == 4 ? 4 : 3;
      const auto w = random_almost_linear(m, gen);
      const auto bound = stv_construction_bound(m);
      const auto n = std::uniform_int_distribution<std::int64_t>(bound, 3 * bound)(gen);
      const auto p = stv_put_profile(w, n);
      const auto h = histogram(p);
      if (h.n() != n || !(put_structure(h, make_mrse(MRSEKind::STV, m)) == w)) ++bad;
    }
    out.push_back({"almost linear PUT structures under STV", bad == 0,
                   std::to_string(structures - bad) + "/" + std::to_string(structures) + " round-trips"});
  }
  return out;
}

inline std::vector<SuiteCheck> run_suite(const std::string& name) {
  if (name == "dimensions") return dimension_suite();
  if (name == "table1") return table1_suite();
  if (name == "constructions") return construction_suite();
  throw std::invalid_argument("unknown suite '" + name + "' (expected dimensions, table1 or constructions)");
}

}  // namespace smoothtie
