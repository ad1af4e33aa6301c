#include <gtest/gtest.h>

#include <random>

#include "smoothtie/lp.hpp"
#include "smoothtie/polyhedron.hpp"

using namespace smoothtie;

namespace {

// Fourier-Motzkin on rows (coeffs, rhs) meaning coeffs . x <= rhs.
bool fm_feasible(std::vector<std::pair<RationalVector, Rational>> rows, std::size_t q) {
  for (std::size_t v = 0; v < q; ++v) {
    std::vector<std::pair<RationalVector, Rational>> pos, neg, keep;
    for (auto& r : rows) {
      if (r.first[v] > 0) pos.push_back(r);
      else if (r.first[v] < 0) neg.push_back(r);
      else keep.push_back(r);
    }
    for (const auto& p : pos)
      for (const auto& n : neg) {
        const Rational a = p.first[v], b = -n.first[v];
        RationalVector c(q);
        for (std::size_t j = 0; j < q; ++j) c[j] = p.first[j] * b + n.first[j] * a;
        keep.push_back({c, p.second * b + n.second * a});
      }
    rows = std::move(keep);
  }
  for (const auto& r : rows)
    if (r.second < 0) return false;
  return true;
}

std::vector<std::pair<RationalVector, Rational>> as_rows(const std::vector<LinearConstraint>& cons) {
  std::vector<std::pair<RationalVector, Rational>> rows;
  for (const auto& c : cons) {
    RationalVector neg;
    for (const auto& x : c.coeffs) neg.push_back(-x);
    if (c.rel != Relation::GreaterEq) rows.push_back({c.coeffs, c.rhs});
    if (c.rel != Relation::LessEq) rows.push_back({neg, -c.rhs});
  }
  return rows;
}

int rank_by_elimination(RationalMatrix M) {
  int rank = 0;
  const std::size_t cols = M.empty() ? 0 : M[0].size();
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t p = rank;
    while (p < M.size() && M[p][c] == 0) ++p;
    if (p == M.size()) continue;
    std::swap(M[p], M[rank]);
    for (std::size_t r = 0; r < M.size(); ++r)
      if (r != static_cast<std::size_t>(rank) && M[r][c] != 0) {
        const Rational f = M[r][c] / M[rank][c];
        for (std::size_t j = 0; j < cols; ++j) M[r][j] -= f * M[rank][j];
      }
    ++rank;
  }
  return rank;
}

int dimension_oracle(const IntMatrix& A, int q) {
  RationalMatrix eq;
  for (std::size_t i = 0; i < A.size(); ++i) {
    std::vector<std::pair<RationalVector, Rational>> rows;
    for (const auto& r : A) rows.push_back({to_rational(r), 0});
    rows.push_back({to_rational(A[i]), -1});
    if (!fm_feasible(rows, q)) eq.push_back(to_rational(A[i]));
  }
  return q - rank_by_elimination(eq);
}

IntMatrix random_matrix(std::mt19937_64& gen, int rows, int q) {
  std::uniform_int_distribution<int> coef(-2, 2);
  IntMatrix A(rows, IntVector(q));
  for (auto& r : A)
    for (auto& x : r) x = coef(gen);
  return A;
}

const Polyhedron kCrossing(2, {{-3, 4}, {1, -2}}, {1, 1});
const Polyhedron kWedge(2, {{-1, 1}, {1, -2}, {0, -1}}, {ratio(-7, 10), 1, ratio(1, 10)});

}  // namespace

TEST(LinearProgram, SmallCases) {
  EXPECT_FALSE(lp_feasible(1, {{{1}, Relation::GreaterEq, 1}, {{1}, Relation::LessEq, 0}}).feasible);
  const auto r = lp_feasible(1, {{{3}, Relation::Equal, 1}});
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.witness[0], ratio(1, 3));
  EXPECT_TRUE(lp_feasible(2, {{{1, 1}, Relation::LessEq, -5}}).feasible);
  EXPECT_FALSE(lp_feasible(2, {{{1, 1}, Relation::LessEq, -5}}, true).feasible);
}

TEST(LinearProgram, AgreesWithFourierMotzkin) {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> coef(-3, 3), rel(0, 2), rows(1, 5);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t q = 2 + trial % 2;
    std::vector<LinearConstraint> cons;
    for (int i = rows(gen); i > 0; --i) {
      RationalVector c(q);
      for (auto& x : c) x = coef(gen);
      cons.push_back({c, static_cast<Relation>(rel(gen)), Rational(coef(gen))});
    }
    const auto r = lp_feasible(q, cons);
    ASSERT_EQ(r.feasible, fm_feasible(as_rows(cons), q));
    if (r.feasible)
      for (const auto& c : cons) {
        const Rational lhs = dot(c.coeffs, r.witness);
        if (c.rel == Relation::LessEq) EXPECT_LE(lhs, c.rhs);
        if (c.rel == Relation::GreaterEq) EXPECT_GE(lhs, c.rhs);
        if (c.rel == Relation::Equal) EXPECT_EQ(lhs, c.rhs);
      }
  }
}

TEST(ImplicitEqualities, WedgeHasFullDimension) {
  const auto c = implicit_equalities(kWedge);
  EXPECT_TRUE(c.equalities.empty());
  EXPECT_EQ(c.dimension, 2);
}

TEST(ImplicitEqualities, OppositeRowsForceEquality) {
  EXPECT_EQ(cone_dimension(Polyhedron(2, {{-1, 1}, {1, -1}}, {-1, 0})), 1);
}

TEST(ImplicitEqualities, RepeatedRowDoesNotForceEquality) {
  const auto c = implicit_equalities(IntMatrix{{-1, 1}, {-1, 1}}, 2);
  EXPECT_TRUE(c.equalities.empty());
  EXPECT_EQ(c.dimension, 2);
}

TEST(ImplicitEqualities, AgreeWithEliminationOracle) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int q = 2 + trial % 3;
    const auto A = random_matrix(gen, 1 + trial % 5, q);
    ASSERT_EQ(implicit_equalities(A, q).dimension, dimension_oracle(A, q));
  }
}

TEST(RREF, EmptyEqualitySystem) {
  const auto d = rref_decompose({}, 2);
  EXPECT_EQ(d.I0, (std::vector<int>{0}));
  EXPECT_EQ(d.I1, (std::vector<int>{1}));
  ASSERT_EQ(d.D.size(), 1u);
  EXPECT_EQ(d.D[0], (RationalVector{-1, 1}));
}

TEST(RREF, DependentAllOnesRowIsRejected) {
  EXPECT_THROW(rref_decompose({{1, 1}}, 2), std::invalid_argument);
}

TEST(RREF, ReconstructsPointsOfTheCone) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 3 + trial % 3;
    IntMatrix A = random_matrix(gen, 1, q);
    // make a second row opposite to the first so that both are implicit equalities
    A.push_back(A[0]);
    for (auto& x : A.back()) x = -x;
    bool all_ones_dependent = true;
    for (int j = 1; j < q; ++j) all_ones_dependent &= A[0][j] == A[0][0];
    if (all_ones_dependent) continue;
    const auto cone = implicit_equalities(A, q);
    IntMatrix eq;
    for (auto i : cone.equalities) eq.push_back(A[i]);
    const auto d = rref_decompose(eq, q);
    // pick x_{I1} and n freely, solve for x_{I0}, then check A= x = 0 and 1.x = n
    std::uniform_int_distribution<int> val(-5, 5);
    RationalVector x(q);
    Rational n = val(gen);
    for (int j : d.I1) x[j] = ratio(val(gen), 1 + trial % 4);
    for (std::size_t r = 0; r < d.I0.size(); ++r) {
      Rational v = d.D[r].back() * n;
      for (std::size_t c = 0; c < d.I1.size(); ++c) v += d.D[r][c] * x[d.I1[c]];
      x[d.I0[r]] = v;
    }
    Rational total = 0;
    for (const auto& v : x) total += v;
    EXPECT_EQ(total, n);
    for (const auto& row : eq) EXPECT_EQ(dot(to_rational(row), x), 0);
  }
}

TEST(IntegerSlice, CrossingPolyhedron) {
  const auto r = integer_slice(kCrossing, 100);
  ASSERT_EQ(r.status, SliceStatus::Nonempty);
  EXPECT_TRUE(kCrossing.contains(r.witness));
  EXPECT_EQ(r.witness[0] + r.witness[1], 100);
}

TEST(IntegerSlice, ParityMakesItEmpty) {
  const Polyhedron equal_halves(2, {{1, -1}, {-1, 1}}, {0, 0});
  EXPECT_FALSE(integer_slice_nonempty(equal_halves, 7));
  EXPECT_TRUE(integer_slice_nonempty(equal_halves, 8));
}

TEST(IntegerSlice, NodeCapGivesUndecided) {
  const Polyhedron equal_halves(2, {{1, -1}, {-1, 1}}, {0, 0});
  EXPECT_EQ(integer_slice(equal_halves, 7, 1).status, SliceStatus::Undecided);
  EXPECT_THROW(integer_slice_nonempty(equal_halves, 7, 1), std::runtime_error);
}

TEST(IntegerSlice, MatchesExhaustiveSearch) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 150; ++trial) {
    const int q = 3;
    const auto A = random_matrix(gen, 2, q);
    RationalVector b{ratio(static_cast<long>(gen() % 7) - 3, 2), ratio(static_cast<long>(gen() % 7) - 3, 2)};
    const Polyhedron h(q, A, b);
    const std::int64_t n = 2 + trial % 6;
    bool any = false;
    for (std::int64_t x = 0; x <= n && !any; ++x)
      for (std::int64_t y = 0; x + y <= n && !any; ++y) any = h.contains(IntVector{x, y, n - x - y});
    ASSERT_EQ(integer_slice_nonempty(h, n), any);
  }
}

TEST(Hull, PointsAndSegments) {
  const RationalVector p1{ratio(1, 3), ratio(2, 3)}, p2{ratio(1, 2), ratio(1, 2)};
  EXPECT_TRUE(point_in_cone({0, 0}, kWedge.A));
  EXPECT_TRUE(point_in_cone(p2, kWedge.A));
  EXPECT_FALSE(point_in_cone(p1, kWedge.A));
  EXPECT_FALSE(hull_intersects_cone({p1, p2}, kCrossing.A));
  EXPECT_TRUE(hull_intersects_cone({p1, p2}, kWedge.A));
  EXPECT_FALSE(hull_subset_cone({p1, p2}, kWedge.A));
  EXPECT_TRUE(hull_subset_cone({{ratio(2, 3), ratio(1, 3)}, p2}, kWedge.A));
  EXPECT_TRUE(hull_subset_cone({p2}, kWedge.A));
}

TEST(PolyhedronJson, RoundTrip) {
  const auto h = polyhedron_from_json(polyhedron_to_json(kWedge));
  EXPECT_EQ(h.A, kWedge.A);
  EXPECT_EQ(h.b, kWedge.b);
  EXPECT_THROW(Polyhedron(2, {{1, 2, 3}}, {0}), std::invalid_argument);
}
