#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lp.hpp"
#include "rational.hpp"

namespace smoothtie {

/// {x : A x <= b} with integer A and rational b.
struct Polyhedron {
  int q = 0;
  IntMatrix A;
  RationalVector b;

  Polyhedron() = default;
  Polyhedron(int q_, IntMatrix A_, RationalVector b_) : q(q_), A(std::move(A_)), b(std::move(b_)) { validate(); }

  std::size_t rows() const { return A.size(); }

  void validate() const {
    if (q < 1) throw std::invalid_argument("polyhedron needs at least one variable");
    if (A.size() != b.size()) throw std::invalid_argument("A and b have different numbers of rows");
    for (const auto& row : A)
      if (static_cast<int>(row.size()) != q) throw std::invalid_argument("row of A has the wrong length");
  }

  bool contains(const RationalVector& x) const {
    for (std::size_t i = 0; i < A.size(); ++i)
      if (dot(to_rational(A[i]), x) > b[i]) return false;
    return true;
  }

  bool contains(const IntVector& x) const {
    for (std::size_t i = 0; i < A.size(); ++i) {
      mpz_class s = 0;
      for (int j = 0; j < q; ++j) s += mpz_class(static_cast<long>(A[i][j])) * static_cast<long>(x[j]);
      if (Rational(s) > b[i]) return false;
    }
    return true;
  }
};

inline nlohmann::json polyhedron_to_json(const Polyhedron& h) {
  nlohmann::json b = nlohmann::json::array();
  for (const auto& x : h.b) b.push_back(to_string(x));
  return {{"q", h.q}, {"A", h.A}, {"b", b}};
}

inline Polyhedron polyhedron_from_json(const nlohmann::json& j) {
  RationalVector b;
  for (const auto& x : j.at("b")) b.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>()));
  return Polyhedron(j.at("q").get<int>(), j.at("A").get<IntMatrix>(), std::move(b));
}

struct ConeAnalysis {
  std::vector<std::size_t> equalities;  // rows of A=
  std::vector<std::size_t> others;      // rows of A+
  int rank = 0;                         // rank of A=
  int dimension = 0;                    // q - rank
};

/// Splits the rows of A into the implicit equalities of {x : A x <= 0} and the rest.
inline ConeAnalysis implicit_equalities(const IntMatrix& A, int q) {
  const std::size_t L = A.size();
  std::vector<RationalVector> rows;
  for (const auto& r : A) {
    if (static_cast<int>(r.size()) != q) throw std::invalid_argument("row of A has the wrong length");
    rows.push_back(to_rational(r));
  }
  std::vector<int> state(L, 0);  // 0 undecided, 1 strict somewhere, 2 implicit equality
  for (std::size_t i = 0; i < L; ++i) {
    if (state[i] != 0) continue;
    if (std::all_of(A[i].begin(), A[i].end(), [](std::int64_t v) { return v == 0; })) {
      state[i] = 2;
      continue;
    }
    std::vector<LinearConstraint> cons;
    for (std::size_t j = 0; j < L; ++j) cons.push_back({rows[j], Relation::LessEq, 0});
    cons.push_back({rows[i], Relation::LessEq, -1});
    auto res = lp_feasible(q, cons);
    if (!res.feasible) {
      state[i] = 2;
      continue;
    }
    for (std::size_t j = 0; j < L; ++j)
      if (state[j] == 0 && dot(rows[j], res.witness) < 0) state[j] = 1;
  }
  ConeAnalysis out;
  IntMatrix eq;
  for (std::size_t i = 0; i < L; ++i) {
    if (state[i] == 2) {
      out.equalities.push_back(i);
      eq.push_back(A[i]);
    } else {
      out.others.push_back(i);
    }
  }
  out.rank = rank_of(eq);
  out.dimension = q - out.rank;
  return out;
}

inline ConeAnalysis implicit_equalities(const Polyhedron& h) { return implicit_equalities(h.A, h.q); }

inline int cone_dimension(const Polyhedron& h) { return implicit_equalities(h).dimension; }

/// x_{I0} = D (x_{I1}, n) on {A= x = 0, 1.x = n}; indices are 0-based.
struct RREFDecomposition {
  std::vector<int> I0, I1;
  RationalMatrix D;
};

inline RREFDecomposition rref_decompose(const IntMatrix& a_eq, int q) {
  RationalMatrix M;
  for (const auto& r : a_eq) {
    if (static_cast<int>(r.size()) != q) throw std::invalid_argument("row of A= has the wrong length");
    auto row = to_rational(r);
    row.push_back(0);
    M.push_back(std::move(row));
  }
  M.push_back(RationalVector(q + 1, Rational(1)));
  const int base_rank = rank_of(a_eq);
  std::vector<int> pivots;
  std::size_t lead = 0;
  for (int c = 0; c < q && lead < M.size(); ++c) {
    std::size_t p = lead;
    while (p < M.size() && M[p][c] == 0) ++p;
    if (p == M.size()) continue;
    std::swap(M[p], M[lead]);
    Rational inv = 1 / M[lead][c];
    for (auto& v : M[lead]) v *= inv;
    for (std::size_t r = 0; r < M.size(); ++r) {
      if (r == lead || M[r][c] == 0) continue;
      Rational f = M[r][c];
      for (int j = 0; j <= q; ++j) M[r][j] -= f * M[lead][j];
    }
    pivots.push_back(c);
    ++lead;
  }
  if (static_cast<int>(pivots.size()) != base_rank + 1)
    throw std::invalid_argument("the all-ones row is linearly dependent on A=");
  RREFDecomposition out;
  out.I0 = pivots;
  for (int c = 0; c < q; ++c)
    if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) out.I1.push_back(c);
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    RationalVector row;
    for (int c : out.I1) row.push_back(-M[r][c]);
    row.push_back(M[r][q]);
    out.D.push_back(std::move(row));
  }
  return out;
}

enum class SliceStatus { Empty, Nonempty, Undecided };

struct SliceResult {
  SliceStatus status = SliceStatus::Undecided;
  IntVector witness;
  std::size_t nodes = 0;
};

inline constexpr std::size_t kDefaultNodeCap = 1'000'000;

/// Is there a nonnegative integer x with sum n and A x <= b? Branch and bound on the LP relaxation.
inline SliceResult integer_slice(const Polyhedron& h, std::int64_t n, std::size_t node_cap = kDefaultNodeCap) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  const std::size_t q = h.q;
  std::vector<LinearConstraint> base;
  for (std::size_t i = 0; i < h.rows(); ++i) base.push_back({to_rational(h.A[i]), Relation::LessEq, h.b[i]});
  base.push_back({RationalVector(q, Rational(1)), Relation::Equal, Rational(static_cast<long>(n))});

  struct Bound {
    std::size_t var;
    Relation rel;
    Rational value;
  };
  SliceResult out;
  std::vector<std::vector<Bound>> stack{{}};
  while (!stack.empty()) {
    if (out.nodes >= node_cap) {
      out.status = SliceStatus::Undecided;
      return out;
    }
    ++out.nodes;
    auto bounds = std::move(stack.back());
    stack.pop_back();
    auto cons = base;
    for (const auto& bd : bounds) {
      RationalVector e(q, Rational(0));
      e[bd.var] = 1;
      cons.push_back({std::move(e), bd.rel, bd.value});
    }
    auto res = lp_feasible(q, cons, true);
    if (!res.feasible) continue;
    std::size_t frac = q;
    for (std::size_t j = 0; j < q && frac == q; ++j)
      if (!is_integer(res.witness[j])) frac = j;
    if (frac == q) {
      out.status = SliceStatus::Nonempty;
      for (const auto& v : res.witness) out.witness.push_back(to_int64(v.get_num()));
      return out;
    }
    auto down = bounds, up = bounds;
    down.push_back({frac, Relation::LessEq, Rational(floor_of(res.witness[frac]))});
    up.push_back({frac, Relation::GreaterEq, Rational(ceil_of(res.witness[frac]))});
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));
  }
  out.status = SliceStatus::Empty;
  return out;
}

/// Throws when the node cap is hit; use integer_slice() for the three-valued answer.
inline bool integer_slice_nonempty(const Polyhedron& h, std::int64_t n, std::size_t node_cap = kDefaultNodeCap) {
  auto r = integer_slice(h, n, node_cap);
  if (r.status == SliceStatus::Undecided) throw std::runtime_error("integer slice undecided: node cap reached");
  return r.status == SliceStatus::Nonempty;
}

inline bool point_in_cone(const RationalVector& x, const IntMatrix& A) {
  for (const auto& row : A) {
    if (row.size() != x.size()) throw std::invalid_argument("point has the wrong dimension");
    if (dot(to_rational(row), x) > 0) return false;
  }
  return true;
}

/// Some convex combination of the points lies in {x : A x <= 0}.
inline bool hull_intersects_cone(const std::vector<RationalVector>& points, const IntMatrix& A) {
  if (points.empty()) throw std::invalid_argument("empty point family");
  for (const auto& p : points)
    if (point_in_cone(p, A)) return true;
  const std::size_t k = points.size();
  std::vector<LinearConstraint> cons;
  for (const auto& row : A) {
    auto r = to_rational(row);
    RationalVector c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = dot(r, points[j]);
    cons.push_back({std::move(c), Relation::LessEq, 0});
  }
  cons.push_back({RationalVector(k, Rational(1)), Relation::Equal, 1});
  return lp_feasible(k, cons, true).feasible;
}

inline bool hull_subset_cone(const std::vector<RationalVector>& points, const IntMatrix& A) {
  if (points.empty()) throw std::invalid_argument("empty point family");
  return std::all_of(points.begin(), points.end(), [&](const RationalVector& p) { return point_in_cone(p, A); });
}

}  // namespace smoothtie
