#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace smoothtie {

enum class Relation { LessEq, GreaterEq, Equal };

struct LinearConstraint {
  RationalVector coeffs;
  Relation rel = Relation::LessEq;
  Rational rhs = 0;
};

struct LPResult {
  bool feasible = false;
  RationalVector witness;  // valid only when feasible
};

namespace detail {

/// Dense phase-one simplex tableau over exact rationals with Bland's rule.
class PhaseOne {
 public:
  PhaseOne(std::size_t structural, const std::vector<LinearConstraint>& rows) : n_(structural) {
    std::size_t slacks = 0, artificials = 0;
    for (const auto& c : rows) {
      Rational rhs = c.rhs;
      Relation rel = c.rel;
      if (rhs < 0) rel = rel == Relation::LessEq ? Relation::GreaterEq : rel == Relation::GreaterEq ? Relation::LessEq : rel;
      if (rel != Relation::Equal) ++slacks;
      if (rel != Relation::LessEq) ++artificials;
    }
    first_art_ = n_ + slacks;
    cols_ = first_art_ + artificials;
    tab_.assign(rows.size(), RationalVector(cols_ + 1, Rational(0)));
    basis_.assign(rows.size(), 0);
    std::size_t s = n_, a = first_art_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& c = rows[i];
      if (c.coeffs.size() != n_) throw std::invalid_argument("constraint has wrong number of coefficients");
      const bool flip = c.rhs < 0;
      Relation rel = c.rel;
      if (flip) rel = rel == Relation::LessEq ? Relation::GreaterEq : rel == Relation::GreaterEq ? Relation::LessEq : rel;
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = flip ? -c.coeffs[j] : c.coeffs[j];
      tab_[i][cols_] = flip ? -c.rhs : c.rhs;
      if (rel == Relation::LessEq) {
        tab_[i][s] = 1;
        basis_[i] = s++;
      } else if (rel == Relation::GreaterEq) {
        tab_[i][s++] = -1;
        tab_[i][a] = 1;
        basis_[i] = a++;
      } else {
        tab_[i][a] = 1;
        basis_[i] = a++;
      }
    }
    // Reduced costs of the phase-one objective (sum of artificials).
    obj_.assign(cols_ + 1, Rational(0));
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (basis_[i] < first_art_) continue;
      for (std::size_t j = 0; j <= cols_; ++j)
        if (tab_[i][j] != 0) obj_[j] -= tab_[i][j];
    }
    for (std::size_t j = first_art_; j < cols_; ++j) obj_[j] = 0;
  }

  bool solve() {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j)
        if (obj_[j] < 0) {
          enter = j;
          break;
        }
      if (enter == cols_) break;
      std::size_t leave = tab_.size();
      Rational best;
      for (std::size_t i = 0; i < tab_.size(); ++i) {
        if (tab_[i][enter] <= 0) continue;
        Rational ratio = tab_[i][cols_] / tab_[i][enter];
        if (leave == tab_.size() || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == tab_.size()) break;  // phase one is bounded below by zero, so this cannot happen
      pivot(leave, enter);
    }
    return obj_[cols_] == 0;
  }

  RationalVector structural_values() const {
    RationalVector x(n_, Rational(0));
    for (std::size_t i = 0; i < tab_.size(); ++i)
      if (basis_[i] < n_) x[basis_[i]] = tab_[i][cols_];
    return x;
  }

 private:
  void pivot(std::size_t r, std::size_t c) {
    Rational p = tab_[r][c];
    for (auto& v : tab_[r])
      if (v != 0) v /= p;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (i == r || tab_[i][c] == 0) continue;
      Rational f = tab_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (tab_[r][j] != 0) tab_[i][j] -= f * tab_[r][j];
    }
    if (obj_[c] != 0) {
      Rational f = obj_[c];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (tab_[r][j] != 0) obj_[j] -= f * tab_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t n_, cols_ = 0, first_art_ = 0;
  std::vector<RationalVector> tab_;
  RationalVector obj_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Exact feasibility of a system of linear constraints over q variables.
/// Variables are free unless `nonnegative` is set; the witness is a basic solution.
inline LPResult lp_feasible(std::size_t q, const std::vector<LinearConstraint>& constraints, bool nonnegative = false) {
  if (constraints.empty()) return {true, RationalVector(q, Rational(0))};
  std::vector<LinearConstraint> rows;
  rows.reserve(constraints.size());
  const std::size_t n = nonnegative ? q : 2 * q;
  for (const auto& c : constraints) {
    if (c.coeffs.size() != q) throw std::invalid_argument("constraint has wrong number of coefficients");
    LinearConstraint r{RationalVector(n, Rational(0)), c.rel, c.rhs};
    for (std::size_t j = 0; j < q; ++j) {
      r.coeffs[j] = c.coeffs[j];
      if (!nonnegative) r.coeffs[q + j] = -c.coeffs[j];
    }
    rows.push_back(std::move(r));
  }
  detail::PhaseOne lp(n, rows);
  if (!lp.solve()) return {false, {}};
  auto v = lp.structural_values();
  RationalVector x(q);
  for (std::size_t j = 0; j < q; ++j) x[j] = nonnegative ? v[j] : v[j] - v[q + j];
  return {true, std::move(x)};
}

}  // namespace smoothtie
