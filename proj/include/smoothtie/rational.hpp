#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smoothtie {

/// Exact rational scalar used by every polyhedral and probability computation.
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;
using IntVector = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVector>;

/// Parses "p/q", "p", or a plain decimal like "0.25" into a canonical rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::string denom = "1" + std::string(s.size() - dot - 1, '0');
    s = digits + "/" + denom;
  }
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational literal: " + std::string(text));
  if (s.find('/') != std::string::npos && s.substr(s.find('/') + 1).find_first_not_of('0') == std::string::npos)
    throw std::invalid_argument("zero denominator: " + std::string(text));
  r.canonicalize();
  return r;
}

/// Canonical num/den; mpq_class(num, den) alone does not reduce.
inline Rational ratio(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline mpz_class floor_of(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline mpz_class ceil_of(const Rational& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits");
  return z.get_si();
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RationalVector to_rational(const IntVector& v) {
  RationalVector out;
  out.reserve(v.size());
  for (auto x : v) out.emplace_back(static_cast<long>(x));
  return out;
}

/// Row rank of a rational matrix by Gaussian elimination.
inline int rank_of(RationalMatrix rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      Rational f = rows[r][c] / rows[rank][c];
      for (std::size_t j = c; j < cols; ++j) rows[r][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

inline int rank_of(const IntMatrix& rows) {
  RationalMatrix m;
  m.reserve(rows.size());
  for (const auto& r : rows) m.push_back(to_rational(r));
  return rank_of(std::move(m));
}

}  // namespace smoothtie
