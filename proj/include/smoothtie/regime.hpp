#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polyhedron.hpp"
#include "rules.hpp"
#include "tie_polyhedra.hpp"

namespace smoothtie {

enum class RegimeKind { Zero, Exponential, Polynomial, Undecided };

inline std::string to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::Zero: return "zero";
    case RegimeKind::Exponential: return "exponential";
    case RegimeKind::Polynomial: return "polynomial";
    case RegimeKind::Undecided: return "undecided";
  }
  return "undecided";
}

struct Regime {
  RegimeKind kind = RegimeKind::Undecided;
  std::optional<Rational> exponent;                          // power of n for Polynomial
  std::optional<std::pair<Rational, Rational>> interval;     // [lower, upper] when only bounds are known
  bool heuristic = false;
  std::string method;
  nlohmann::json witness = nlohmann::json::object();

  static Regime zero() { return {RegimeKind::Zero, {}, {}, false, {}, nlohmann::json::object()}; }
  static Regime exponential() { return {RegimeKind::Exponential, {}, {}, false, {}, nlohmann::json::object()}; }
  static Regime polynomial(Rational e) { return {RegimeKind::Polynomial, e, {}, false, {}, nlohmann::json::object()}; }
  static Regime undecided(std::string why) {
    Regime r{RegimeKind::Undecided, {}, {}, false, {}, nlohmann::json::object()};
    r.witness["reason"] = std::move(why);
    return r;
  }

  /// Same label and, for polynomial regimes, compatible exponents (a point inside an interval counts).
  bool agrees_with(const Regime& o) const {
    if (kind != o.kind) return false;
    if (kind != RegimeKind::Polynomial) return true;
    auto inside = [](const Regime& point, const Regime& range) {
      return point.exponent && range.interval && range.interval->first <= *point.exponent &&
             *point.exponent <= range.interval->second;
    };
    if (exponent && o.exponent) return *exponent == *o.exponent;
    if (exponent && o.interval) return inside(*this, o);
    if (interval && o.exponent) return inside(o, *this);
    return interval == o.interval;
  }
};

inline nlohmann::json regime_to_json(const Regime& r) {
  nlohmann::json j;
  j["regime"] = to_string(r.kind);
  j["exponent"] = r.exponent ? nlohmann::json(to_string(*r.exponent)) : nlohmann::json(nullptr);
  if (r.interval)
    j["exponent_interval"] = {to_string(r.interval->first), to_string(r.interval->second)};
  else
    j["exponent_interval"] = nullptr;
  j["asymptotic"] = r.kind == RegimeKind::Exponential || r.kind == RegimeKind::Polynomial;
  j["heuristic"] = r.heuristic;
  j["witness"] = r.witness;
  if (!r.method.empty()) j["method"] = r.method;
  if (j["asymptotic"].get<bool>()) j["note"] = "asymptotic in n";
  return j;
}

enum class Adversary { Max, Min };

inline Adversary parse_adversary(const std::string& s) {
  if (s == "max") return Adversary::Max;
  if (s == "min") return Adversary::Min;
  throw std::invalid_argument("adversary must be 'max' or 'min'");
}

/// Finite family of strictly positive rational distributions over the q coordinates.
struct ModelSpec {
  std::vector<RationalVector> distributions;
  Rational epsilon;
  bool uniform = false;  // impartial culture; distributions stay empty when m! exceeds the histogram cap

  ModelSpec() = default;
  explicit ModelSpec(std::vector<RationalVector> ds) : distributions(std::move(ds)) {
    if (distributions.empty()) throw std::invalid_argument("model needs at least one distribution");
    const auto q = distributions.front().size();
    bool first = true;
    for (const auto& d : distributions) {
      if (d.size() != q) throw std::invalid_argument("distributions have different lengths");
      Rational s = 0;
      for (const auto& x : d) {
        if (x <= 0) throw std::invalid_argument("model distributions must be strictly positive");
        s += x;
        if (first || x < epsilon) epsilon = x;
        first = false;
      }
      if (s != 1) throw std::invalid_argument("each distribution must sum to 1");
    }
  }

  std::size_t q() const { return distributions.front().size(); }
  bool single() const { return distributions.size() == 1; }
};

inline ModelSpec impartial_culture(int m) {
  ModelSpec model;
  if (m <= kMaxHistogramAlternatives) {
    const auto q = factorial(m);
    model = ModelSpec({RationalVector(q, ratio(1, static_cast<long>(q)))});
  }
  model.uniform = true;
  return model;
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
  std::vector<RationalVector> ds;
  for (const auto& d : j) {
    RationalVector v;
    for (const auto& x : d) v.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>()));
    ds.push_back(std::move(v));
  }
  return ModelSpec(std::move(ds));
}

struct ClassifyOptions {
  std::size_t node_cap = kDefaultNodeCap;
  int grid = 4;  // resolution for min-adversary witness search over mixtures
};

// ---------------------------------------------------------------------------
// Single polyhedron.

inline Regime classify_polyhedron(const ModelSpec& model, const Polyhedron& h, std::int64_t n, Adversary adv,
                                  const ClassifyOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (model.q() != static_cast<std::size_t>(h.q)) throw std::invalid_argument("model and polyhedron dimensions differ");
  auto slice = integer_slice(h, n, opt.node_cap);
  if (slice.status == SliceStatus::Undecided) return Regime::undecided("integer slice node cap reached");
  if (slice.status == SliceStatus::Empty) {
    auto r = Regime::zero();
    r.method = "theorem";
    return r;
  }
  const auto cone = implicit_equalities(h);
  const bool ok = adv == Adversary::Max ? hull_intersects_cone(model.distributions, h.A)
                                        : hull_subset_cone(model.distributions, h.A);
  Regime r = ok ? Regime::polynomial(ratio(cone.dimension - h.q, 2)) : Regime::exponential();
  r.method = "theorem";
  r.witness["slice_point"] = slice.witness;
  r.witness["cone_dimension"] = cone.dimension;
  return r;
}

// ---------------------------------------------------------------------------
// Unions.

namespace detail {

struct ConstituentState {
  std::optional<Polyhedron> poly;
  std::optional<SliceStatus> slice;
  std::optional<int> dim;
  IntVector slice_point;
};

class UnionEvaluator {
 public:
  UnionEvaluator(const TieEvent& ev, std::int64_t n, const ClassifyOptions& opt)
      : ev_(ev), n_(n), opt_(opt), state_(ev.constituents.size()) {}

  const Polyhedron& poly(std::size_t i) {
    if (!state_[i].poly) state_[i].poly = ev_.constituents[i].build();
    return *state_[i].poly;
  }

  SliceStatus slice(std::size_t i) {
    auto& s = state_[i];
    if (s.slice) return *s.slice;
    const auto& c = ev_.constituents[i];
    const auto m = ev_.m;
    if (c.kind == ConstituentKind::EdgeOrder && n_ >= static_cast<std::int64_t>(m) * m * m * m) {
      s.slice = (n_ % 2 == 0 || c.middle_empty) ? SliceStatus::Nonempty : SliceStatus::Empty;
    } else {
      auto r = integer_slice(poly(i), n_, opt_.node_cap);
      s.slice = r.status;
      s.slice_point = r.witness;
    }
    return *s.slice;
  }

  int dim(std::size_t i) {
    if (!state_[i].dim) state_[i].dim = implicit_equalities(poly(i)).dimension;
    return *state_[i].dim;
  }

  bool contains(std::size_t i, const RationalVector& pi) { return point_in_cone(pi, poly(i).A); }
  bool hull_meets(std::size_t i, const std::vector<RationalVector>& pts) { return hull_intersects_cone(pts, poly(i).A); }
  const IntVector& slice_point(std::size_t i) const { return state_[i].slice_point; }

  // Best activated constituent for the point set (a single point or a hull); -1 when none.
  // `undecided` reports whether a skipped constituent could have changed the answer.
  std::pair<int, std::optional<std::size_t>> best_activation(const std::vector<RationalVector>& pts, bool& undecided) {
    const int q = static_cast<int>(factorial(ev_.m));
    int best = -1;
    std::optional<std::size_t> arg;
    int undecided_claim = -1;
    for (std::size_t i = 0; i < ev_.constituents.size(); ++i) {
      const int claim = ev_.constituents[i].claimed_dimension(q);
      if (claim <= best) break;
      const bool active = pts.size() == 1 ? contains(i, pts.front()) : hull_meets(i, pts);
      if (!active) continue;
      auto st = slice(i);
      if (st == SliceStatus::Undecided) {
        undecided_claim = std::max(undecided_claim, claim);
        continue;
      }
      if (st == SliceStatus::Empty) continue;
      const int d = dim(i);
      if (d > best) {
        best = d;
        arg = i;
      }
    }
    undecided = undecided_claim > best;
    return {best, arg};
  }

  // Zero / nonzero integer slice over the whole union.
  std::optional<bool> any_slice(std::optional<std::size_t>& where) {
    bool unknown = false;
    for (std::size_t i = 0; i < ev_.constituents.size(); ++i) {
      auto st = slice(i);
      if (st == SliceStatus::Nonempty) {
        where = i;
        return true;
      }
      if (st == SliceStatus::Undecided) unknown = true;
    }
    if (unknown) return std::nullopt;
    return false;
  }

 private:
  const TieEvent& ev_;
  std::int64_t n_;
  ClassifyOptions opt_;
  std::vector<ConstituentState> state_;
};

inline void mixtures(std::size_t parts, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int x = 0; x <= total; ++x) {
    cur.push_back(x);
    mixtures(parts, total - x, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline Regime classify_union(const ModelSpec& model, const TieEvent& ev, std::int64_t n, Adversary adv,
                             const ClassifyOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const int q = static_cast<int>(factorial(ev.m));
  if (model.q() != static_cast<std::size_t>(q)) throw std::invalid_argument("model dimension must be m!");
  detail::UnionEvaluator eval(ev, n, opt);

  auto finish_without_activation = [&]() {
    std::optional<std::size_t> where;
    auto any = eval.any_slice(where);
    if (!any) return Regime::undecided("integer slice node cap reached");
    Regime r = *any ? Regime::exponential() : Regime::zero();
    r.method = "generic";
    r.witness["constituents"] = ev.constituents.size();
    if (where) {
      r.witness["slice_provenance"] = ev.constituents[*where].provenance;
      r.witness["slice_point"] = eval.slice_point(*where);
    }
    return r;
  };

  auto polynomial_from = [&](int dim, std::size_t arg) {
    Regime r = Regime::polynomial(ratio(dim - q, 2));
    r.method = "generic";
    r.witness["dimension"] = dim;
    r.witness["min_ties"] = q - dim;
    r.witness["provenance"] = ev.constituents[arg].provenance;
    if (!eval.slice_point(arg).empty()) r.witness["slice_point"] = eval.slice_point(arg);
    r.witness["constituents"] = ev.constituents.size();
    return r;
  };

  if (adv == Adversary::Max || model.single()) {
    bool undecided = false;
    auto [best, arg] = eval.best_activation(model.distributions, undecided);
    if (undecided) return Regime::undecided("integer slice node cap reached");
    if (best >= 0) return polynomial_from(best, *arg);
    return finish_without_activation();
  }

  // Min adversary over a multi-distribution family: search mixtures on a grid.
  std::optional<std::size_t> where;
  auto any = eval.any_slice(where);
  if (!any) return Regime::undecided("integer slice node cap reached");
  if (!*any) {
    auto r = Regime::zero();
    r.method = "generic";
    return r;
  }
  std::vector<std::vector<int>> weights;
  std::vector<int> cur;
  detail::mixtures(model.distributions.size(), opt.grid, cur, weights);
  int beta = q + 1;
  std::optional<std::size_t> beta_arg;
  nlohmann::json beta_point;
  for (const auto& w : weights) {
    RationalVector pi(q, Rational(0));
    for (std::size_t j = 0; j < w.size(); ++j)
      for (int i = 0; i < q; ++i) pi[i] += ratio(w[j], opt.grid) * model.distributions[j][i];
    bool undecided = false;
    auto [best, arg] = eval.best_activation({pi}, undecided);
    if (undecided) return Regime::undecided("integer slice node cap reached");
    nlohmann::json pj = nlohmann::json::array();
    for (const auto& x : pi) pj.push_back(to_string(x));
    if (best < 0) {
      auto r = Regime::exponential();
      r.method = "generic-grid";
      r.witness["unactivated_mixture"] = pj;
      r.witness["grid"] = opt.grid;
      return r;
    }
    if (best < beta) {
      beta = best;
      beta_arg = arg;
      beta_point = pj;
    }
  }
  Regime r = polynomial_from(beta, *beta_arg);
  r.method = "generic-grid";
  r.heuristic = true;
  r.witness["grid"] = opt.grid;
  r.witness["mixture"] = beta_point;
  return r;
}

// ---------------------------------------------------------------------------
// Closed forms for the named rules under a model whose hull contains the uniform distribution.

namespace detail {

inline bool plurality_tie_possible(int m, int k, std::int64_t n) {
  for (std::int64_t c = 1; c * k <= n; ++c)
    if (n <= c * k + static_cast<std::int64_t>(m - k) * (c - 1)) return true;
  return false;
}

inline bool veto_tie_possible(int m, int k, std::int64_t n) {
  if (k == m) return n % m == 0;
  return n >= m - k;
}

inline constexpr std::size_t kScoreStateCap = 2'000'000;

/// Exact reachability of a k-way top tie over sorted, min-shifted score vectors.
inline std::optional<bool> scoring_tie_possible_dp(const ScoringVector& s, int k, std::int64_t n) {
  const int m = s.size();
  std::vector<std::vector<std::int64_t>> perms;
  std::vector<std::int64_t> base(s.s);
  std::sort(base.begin(), base.end());
  do perms.push_back(base);
  while (std::next_permutation(base.begin(), base.end()));
  auto canon = [](std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    const auto low = v.back();
    for (auto& x : v) x -= low;
    return v;
  };
  std::set<std::vector<std::int64_t>> states{std::vector<std::int64_t>(m, 0)};
  for (std::int64_t step = 0; step < n; ++step) {
    std::set<std::vector<std::int64_t>> next;
    for (const auto& st : states)
      for (const auto& p : perms) {
        // states are sorted, so adding every permutation of s covers every assignment
        std::vector<std::int64_t> v(m);
        for (int i = 0; i < m; ++i) v[i] = st[i] + p[i];
        next.insert(canon(std::move(v)));
        if (next.size() > kScoreStateCap) return std::nullopt;
      }
    states = std::move(next);
  }
  for (const auto& st : states) {
    bool ok = true;
    for (int i = 1; i < k; ++i) ok = ok && st[i] == st[0];
    if (k < m) ok = ok && st[k] < st[0];
    if (ok) return true;
  }
  return false;
}

inline int l_alpha(const Rational& alpha) { return static_cast<int>(to_int64(alpha.get_den())); }

inline int ceil_log2(int k) {
  int c = 0;
  while ((1 << c) < k) ++c;
  return c;
}

// Largest s with s! <= k.
inline int factorial_floor(int k) {
  int s = 1;
  while (factorial(s + 1) <= k) ++s;
  return s;
}

}  // namespace detail

inline Regime closed_form_regime(const RuleSpec& rule, int m, int k, std::int64_t n) {
  if (m < 2) throw std::invalid_argument("need at least two alternatives");
  if (k < 2 || k > m) throw std::invalid_argument("closed forms cover 2 <= k <= m");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const Rational generic_exp = ratio(-(k - 1), 2);
  Regime r;
  switch (rule.family) {
    case RuleFamily::Scoring: {
      std::optional<bool> possible;
      if (rule.scoring_name == "plurality") possible = detail::plurality_tie_possible(m, k, n);
      else if (rule.scoring_name == "veto") possible = detail::veto_tie_possible(m, k, n);
      else possible = detail::scoring_tie_possible_dp(rule.scoring_vector(m), k, n);
      if (!possible) return Regime::undecided("score-vector state cap reached");
      r = *possible ? Regime::polynomial(generic_exp) : Regime::zero();
      break;
    }
    case RuleFamily::MRSE:
      if (rule.mrse != MRSEKind::Baldwin && m == 3 && k == 3 && n % 2 != 0 && n % 3 != 0) r = Regime::zero();
      else r = Regime::polynomial(generic_exp);
      break;
    case RuleFamily::Maximin:
    case RuleFamily::Schulze: r = Regime::polynomial(generic_exp); break;
    case RuleFamily::RankedPairs: {
      if (k == 2) {
        r = Regime::polynomial(ratio(-1, 2));
        break;
      }
      const int lg = detail::ceil_log2(k);
      Rational lower = m >= k + 5 * lg ? ratio(-lg, 2) : generic_exp;
      Rational upper = ratio(-(detail::factorial_floor(k) - 1), 2);
      r = Regime{RegimeKind::Polynomial, {}, std::make_pair(lower, upper), false, {}, nlohmann::json::object()};
      break;
    }
    case RuleFamily::Copeland: {
      const int l = detail::l_alpha(rule.alpha);
      const bool even_k = k % 2 == 0, even_n = n % 2 == 0;
      const bool top = k == m || k == m - 1;
      r.witness["l_alpha"] = l;
      if (!even_n && even_k && top) {
        r.kind = RegimeKind::Zero;
      } else if (even_n && even_k &&
                 (k == m || (k == m - 1 && rule.alpha >= ratio(1, 2)) || (k == m - 1 && k <= l * (l + 1)))) {
        r.kind = RegimeKind::Polynomial;
        r.exponent = ratio(-k, 4);
      } else if (even_n && even_k && k == m - 1 && rule.alpha < ratio(1, 2) && k > l * (l + 1)) {
        r.kind = RegimeKind::Polynomial;
        r.exponent = ratio(-l * (l + 1), 4);
        r.witness["branch"] = "l_alpha";
      } else {
        r.kind = RegimeKind::Polynomial;
        r.exponent = Rational(0);
      }
      break;
    }
  }
  r.method = "closed-form";
  return r;
}

inline Regime closed_form_regime(const std::string& rule_id, int m, int k, std::int64_t n) {
  return closed_form_regime(parse_rule(rule_id), m, k, n);
}

// ---------------------------------------------------------------------------

inline Regime classify_ties(const RuleSpec& rule, const ModelSpec& model, int m, int k, std::int64_t n, Adversary adv,
                            const ClassifyOptions& opt = {}) {
  if (k < 1 || k > m) throw std::invalid_argument("k must lie in 1..m");
  if (!tie_event_supported(rule, m)) {
    if (!model.uniform)
      throw std::invalid_argument("generic classification of " + rule.id + " at m = " + std::to_string(m) +
                                  " exceeds the enumeration guard and the closed forms assume the uniform distribution");
    Regime r = closed_form_regime(rule, m, k, n);
    r.method = "closed-form-fallback";
    r.witness["generic"] = "unavailable";
    return r;
  }
  if (model.q() != static_cast<std::size_t>(factorial(m))) throw std::invalid_argument("model dimension must be m!");
  const auto ev = tie_event(rule, m, k, n);
  return classify_union(model, ev, n, adv, opt);
}

inline Regime classify_ties(const std::string& rule_id, const ModelSpec& model, int m, int k, std::int64_t n,
                            Adversary adv, const ClassifyOptions& opt = {}) {
  return classify_ties(parse_rule(rule_id), model, m, k, n, adv, opt);
}

struct CrossValidation {
  Regime generic;
  Regime closed;
  bool agree = false;
};

inline CrossValidation cross_validate(const std::string& rule_id, int m, int k, std::int64_t n) {
  CrossValidation out;
  out.generic = classify_ties(rule_id, impartial_culture(m), m, k, n, Adversary::Max);
  out.closed = closed_form_regime(rule_id, m, k, n);
  out.agree = out.generic.agrees_with(out.closed);
  return out;
}

}  // namespace smoothtie
