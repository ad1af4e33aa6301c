#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "preference.hpp"
#include "rational.hpp"
#include "rules.hpp"

namespace smoothtie {

struct ResourceCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// SplitMix64 stream whose starting point is a function of (seed, trial) only.
class TrialEngine {
 public:
  using result_type = std::uint64_t;
  TrialEngine(std::uint64_t seed, std::uint64_t trial) : state_(splitmix64(seed) ^ splitmix64(trial * 0xd1b54a32d192ed03ULL + 1)) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::vector<double> to_doubles(const RationalVector& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

namespace detail {

inline void check_distribution(const RationalVector& pi) {
  Rational s = 0;
  for (const auto& x : pi) {
    if (x < 0) throw std::invalid_argument("distribution has a negative entry");
    s += x;
  }
  if (s != 1) throw std::invalid_argument("distribution must sum to 1");
}

inline std::size_t categorical(TrialEngine& eng, const std::vector<double>& cdf) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(eng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
}

inline std::vector<double> cdf_of(const RationalVector& pi) {
  std::vector<double> cdf;
  Rational acc = 0;
  for (const auto& x : pi) {
    acc += x;
    cdf.push_back(acc.get_d());
  }
  return cdf;
}

}  // namespace detail

/// One categorical draw per agent.
inline IntVector sample_histogram(const std::vector<RationalVector>& distributions, std::uint64_t seed,
                                  std::uint64_t index = 0) {
  if (distributions.empty()) throw std::invalid_argument("need at least one agent");
  const auto q = distributions.front().size();
  TrialEngine eng(seed, index);
  IntVector h(q, 0);
  for (const auto& d : distributions) {
    if (d.size() != q) throw std::invalid_argument("agent distributions have different lengths");
    ++h[detail::categorical(eng, detail::cdf_of(d))];
  }
  return h;
}

/// n i.i.d. draws from p, sampled as a multinomial through conditional binomials.
inline void sample_multinomial(TrialEngine& eng, std::int64_t n, const std::vector<double>& p, IntVector& out) {
  std::int64_t left = n;
  double mass = 1.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (left == 0 || mass <= 0) {
      out[i] = 0;
      continue;
    }
    const double prob = std::clamp(p[i] / mass, 0.0, 1.0);
    out[i] = std::binomial_distribution<std::int64_t>(left, prob)(eng);
    left -= out[i];
    mass -= p[i];
  }
  out.back() = left;
}

struct SampleEstimate {
  std::int64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double p_hat = 0;
  double lo = 0;
  double hi = 0;
  std::uint64_t seed = 0;
};

/// 95% Wilson score interval.
inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054) {
  if (trials == 0) throw std::invalid_argument("zero trials");
  const double N = static_cast<double>(trials);
  const double p = hits / N;
  const double denom = 1 + z * z / N;
  const double centre = (p + z * z / (2 * N)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / N + z * z / (4 * N * N)) / denom;
  double lo = std::max(0.0, centre - half), hi = std::min(1.0, centre + half);
  if (hits == 0) lo = 0;
  if (hits == trials) hi = 1;
  return {std::min(lo, p), std::max(hi, p)};
}

struct SimulationConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// Fraction of sampled profiles with exactly k winners; agents are i.i.d. with distribution pi.
inline SampleEstimate estimate_tie_probability(const RuleSpec& rule, const RationalVector& pi, int m, int k,
                                               std::int64_t n, const SimulationConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("trials must be positive");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (static_cast<std::int64_t>(pi.size()) != factorial(m)) throw std::invalid_argument("distribution length must be m!");
  detail::check_distribution(pi);
  const auto p = to_doubles(pi);
  const unsigned workers = std::max(1u, cfg.workers);
  std::vector<std::uint64_t> hits(workers, 0);
  auto run = [&](unsigned w) {
    IntVector counts(p.size());
    for (std::uint64_t t = w; t < cfg.trials; t += workers) {
      TrialEngine eng(cfg.seed, t);
      sample_multinomial(eng, n, p, counts);
      if (popcount(winners(rule, Histogram(m, counts))) == k) ++hits[w];
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  SampleEstimate est;
  est.n = n;
  est.trials = cfg.trials;
  for (auto h : hits) est.hits += h;
  est.p_hat = static_cast<double>(est.hits) / cfg.trials;
  std::tie(est.lo, est.hi) = wilson_interval(est.hits, cfg.trials);
  est.seed = cfg.seed;
  return est;
}

// ---------------------------------------------------------------------------
// Exact oracles.

inline constexpr std::uint64_t kDefaultHistogramCap = 5'000'000;

/// C(n + q - 1, q - 1), saturating at the cap + 1.
inline std::uint64_t histogram_count(std::int64_t n, std::size_t q, std::uint64_t cap) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n + q - 1), static_cast<unsigned long>(q - 1));
  if (c > mpz_class(static_cast<unsigned long>(cap))) return cap + 1;
  return c.get_ui();
}

/// Pr(|r(P)| = k) for n i.i.d. agents with distribution pi, summing multinomial weights over all histograms.
inline Rational exact_tie_probability(const RuleSpec& rule, const RationalVector& pi, int m, int k, std::int64_t n,
                                      std::uint64_t cap = kDefaultHistogramCap) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  const std::size_t q = factorial(m);
  if (pi.size() != q) throw std::invalid_argument("distribution length must be m!");
  detail::check_distribution(pi);
  const auto count = histogram_count(n, q, cap);
  if (count > cap)
    throw ResourceCapExceeded("enumeration needs more than " + std::to_string(cap) + " histograms");
  // powers[i][j] = pi_i^j / j!
  std::vector<RationalVector> powers(q, RationalVector(n + 1));
  for (std::size_t i = 0; i < q; ++i) {
    powers[i][0] = 1;
    for (std::int64_t j = 1; j <= n; ++j) powers[i][j] = powers[i][j - 1] * pi[i] / Rational(static_cast<long>(j));
  }
  mpz_class nfact;
  mpz_fac_ui(nfact.get_mpz_t(), static_cast<unsigned long>(n));
  Rational total = 0;
  IntVector h(q, 0);
  std::function<void(std::size_t, std::int64_t, const Rational&)> rec = [&](std::size_t i, std::int64_t left,
                                                                          const Rational& w) {
    if (w == 0) return;
    if (i + 1 == q) {
      h[i] = left;
      Rational weight = w * powers[i][left];
      if (weight != 0 && popcount(winners(rule, Histogram(m, h))) == k) total += weight;
      return;
    }
    for (std::int64_t x = 0; x <= left; ++x) {
      h[i] = x;
      rec(i + 1, left - x, w * powers[i][x]);
    }
  };
  rec(0, n, Rational(1));
  total *= Rational(nfact);
  total.canonicalize();
  return total;
}

inline constexpr std::int64_t kMaxPmfAgents = 60;

/// Pr(X = x) for independent agents with the given distributions, by convolution restricted to y <= x.
inline Rational exact_histogram_pmf(const std::vector<RationalVector>& distributions, const IntVector& x) {
  const auto n = static_cast<std::int64_t>(distributions.size());
  if (n > kMaxPmfAgents) throw ResourceCapExceeded("exact PMF supports at most 60 agents");
  const std::size_t q = x.size();
  std::int64_t total = 0;
  for (auto v : x) {
    if (v < 0) throw std::invalid_argument("histogram entries must be nonnegative");
    total += v;
  }
  for (const auto& d : distributions) {
    if (d.size() != q) throw std::invalid_argument("distribution length must match the histogram");
    detail::check_distribution(d);
  }
  if (total != n) return 0;
  if (n == 0) return 1;
  // mixed-radix index of y with radix x_i + 1
  std::vector<std::uint64_t> stride(q, 1);
  for (std::size_t i = 1; i < q; ++i) stride[i] = stride[i - 1] * static_cast<std::uint64_t>(x[i - 1] + 1);
  // integer numerators over a common denominator per agent
  std::vector<std::vector<mpz_class>> num(n, std::vector<mpz_class>(q));
  mpz_class scale = 1;
  for (std::int64_t j = 0; j < n; ++j) {
    mpz_class den = 1;
    for (const auto& v : distributions[j]) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
    for (std::size_t i = 0; i < q; ++i) num[j][i] = distributions[j][i].get_num() * (den / distributions[j][i].get_den());
    scale *= den;
  }
  std::unordered_map<std::uint64_t, mpz_class> layer{{0, 1}}, next;
  std::vector<std::int64_t> y(q);
  for (std::int64_t j = 0; j < n; ++j) {
    next.clear();
    for (const auto& [idx, val] : layer) {
      std::uint64_t rest = idx;
      for (std::size_t i = q; i-- > 0;) {
        y[i] = static_cast<std::int64_t>(rest / stride[i]);
        rest %= stride[i];
      }
      for (std::size_t i = 0; i < q; ++i) {
        if (y[i] >= x[i] || num[j][i] == 0) continue;
        next[idx + stride[i]] += val * num[j][i];
      }
    }
    std::swap(layer, next);
  }
  std::uint64_t target = 0;
  for (std::size_t i = 0; i < q; ++i) target += static_cast<std::uint64_t>(x[i]) * stride[i];
  auto it = layer.find(target);
  if (it == layer.end()) return 0;
  Rational out(it->second, scale);
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Log-log fits.

struct FitPoint {
  double n = 0;
  double p = 0;
};

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
  std::vector<FitPoint> points;
};

/// Least squares of log p against log n.
inline ExponentFit fit_exponent(const std::vector<FitPoint>& points) {
  if (points.size() < 3) throw std::invalid_argument("an exponent fit needs at least three points");
  for (const auto& pt : points)
    if (!(pt.p > 0) || !(pt.n > 0)) throw std::invalid_argument("fit points need positive n and probability");
  const double N = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& pt : points) {
    sx += std::log(pt.n);
    sy += std::log(pt.p);
  }
  const double mx = sx / N, my = sy / N;
  double sxx = 0, sxy = 0;
  for (const auto& pt : points) {
    const double dx = std::log(pt.n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(pt.p) - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit needs at least two distinct n");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (const auto& pt : points) {
    const double r = std::log(pt.p) - (fit.intercept + fit.slope * std::log(pt.n));
    rss += r * r;
  }
  fit.stderr_slope = N > 2 ? std::sqrt(rss / (N - 2) / sxx) : 0.0;
  if (rss < 1e-24) fit.stderr_slope = 0;
  fit.points = points;
  return fit;
}

/// Fit over simulation estimates, dropping points whose Wilson lower bound is 0.
inline ExponentFit fit_exponent(const std::vector<SampleEstimate>& estimates) {
  std::vector<FitPoint> pts;
  for (const auto& e : estimates)
    if (e.lo > 0) pts.push_back({static_cast<double>(e.n), e.p_hat});
  return fit_exponent(pts);
}

}  // namespace smoothtie
