#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sepflow/types.hpp"

namespace sepflow {

// Stable hash of (seed, stream) used to key independent generator streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded generator stream.  Streams derived from the same seed but different
// stream indices are independent for practical purposes, so parallel workers
// can each own stream(seed, i) and produce schedule-independent results.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix_seed(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Box-Muller without state so the draw sequence is easy to reason about:
  // exactly two uniforms per normal.
  double normal();

 private:
  std::mt19937_64 engine_;
};

// d iid standard normal components, drawn in index order.
Vector sample_gaussian(int d, RngStream& rng);

// One step of the correlated walk: out_i = omega*u_i + sqrt(1-omega^2)*g_i.
// Marginally standard normal again when u is.
Vector correlate(const Vector& u, double omega, RngStream& rng);

// k-1 further steps starting from u1; returns {u1, u2, ..., uk}.
std::vector<Vector> chain(const Vector& u1, double omega, int k, RngStream& rng);

double normal_cdf(double x);
// Inverse of normal_cdf on (0, 1), absolute error well under 1e-9.
double normal_quantile(double p);

struct ConcentrationResult {
  double estimate = 0.0;     // empirical Pr[u in A and u' in B]
  double stderr_ = 0.0;      // binomial standard error
  double lower_bound = 0.0;  // delta^(2/(1-omega))
};

// Monte Carlo check of the correlated-pair mass of the lower-tail halfspace
// A = B = {u : u_1 <= quantile(delta)}.  Only the first coordinate decides
// membership; d just sets the dimension of the sampled vectors.
ConcentrationResult concentration_estimate(double omega, double delta, int d, long trials,
                                           RngStream& rng);

// True when <y-x, u> < sqrt(6 ln m) * |y-x| for every ordered pair of
// distinct columns (m = number of columns).  Coincident columns denote the
// same point and contribute no pair.
bool is_regular(const Vector& u, const Matrix& points);

// Same predicate with the pairwise distances precomputed once, for callers
// that test many directions against one point set.
class RegularityChecker {
 public:
  explicit RegularityChecker(const Matrix& points);
  bool operator()(const Vector& u) const;

 private:
  Matrix points_;
  Matrix threshold_;  // sqrt(6 ln m) * pairwise distance
};

}  // namespace sepflow
