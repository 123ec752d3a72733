#include "sepflow/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sepflow {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream ^ 0xA5A5A5A5A5A5A5A5ULL));
}

double RngStream::normal() {
  double u1 = uniform();
  double u2 = uniform();
  // 1 - u1 lies in (0, 1], so the log is finite.
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

Vector sample_gaussian(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_gaussian: d must be positive");
  Vector u(d);
  for (int i = 0; i < d; ++i) u[i] = rng.normal();
  return u;
}

Vector correlate(const Vector& u, double omega, RngStream& rng) {
  if (!(omega >= 0.0 && omega < 1.0))
    throw std::invalid_argument("correlate: omega outside [0, 1)");
  double s = std::sqrt(1.0 - omega * omega);
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = omega * u[i] + s * rng.normal();
  return out;
}

std::vector<Vector> chain(const Vector& u1, double omega, int k, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("chain: k must be positive");
  std::vector<Vector> seq;
  seq.reserve(k);
  seq.push_back(u1);
  for (int i = 1; i < k; ++i) seq.push_back(correlate(seq.back(), omega, rng));
  return seq;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0, 1)");

  // Acklam's rational approximation, then two Newton corrections, which takes
  // the error far below 1e-9 over the whole open interval.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int step = 0; step < 2; ++step) {
    double err = normal_cdf(x) - p;
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf <= 0.0) break;
    x -= err / pdf;
  }
  return x;
}

ConcentrationResult concentration_estimate(double omega, double delta, int d, long trials,
                                           RngStream& rng) {
  if (!(omega >= 0.0 && omega < 1.0))
    throw std::invalid_argument("concentration_estimate: omega outside [0, 1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("concentration_estimate: delta outside (0, 1)");
  if (d < 1) throw std::invalid_argument("concentration_estimate: d must be positive");
  if (trials < 1000) throw std::invalid_argument("concentration_estimate: need >= 1000 trials");

  double q = normal_quantile(delta);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    Vector u = sample_gaussian(d, rng);
    Vector v = correlate(u, omega, rng);
    if (u[0] <= q && v[0] <= q) ++hits;
  }
  ConcentrationResult out;
  out.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  out.stderr_ = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  out.lower_bound = std::pow(delta, 2.0 / (1.0 - omega));
  return out;
}

bool is_regular(const Vector& u, const Matrix& points) {
  Eigen::Index m = points.cols();
  if (m < 2) return true;
  double t = std::sqrt(6.0 * std::log(static_cast<double>(m)));
  Vector w = points.transpose() * u;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      double dist = (points.col(j) - points.col(i)).norm();
      if (dist == 0.0) continue;  // same point
      if (std::abs(w[j] - w[i]) >= t * dist) return false;
    }
  return true;
}

RegularityChecker::RegularityChecker(const Matrix& points) : points_(points) {
  Eigen::Index m = points.cols();
  double t = m < 2 ? 0.0 : std::sqrt(6.0 * std::log(static_cast<double>(m)));
  threshold_.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      threshold_(i, j) = t * (points.col(j) - points.col(i)).norm();
}

bool RegularityChecker::operator()(const Vector& u) const {
  Eigen::Index m = points_.cols();
  if (m < 2) return true;
  Vector w = points_.transpose() * u;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (threshold_(i, j) == 0.0) continue;
      if (std::abs(w[j] - w[i]) >= threshold_(i, j)) return false;
    }
  return true;
}

}  // namespace sepflow
