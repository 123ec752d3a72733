#include "sepflow/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sepflow {

namespace {

std::vector<char> mask_to_side(std::uint32_t mask, int n) {
  std::vector<char> side(n, 0);
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) side[i] = 1;
  return side;
}

}  // namespace

Cut brute_force_min_st_cut(const Graph& g, int s, int t) {
  int n = g.node_count();
  if (n > 16) throw std::invalid_argument("brute_force_min_st_cut: n > 16");
  if (s < 0 || s >= n || t < 0 || t >= n || s == t)
    throw std::invalid_argument("brute_force_min_st_cut: bad terminals");

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!(mask & (1u << s)) || (mask & (1u << t))) continue;
    double v = 0.0;
    for (const Edge& e : g.edges())
      if (((mask >> e.u) & 1) != ((mask >> e.v) & 1)) v += e.w;
    if (v < best) {
      best = v;
      best_mask = mask;
    }
  }
  return make_cut(g, mask_to_side(best_mask, n));
}

Cut brute_force_balanced_separator(const Graph& g, double c) {
  int n = g.node_count();
  if (n > 20) throw std::invalid_argument("brute_force_balanced_separator: n > 20");
  if (n < 2) throw std::invalid_argument("brute_force_balanced_separator: n < 2");
  if (!(c > 0.0 && c <= 0.5))
    throw std::invalid_argument("brute_force_balanced_separator: c outside (0, 1/2]");

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  bool found = false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int inside = __builtin_popcount(mask);
    if (std::min(inside, n - inside) < c * n) continue;
    double v = 0.0;
    for (const Edge& e : g.edges())
      if (((mask >> e.u) & 1) != ((mask >> e.v) & 1)) v += e.w;
    if (v < best) {
      best = v;
      best_mask = mask;
      found = true;
    }
  }
  if (!found)
    throw std::invalid_argument("brute_force_balanced_separator: no side meets the balance");
  return make_cut(g, mask_to_side(best_mask, n));
}

Matrix dense_gram_exp(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("dense_gram_exp: matrix not square");
  Eigen::Index n = a.rows();
  if (n < 1 || n > 64) throw std::invalid_argument("dense_gram_exp: n outside [1, 64]");
  if (!a.isApprox(a.transpose(), 1e-12))
    throw std::invalid_argument("dense_gram_exp: matrix not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Vector lambda = es.eigenvalues();
  double shift = lambda.maxCoeff();
  Vector w = (lambda.array() - shift).exp();
  double trace = w.sum();
  Vector scaled = w * (static_cast<double>(n) / trace);
  return es.eigenvectors() * scaled.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace sepflow
