#include "sepflow/sketch.hpp"

#include <cmath>
#include <stdexcept>

namespace sepflow {

Embedding::Embedding(Matrix points, std::vector<int> nodes, int total_nodes)
    : points_(std::move(points)), nodes_(std::move(nodes)), total_nodes_(total_nodes) {
  if (static_cast<int>(nodes_.size()) != points_.cols())
    throw std::invalid_argument("embedding: one node id per column required");
  col_of_.assign(total_nodes_, -1);
  for (size_t i = 0; i < nodes_.size(); ++i) {
    int v = nodes_[i];
    if (v < 0 || v >= total_nodes_) throw std::invalid_argument("embedding: node id out of range");
    if (col_of_[v] >= 0) throw std::invalid_argument("embedding: duplicate node id");
    col_of_[v] = static_cast<int>(i);
  }
}

Embedding Embedding::dense(Matrix points) {
  std::vector<int> ids(points.cols());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  int total = static_cast<int>(points.cols());
  return Embedding(std::move(points), std::move(ids), total);
}

int Embedding::col_of(int node) const {
  if (node < 0 || node >= total_nodes_) return -1;
  return col_of_[node];
}

Embedding Embedding::restricted_to(const std::vector<int>& cols) const {
  Matrix pts(points_.rows(), cols.size());
  std::vector<int> ids(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) {
    int c = cols[i];
    if (c < 0 || c >= count()) throw std::invalid_argument("embedding: column out of range");
    pts.col(i) = points_.col(c);
    ids[i] = nodes_[c];
  }
  return Embedding(std::move(pts), std::move(ids), total_nodes_);
}

int taylor_order_floor(double x, double tol) {
  if (!(x >= 0.0)) throw std::invalid_argument("taylor_order_floor: negative argument");
  if (!(tol > 0.0)) throw std::invalid_argument("taylor_order_floor: tolerance must be positive");
  // Tail sum_{i>k} x^i/i! <= term(k+1) / (1 - x/(k+2)) once k+2 > x.
  double term = 1.0;
  int k = 0;
  for (; k < 10000; ++k) {
    term *= x / (k + 1);  // now x^(k+1)/(k+1)!
    if (k + 2 > x) {
      double tail = term / (1.0 - x / (k + 2));
      if (tail <= tol) return k;
    }
  }
  throw std::invalid_argument("taylor_order_floor: did not converge");
}

namespace {

SketchParams schedule(int n, double gamma, double tau, double lambda, double cd, double ck) {
  if (n < 2) throw std::invalid_argument("sketch schedule: n < 2");
  if (!(gamma > 0.0) || !(tau > 0.0) || !(lambda >= 0.0))
    throw std::invalid_argument("sketch schedule: gamma, tau must be positive");
  SketchParams p;
  p.gamma = gamma;
  p.tau = tau;
  p.lambda = lambda;
  p.d = static_cast<int>(std::ceil(cd * std::log(static_cast<double>(n)) / (gamma * gamma)));
  double floor_k = std::max(ck * lambda * lambda, std::log(std::pow(n, 2.5) / tau));
  p.k = static_cast<int>(std::ceil(floor_k));
  p.k = std::max(p.k, taylor_order_floor(lambda / 2.0, 1e-9));
  p.k = std::max(p.k, 1);
  return p;
}

}  // namespace

SketchParams choose_params(int n, double alpha, double pi, double delta, int big_k, double a,
                           double cd, double ck) {
  if (!(alpha > 0.0) || !(pi > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("choose_params: alpha, pi, delta must be positive");
  if (big_k < 1) throw std::invalid_argument("choose_params: K < 1");
  if (!(a > 0.0)) throw std::invalid_argument("choose_params: a must be positive");
  double gamma = std::min({alpha / (20.0 * n * pi), delta / (20.0 * (big_k + 1)), 0.5});
  double tau = std::min(2.0, a / 2.0);
  double lambda = 4.0 * (alpha / n + 2.0 * pi) * n * std::log(static_cast<double>(n)) / alpha;
  return schedule(n, gamma, tau, lambda, cd, ck);
}

SketchParams params_for(int n, double gamma, double tau, double lambda, double cd, double ck) {
  return schedule(n, gamma, tau, lambda, cd, ck);
}

Vector taylor_exp_apply(const StructuredOperator& a, const Vector& r, int k, double scale) {
  if (k < 0) throw std::invalid_argument("taylor_exp_apply: negative order");
  Vector acc = r;
  Vector term = r;
  Vector tmp;
  for (int i = 1; i <= k; ++i) {
    a.apply(term, tmp);
    term = tmp * (scale / i);
    acc += term;
  }
  return acc;
}

Embedding exp_sketch(const StructuredOperator& a, const SketchParams& params, RngStream& rng) {
  int n = a.dim();
  if (params.d < 1) throw std::invalid_argument("exp_sketch: d < 1");
  int floor_k = static_cast<int>(
      std::ceil(std::max(params.lambda * params.lambda,
                         std::log(std::pow(static_cast<double>(n), 2.5) / params.tau))));
  floor_k = std::max(floor_k, taylor_order_floor(params.lambda / 2.0, 1e-9));
  if (params.k < floor_k)
    throw std::invalid_argument("exp_sketch: k below the floor implied by lambda and tau");

  // Row j of the sketch is (1/sqrt(d)) r_j^T exp(A/2); columns are the
  // factor vectors of n exp(A)/Tr exp(A) after one global rescale.
  Matrix pts(params.d, n);
  double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params.d));
  for (int j = 0; j < params.d; ++j) {
    Vector r = sample_gaussian(n, rng);
    pts.row(j) = (taylor_exp_apply(a, r, params.k, 0.5) * inv_sqrt_d).transpose();
  }
  double total = pts.squaredNorm();
  if (!(total > 0.0)) throw std::runtime_error("exp_sketch: degenerate sketch");
  pts *= std::sqrt(static_cast<double>(n) / total);
  return Embedding::dense(std::move(pts));
}

Embedding exact_gram_embedding(const Matrix& a_dense) {
  if (a_dense.rows() != a_dense.cols())
    throw std::invalid_argument("exact_gram_embedding: matrix not square");
  Eigen::Index n = a_dense.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a_dense);
  Vector lambda = es.eigenvalues();
  double shift = lambda.maxCoeff();
  Vector w = (lambda.array() - shift).exp();
  double trace = w.sum();
  // Columns of Q diag(sqrt(n w / tr)) Q^T form an exact Gram factor.
  Vector root = (w * (static_cast<double>(n) / trace)).cwiseSqrt();
  Matrix pts = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return Embedding::dense(std::move(pts));
}

}  // namespace sepflow
