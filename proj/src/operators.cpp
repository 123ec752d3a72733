#include "sepflow/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace sepflow {

StructuredOperator::StructuredOperator(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("structured operator: dimension must be positive");
}

void StructuredOperator::add(DiagonalTerm t) {
  if (t.diag.size() != n_) throw std::invalid_argument("diagonal term: length mismatch");
  diagonals_.push_back(std::move(t));
}

void StructuredOperator::add(EdgeLaplacianTerm t) {
  for (const Edge& e : t.edges) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_ || e.u == e.v)
      throw std::invalid_argument("edge laplacian term: bad edge");
  }
  edge_laplacians_.push_back(std::move(t));
}

void StructuredOperator::add(SubsetLaplacianTerm t) {
  for (int v : t.nodes)
    if (v < 0 || v >= n_) throw std::invalid_argument("subset laplacian term: node out of range");
  subset_laplacians_.push_back(std::move(t));
}

void StructuredOperator::add_scaled(const StructuredOperator& other, double coeff) {
  if (other.n_ != n_) throw std::invalid_argument("add_scaled: dimension mismatch");
  for (const auto& t : other.identities_) identities_.push_back({t.scale * coeff});
  for (const auto& t : other.diagonals_) diagonals_.push_back({t.diag * coeff});
  for (const auto& t : other.edge_laplacians_) edge_laplacians_.push_back({t.edges, t.scale * coeff});
  for (const auto& t : other.subset_laplacians_)
    subset_laplacians_.push_back({t.nodes, t.scale * coeff});
}

void StructuredOperator::apply(const Vector& x, Vector& out) const {
  if (x.size() != n_) throw std::invalid_argument("apply: vector length mismatch");
  out.setZero(n_);
  for (const auto& t : identities_) out += t.scale * x;
  for (const auto& t : diagonals_) out.array() += t.diag.array() * x.array();
  for (const auto& t : edge_laplacians_)
    for (const Edge& e : t.edges) {
      double d = t.scale * e.w * (x[e.u] - x[e.v]);
      out[e.u] += d;
      out[e.v] -= d;
    }
  for (const auto& t : subset_laplacians_) {
    double sum = 0.0;
    for (int v : t.nodes) sum += x[v];
    double k = static_cast<double>(t.nodes.size());
    for (int v : t.nodes) out[v] += t.scale * (k * x[v] - sum);
  }
}

Vector StructuredOperator::apply(const Vector& x) const {
  Vector out;
  apply(x, out);
  return out;
}

void StructuredOperator::densify_into(Matrix& acc, double coeff) const {
  if (acc.rows() != n_ || acc.cols() != n_)
    throw std::invalid_argument("densify_into: accumulator shape mismatch");
  for (const auto& t : identities_)
    acc.diagonal().array() += coeff * t.scale;
  for (const auto& t : diagonals_) acc.diagonal() += coeff * t.diag;
  for (const auto& t : edge_laplacians_)
    for (const Edge& e : t.edges) {
      double w = coeff * t.scale * e.w;
      acc(e.u, e.u) += w;
      acc(e.v, e.v) += w;
      acc(e.u, e.v) -= w;
      acc(e.v, e.u) -= w;
    }
  for (const auto& t : subset_laplacians_) {
    double w = coeff * t.scale;
    double k = static_cast<double>(t.nodes.size());
    for (int i : t.nodes) {
      acc(i, i) += w * (k - 1.0);
      for (int j : t.nodes)
        if (j != i) acc(i, j) -= w;
    }
  }
}

Matrix StructuredOperator::densify() const {
  Matrix acc = Matrix::Zero(n_, n_);
  densify_into(acc);
  return acc;
}

NormEstimate operator_norm_estimate(const StructuredOperator& op, RngStream& rng,
                                    int iterations) {
  if (iterations < 1) throw std::invalid_argument("operator_norm_estimate: iterations < 1");
  int n = op.dim();

  NormEstimate est;
  // Term-wise triangle inequality.  Edge Laplacians get a Gershgorin row
  // bound (twice the max weighted degree); a subset Laplacian on k nodes has
  // norm exactly k.
  for (const auto& t : op.identities()) est.upper += std::abs(t.scale);
  for (const auto& t : op.diagonals())
    est.upper += t.diag.size() > 0 ? t.diag.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& t : op.edge_laplacians()) {
    std::vector<double> degree(n, 0.0);
    for (const Edge& e : t.edges) {
      degree[e.u] += std::abs(e.w);
      degree[e.v] += std::abs(e.w);
    }
    double max_degree = 0.0;
    for (double d : degree) max_degree = std::max(max_degree, d);
    est.upper += 2.0 * std::abs(t.scale) * max_degree;
  }
  for (const auto& t : op.subset_laplacians())
    est.upper += std::abs(t.scale) * static_cast<double>(t.nodes.size());

  // Power iteration tracking |op x| / |x|, which converges to |lambda|_max
  // even when the extreme eigenvalues have mixed signs.
  Vector x = sample_gaussian(n, rng);
  double nx = x.norm();
  if (nx == 0.0) return est;
  x /= nx;
  double value = 0.0;
  Vector y;
  for (int i = 0; i < iterations; ++i) {
    op.apply(x, y);
    double ny = y.norm();
    if (ny == 0.0) return est;  // op annihilates the iterate; 0 is a valid lower bound
    value = ny;
    x = y / ny;
  }
  est.lower = value;
  return est;
}

}  // namespace sepflow
