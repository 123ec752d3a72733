#pragma once

#include <vector>

#include "sepflow/operators.hpp"
#include "sepflow/random.hpp"
#include "sepflow/types.hpp"

namespace sepflow {

// Columns are points; nodes() maps each column to an original node id, so a
// restriction to a subset keeps its identity.
class Embedding {
 public:
  Embedding() = default;
  Embedding(Matrix points, std::vector<int> nodes, int total_nodes);
  // All nodes active, ids 0..cols-1.
  static Embedding dense(Matrix points);

  int count() const { return static_cast<int>(points_.cols()); }
  int dim() const { return static_cast<int>(points_.rows()); }
  int total_nodes() const { return total_nodes_; }
  const Matrix& points() const { return points_; }
  const std::vector<int>& nodes() const { return nodes_; }
  int col_of(int node) const;  // -1 when the node is inactive
  Eigen::Ref<const Vector> point(int col) const { return points_.col(col); }
  double sum_sq() const { return points_.squaredNorm(); }

  Embedding restricted_to(const std::vector<int>& cols) const;

 private:
  Matrix points_;
  std::vector<int> nodes_;
  std::vector<int> col_of_;
  int total_nodes_ = 0;
};

struct SketchParams {
  int d = 0;            // sketch dimension
  int k = 0;            // Taylor order for exp(A/2)
  double gamma = 0.0;   // relative distortion target
  double tau = 0.0;     // additive distortion floor
  double lambda = 0.0;  // promised bound on |A|
};

// Distortion and order schedule for the randomized Gram factorization:
//   gamma = min(alpha/(20 n pi), Delta/(20 (K+1)), 1/2)
//   tau   = min(2, a/2)
//   d     = ceil(Cd ln n / gamma^2)
//   k     = ceil(max(Ck lambda^2, ln(n^(5/2)/tau))), raised if needed until
//           the Taylor tail of exp(lambda/2) drops below 1e-9
// lambda defaults to the loop bound 4 (alpha/n + 2 pi) n ln n / alpha.
SketchParams choose_params(int n, double alpha, double pi, double delta, int big_k, double a,
                           double cd = 24.0, double ck = 4.0);
// Same d/k schedule with gamma, tau, lambda pinned directly.
SketchParams params_for(int n, double gamma, double tau, double lambda, double cd = 24.0,
                        double ck = 4.0);

// Truncated series y = sum_{i<=k} (scale*A)^i r / i!.
Vector taylor_exp_apply(const StructuredOperator& a, const Vector& r, int k, double scale);

// Smallest k whose exp tail bound at argument x is below tol.
int taylor_order_floor(double x, double tol);

// Randomized Gram factorization of X = n exp(A) / Tr exp(A): rows of
// (1/sqrt(d)) R exp(A/2) rescaled so that the squared norms sum to n.
// Requires |A| <= lambda and k at or above the schedule floor.
Embedding exp_sketch(const StructuredOperator& a, const SketchParams& params, RngStream& rng);

// Exact factorization of the same X through a dense eigensolve; the columns
// live in R^n.  This is the default embedding backend at small n.
Embedding exact_gram_embedding(const Matrix& a_dense);

}  // namespace sepflow
