#pragma once

#include <vector>

#include "sepflow/graph.hpp"
#include "sepflow/random.hpp"
#include "sepflow/types.hpp"

namespace sepflow {

// Symmetric operator kept as a sum of cheap structured terms so that matvecs
// stay O(size of the terms) instead of O(n^2).

struct ScaledIdentity {
  double scale = 0.0;
};

struct DiagonalTerm {
  Vector diag;  // length n
};

// x -> scale * sum_e w_e (x_u - x_v)(e_u - e_v): weighted graph Laplacian.
struct EdgeLaplacianTerm {
  std::vector<Edge> edges;
  double scale = 1.0;
};

// Laplacian of the complete graph on a node subset, times scale.
struct SubsetLaplacianTerm {
  std::vector<int> nodes;
  double scale = 1.0;
};

class StructuredOperator {
 public:
  StructuredOperator() = default;  // dimension 0 until assigned
  explicit StructuredOperator(int n);

  int dim() const { return n_; }
  void add(ScaledIdentity t) { identities_.push_back(t); }
  void add(DiagonalTerm t);
  void add(EdgeLaplacianTerm t);
  void add(SubsetLaplacianTerm t);
  // Appends every term of other multiplied by coeff.
  void add_scaled(const StructuredOperator& other, double coeff);

  void apply(const Vector& x, Vector& out) const;
  Vector apply(const Vector& x) const;
  Matrix densify() const;
  // Adds the dense form, times coeff, into acc (n x n).
  void densify_into(Matrix& acc, double coeff = 1.0) const;

  size_t term_count() const {
    return identities_.size() + diagonals_.size() + edge_laplacians_.size() +
           subset_laplacians_.size();
  }

  const std::vector<ScaledIdentity>& identities() const { return identities_; }
  const std::vector<DiagonalTerm>& diagonals() const { return diagonals_; }
  const std::vector<EdgeLaplacianTerm>& edge_laplacians() const { return edge_laplacians_; }
  const std::vector<SubsetLaplacianTerm>& subset_laplacians() const { return subset_laplacians_; }

 private:
  int n_ = 0;
  std::vector<ScaledIdentity> identities_;
  std::vector<DiagonalTerm> diagonals_;
  std::vector<EdgeLaplacianTerm> edge_laplacians_;
  std::vector<SubsetLaplacianTerm> subset_laplacians_;
};

struct NormEstimate {
  double lower = 0.0;  // power-iteration value, converges to |lambda|_max from below
  double upper = 0.0;  // triangle-inequality / Gershgorin bound over the terms
};

NormEstimate operator_norm_estimate(const StructuredOperator& op, RngStream& rng,
                                    int iterations = 200);

}  // namespace sepflow
