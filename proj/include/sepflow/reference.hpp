#pragma once

#include "sepflow/graph.hpp"
#include "sepflow/types.hpp"

namespace sepflow {

// Exact minimum s-t cut by subset enumeration.  Guarded to n <= 16.  The
// returned side contains s; ties are broken toward the lexicographically
// smallest membership mask (node 0 = lowest bit).
Cut brute_force_min_st_cut(const Graph& g, int s, int t);

// Exact minimum-value cut among sides with min(|S|, n-|S|) >= c*n, again by
// enumeration.  Guarded to n <= 20.
Cut brute_force_balanced_separator(const Graph& g, double c);

// X = n * exp(A) / Tr(exp(A)) for symmetric A via a dense eigensolve.
// Guarded to n <= 64.  Reference route for validating the randomized sketch.
Matrix dense_gram_exp(const Matrix& a);

}  // namespace sepflow
