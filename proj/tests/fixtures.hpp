#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "sepflow/graph.hpp"
#include "sepflow/harvest.hpp"
#include "sepflow/matching.hpp"
#include "sepflow/random.hpp"
#include "sepflow/sketch.hpp"
#include "sepflow/types.hpp"

namespace fixtures {

// Embedding and graph whose harvests reliably produce violating paths.
//
// A tight gaussian core carries nearly all the capacity, so flows stay short
// and the saturated-flow branch keeps quiet.  A thin ring of far nodes (radius
// 0.8 in the first two coordinates) is wired with low-capacity edges to the
// core and to its 1..3-step ring neighbours: those hops pass the length filter
// individually, but as the sampling direction drifts between oracle calls the
// matched ring hops rotate with it, and two or three composed hops overshoot
// the hop budget of their endpoint displacement.
struct RingWorld {
  sepflow::Graph graph;
  sepflow::Embedding emb;
  sepflow::MatchingConfig mcfg;
  sepflow::HarvestConfig hcfg;
};

inline RingWorld ring_world() {
  using namespace sepflow;
  const int n_core = 48, n_ring = 32, d = 4;
  const double s_core = 0.02, radius = 0.8, w_cr = 1e-4;
  const int n = n_core + n_ring;

  RngStream rng(42);
  Matrix pts = Matrix::Zero(d, n);
  for (int j = 0; j < n_core; ++j)
    for (int i = 0; i < d; ++i) pts(i, j) = s_core * rng.normal();
  for (int j = 0; j < n_ring; ++j) {
    double th = 2.0 * std::numbers::pi * j / n_ring;
    pts(0, n_core + j) = radius * std::cos(th);
    pts(1, n_core + j) = radius * std::sin(th);
    for (int i = 2; i < d; ++i) pts(i, n_core + j) = 0.02 * rng.normal();
  }

  std::vector<Edge> edges;
  for (int i = 0; i < n_core; ++i)
    for (int j = i + 1; j < n_core; ++j) edges.push_back({i, j, 1.0});
  for (int i = 0; i < n_core; ++i)
    for (int j = 0; j < n_ring; ++j) edges.push_back({i, n_core + j, w_cr});
  for (int j = 0; j < n_ring; ++j)
    for (int step = 1; step <= 3; ++step)
      edges.push_back({n_core + j, n_core + (j + step) % n_ring, 5.0 * w_cr});

  RingWorld w{Graph(n, std::move(edges)), Embedding::dense(std::move(pts)), {}, {}};
  w.mcfg.alpha = 0.08;
  w.mcfg.c_prime = 0.24;
  w.mcfg.sigma = 0.3;
  w.mcfg.delta = 0.25;
  w.hcfg.runs = 8;
  w.hcfg.big_k = 2;
  return w;
}

inline sepflow::Embedding gaussian_embedding(int n, int d, double scale, sepflow::RngStream& rng) {
  sepflow::Matrix pts(d, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) pts(i, j) = scale * rng.normal();
  return sepflow::Embedding::dense(std::move(pts));
}

// Cliques of size k at -e1 and +e1 with per-node jitter in the second
// coordinate to keep points distinct.
inline sepflow::Embedding dumbbell_embedding(int k) {
  sepflow::Matrix pts = sepflow::Matrix::Zero(2, 2 * k);
  for (int i = 0; i < k; ++i) {
    pts(0, i) = -1.0;
    pts(1, i) = 1e-6 * i;
    pts(0, k + i) = 1.0;
    pts(1, k + i) = 1e-6 * i;
  }
  return sepflow::Embedding::dense(std::move(pts));
}

}  // namespace fixtures
