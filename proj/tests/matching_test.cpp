#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "sepflow/graph.hpp"
#include "sepflow/matching.hpp"
#include "sepflow/maxflow.hpp"
#include "sepflow/random.hpp"
#include "sepflow/sketch.hpp"

using namespace sepflow;

namespace {

// Mirror of the oracle's augmented network: graph edges first, then source
// edges in a_side order, then sink edges in b_side order.
struct Recon {
  double flow_value = 0.0;
  std::map<std::pair<int, int>, double> pair_demand;
};

Recon reconstruct(const MatchingResult& r, const Graph& g) {
  int n = g.node_count(), s = n, t = n + 1;
  FlowNetwork net(n + 2);
  for (const Edge& e : g.edges()) net.add_edge(e.u, e.v, e.w);
  for (int v : r.a_side) net.add_edge(s, v, r.pi);
  for (int v : r.b_side) net.add_edge(v, t, r.pi);
  FlowResult fr = max_flow(net, s, t);
  std::vector<char> in_a(net.node_count(), 0), in_b(net.node_count(), 0);
  for (int v : r.a_side) in_a[v] = 1;
  for (int v : r.b_side) in_b[v] = 1;
  Recon rec;
  rec.flow_value = fr.value;
  for (const PathEntry& e : flow_decompose(net, fr, s, t, in_a, in_b).entries)
    rec.pair_demand[{e.x, e.y}] += e.amount;
  return rec;
}

int trichotomy_misses = 0;

// Per-branch contract checks; u must already be canonical.
void check_contracts(const MatchingResult& r, const Vector& u, const Embedding& emb,
                     const Graph& g, const MatchingConfig& cfg) {
  int m = emb.count();
  CHECK(r.n_active == m);
  CHECK(r.pi == cfg.pi_for(m));
  int need = static_cast<int>(std::ceil(cfg.c_prime * m));

  if (r.kind == MatchingResult::Kind::kCut) {
    int active_s = 0, active_t = 0;
    for (int v : emb.nodes()) (r.cut.side[v] ? active_s : active_t) += 1;
    CHECK(active_s >= need);
    CHECK(active_t >= need);
    CHECK(r.cut.value == cut_value(g, r.cut.side));
    Recon rec = reconstruct(r, g);
    CHECK(rec.flow_value < 6.0 * cfg.alpha / cfg.delta + 1e-9);
    return;
  }

  if (r.kind == MatchingResult::Kind::kSaturatedFlow) {
    double observed = 0.0;
    for (const PathEntry& e : r.flow.demands.entries) {
      int cx = emb.col_of(e.x), cy = emb.col_of(e.y);
      REQUIRE(cx >= 0);
      REQUIRE(cy >= 0);
      CHECK(e.amount > 0.0);
      observed += e.amount * (emb.point(cx) - emb.point(cy)).squaredNorm();
    }
    CHECK(observed == doctest::Approx(r.flow.observed).epsilon(1e-12));
    CHECK(r.flow.observed >= 2.0 * cfg.alpha * (1.0 - 1e-9));
    CHECK(r.flow.flow_value >= cfg.c_prime * m * r.pi - 1e-9);
    for (const Edge& e : r.flow.flow_support) {
      bool found = false;
      for (const Edge& ge : g.edges()) {
        if (ge.u == e.u && ge.v == e.v) {
          CHECK(e.w <= ge.w + 1e-9);
          found = true;
          break;
        }
      }
      CHECK(found);
    }
    return;
  }

  // Matched branch: recompute the demands and verify the three filters,
  // the degree bound, and maximality of the greedy matching.
  Recon rec = reconstruct(r, g);
  Vector w = emb.points().transpose() * u;
  auto stretch_of = [&](int x, int y) { return w[emb.col_of(y)] - w[emb.col_of(x)]; };
  auto dist_sq = [&](int x, int y) {
    return (emb.point(emb.col_of(x)) - emb.point(emb.col_of(y))).squaredNorm();
  };

  std::set<std::pair<int, int>> kept;
  std::vector<char> tail_used(g.node_count(), 0), head_used(g.node_count(), 0);
  for (const MatchEdge& e : r.matched.edges) {
    CHECK_FALSE(tail_used[e.tail]);
    CHECK_FALSE(head_used[e.head]);
    tail_used[e.tail] = 1;
    head_used[e.head] = 1;
    kept.insert({e.tail, e.head});
    auto it = rec.pair_demand.find({e.tail, e.head});
    REQUIRE(it != rec.pair_demand.end());
    CHECK(it->second > 0.0);
    CHECK(stretch_of(e.tail, e.head) >= cfg.sigma);
    CHECK(dist_sq(e.tail, e.head) <= cfg.delta);
  }

  bool any_filtered_pair = false;
  for (const auto& [key, amount] : rec.pair_demand) {
    if (!(amount > 0.0)) continue;
    auto [x, y] = key;
    if (stretch_of(x, y) < cfg.sigma) continue;
    any_filtered_pair = true;
    if (dist_sq(x, y) > cfg.delta) continue;
    if (!kept.count({x, y})) CHECK((tail_used[x] || head_used[y]));
  }

  double observed = 0.0;
  for (const auto& [key, amount] : rec.pair_demand)
    observed += amount * dist_sq(key.first, key.second);
  if (any_filtered_pair && observed < 2.0 * cfg.alpha &&
      static_cast<double>(r.matched.edges.size()) < cfg.c_prime * m / 3.0) {
    ++trichotomy_misses;
  }
}

}  // namespace

TEST_SUITE("matching") {

TEST_CASE("config derives the terminal capacity") {
  MatchingConfig cfg;
  cfg.c_prime = 0.2;
  cfg.delta = 0.5;
  cfg.alpha = 1.0;
  CHECK(cfg.pi_for(10) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK_THROWS_AS(cfg.pi_for(0), std::invalid_argument);

  MatchingConfig bad = cfg;
  bad.c_prime = 0.25;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.delta = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sign canonicalization") {
  Vector u(2);
  u << 1.0, -2.0;
  auto [same, flipped] = canonical_sign(u);
  CHECK((same - u).norm() == 0.0);
  CHECK_FALSE(flipped);

  Vector v(2);
  v << -1.0, 2.0;
  auto [neg, was] = canonical_sign(v);
  CHECK(neg[0] == 1.0);
  CHECK(neg[1] == -2.0);
  CHECK(was);

  CHECK_THROWS_AS(canonical_sign(Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("identical points yield an empty matching") {
  Matrix pts(2, 8);
  for (int j = 0; j < 8; ++j) pts.col(j) << 0.3, 0.7;
  Embedding emb = Embedding::dense(pts);
  Graph g = random_graph(8, 1.0, 1);
  MatchingConfig cfg;
  cfg.c_prime = 0.2;
  cfg.delta = 0.25;
  cfg.alpha = 0.1;
  cfg.sigma = 0.05;
  Vector u(2);
  u << 1.0, 0.0;
  MatchingResult r = oriented_matching(u, emb, g, cfg);
  REQUIRE(r.kind == MatchingResult::Kind::kMatched);
  CHECK(r.matched.edges.empty());
  CHECK(r.a_side == std::vector<int>{0, 1, 2, 3});
  CHECK(r.b_side == std::vector<int>{4, 5, 6, 7});
  CHECK_FALSE(r.flipped);
}

TEST_CASE("positive demand beyond the length scale is filtered out") {
  // Two near groups carry almost all flow at tiny stretch; one thin edge
  // reaches a far outlier, so a positive demand passes the stretch filter
  // but fails the length filter, leaving the matching empty.
  Matrix pts = Matrix::Zero(2, 8);
  pts.col(0) << 0.0, 0.0;
  pts.col(1) << 0.0, 0.02;
  pts.col(2) << 0.005, 0.0;
  pts.col(3) << 0.010, 0.0;
  pts.col(4) << 0.015, 0.0;
  pts.col(5) << 0.020, 0.0;
  pts.col(6) << 0.025, 0.0;
  pts.col(7) << 10.0, 0.0;
  Embedding emb = Embedding::dense(pts);
  Graph g(8, {{0, 6, 1.0}, {1, 6, 1.0}, {1, 7, 1e-4}, {0, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0},
              {4, 5, 1.0}});
  MatchingConfig cfg;
  cfg.c_prime = 0.125;
  cfg.delta = 0.25;
  cfg.sigma = 0.05;
  cfg.alpha = 0.01;

  Vector u(2);
  u << 1.0, 0.0;
  MatchingResult r = oriented_matching(u, emb, g, cfg);
  REQUIRE(r.kind == MatchingResult::Kind::kMatched);
  CHECK(r.matched.edges.empty());
  CHECK(r.a_side == std::vector<int>{0, 1});
  CHECK(r.b_side == std::vector<int>{6, 7});

  Recon rec = reconstruct(r, g);
  auto far = rec.pair_demand.find({1, 7});
  REQUIRE(far != rec.pair_demand.end());
  CHECK(far->second > 0.0);
  CHECK((pts.col(7) - pts.col(1)).squaredNorm() > cfg.delta);
}

TEST_CASE("a bottleneck bridge triggers the cut branch") {
  Graph g = dumbbell(8);
  Embedding emb = fixtures::dumbbell_embedding(8);
  MatchingConfig cfg;
  cfg.c_prime = 1.0 / 32;
  cfg.delta = 1.0;
  cfg.alpha = 0.5;
  cfg.sigma = 0.05;
  Vector u(2);
  u << 1.0, 0.0;
  MatchingResult r = oriented_matching(u, emb, g, cfg);
  REQUIRE(r.kind == MatchingResult::Kind::kCut);
  CHECK(r.cut.value == 1.0);
  CHECK(r.cut.value < 6.0 * cfg.alpha / cfg.delta);
  for (int v = 1; v < 8; ++v) CHECK(r.cut.side[v] == r.cut.side[0]);
  for (int v = 8; v < 16; ++v) CHECK(r.cut.side[v] != r.cut.side[0]);
  check_contracts(r, u, emb, g, cfg);
}

TEST_CASE("spread-out heavy flow saturates") {
  RngStream rng(61);
  Embedding emb = fixtures::gaussian_embedding(16, 3, 1.2, rng);
  Graph g = random_graph(16, 1.0, 1);
  MatchingConfig cfg;
  cfg.c_prime = 0.2;
  cfg.delta = 0.25;
  cfg.alpha = 0.05;
  cfg.sigma = 0.05;
  Vector u = sample_gaussian(3, rng);
  auto [cu, _] = canonical_sign(u);
  MatchingResult r = matching(cu, emb, g, cfg);
  REQUIRE(r.kind == MatchingResult::Kind::kSaturatedFlow);
  check_contracts(r, cu, emb, g, cfg);
}

TEST_CASE("reversal is an involution and tracks negated directions") {
  RngStream rng(62);
  auto world = fixtures::ring_world();
  Graph dumb = dumbbell(8);
  Embedding demb = fixtures::dumbbell_embedding(8);
  MatchingConfig dcfg;
  dcfg.c_prime = 0.2;
  dcfg.delta = 0.25;
  dcfg.alpha = 0.02;
  dcfg.sigma = 0.05;
  Embedding gemb = fixtures::gaussian_embedding(20, 4, 0.1, rng);
  Graph gg = random_graph(20, 0.4, 77);

  struct Inst {
    const Graph* g;
    const Embedding* emb;
    MatchingConfig cfg;
  };
  std::vector<Inst> instances = {{&world.graph, &world.emb, world.mcfg},
                                 {&dumb, &demb, dcfg},
                                 {&gg, &gemb, dcfg}};
  for (const Inst& inst : instances) {
    for (int trial = 0; trial < 15; ++trial) {
      Vector u = sample_gaussian(inst.emb->dim(), rng);
      MatchingResult lhs = oriented_matching(u, *inst.emb, *inst.g, inst.cfg);
      MatchingResult rhs = reverse(oriented_matching(-u, *inst.emb, *inst.g, inst.cfg));
      CHECK(semantically_equal(lhs, rhs));
      CHECK(semantically_equal(lhs, reverse(reverse(lhs))));
      CHECK(lhs.flipped != rhs.flipped);
    }
  }
}

TEST_CASE("branch contracts hold under fuzzing") {
  trichotomy_misses = 0;
  RngStream rng(63);
  auto world = fixtures::ring_world();
  for (int trial = 0; trial < 30; ++trial) {
    Vector u = sample_gaussian(world.emb.dim(), rng);
    auto [cu, _] = canonical_sign(u);
    MatchingResult r = matching(cu, world.emb, world.graph, world.mcfg);
    check_contracts(r, cu, world.emb, world.graph, world.mcfg);
  }

  Graph g = random_graph(24, 0.35, 91);
  Embedding emb = fixtures::gaussian_embedding(24, 4, 0.12, rng);
  for (double alpha : {0.01, 0.05, 0.3}) {
    MatchingConfig cfg;
    cfg.c_prime = 0.2;
    cfg.delta = 0.25;
    cfg.sigma = 0.05;
    cfg.alpha = alpha;
    for (int trial = 0; trial < 20; ++trial) {
      Vector u = sample_gaussian(4, rng);
      auto [cu, _] = canonical_sign(u);
      MatchingResult r = matching(cu, emb, g, cfg);
      check_contracts(r, cu, emb, g, cfg);
    }
  }
  MESSAGE("scoped small-matching co-occurrences: ", trichotomy_misses);
}

TEST_CASE("size estimate behaviour") {
  Matrix pts(2, 8);
  for (int j = 0; j < 8; ++j) pts.col(j) << 0.3, 0.7;
  Embedding flat = Embedding::dense(pts);
  Graph k8 = random_graph(8, 1.0, 1);
  MatchingConfig cfg;
  cfg.c_prime = 0.2;
  cfg.delta = 0.25;
  cfg.alpha = 0.1;
  cfg.sigma = 0.05;
  RngStream rng(64);
  MatchingEstimate flat_est = matching_size_estimate(flat, k8, cfg, 40, rng);
  CHECK(flat_est.mean_size_fraction == 0.0);
  CHECK(flat_est.termination_rate == 0.0);

  RngStream e1(65), e2(65);
  Graph dumb = dumbbell(8);
  RngStream pt_rng(66);
  Embedding spread = fixtures::gaussian_embedding(16, 4, 0.05, pt_rng);
  MatchingConfig scfg;
  scfg.c_prime = 0.2;
  scfg.delta = 0.25;
  scfg.alpha = 0.02;
  scfg.sigma = 0.05;
  MatchingEstimate a = matching_size_estimate(spread, dumb, scfg, 60, e1);
  MatchingEstimate b = matching_size_estimate(spread, dumb, scfg, 60, e2);
  CHECK(a.mean_size_fraction == b.mean_size_fraction);
  CHECK(a.termination_rate == b.termination_rate);
  CHECK(a.mean_size_fraction > 0.0);

  CHECK_THROWS_AS(matching_size_estimate(spread, dumb, scfg, 0, rng), std::invalid_argument);
}

TEST_CASE("oracle preconditions") {
  RngStream rng(67);
  Embedding emb = fixtures::gaussian_embedding(3, 2, 0.1, rng);
  Graph g = random_graph(3, 1.0, 1);
  MatchingConfig cfg;
  cfg.c_prime = 0.24;
  cfg.delta = 0.25;
  cfg.alpha = 0.1;
  cfg.sigma = 0.05;
  Vector u(2);
  u << 1.0, 0.0;
  CHECK_THROWS_AS(matching(u, emb, g, cfg), std::invalid_argument);  // blocks overlap

  Embedding big = fixtures::gaussian_embedding(8, 2, 0.1, rng);
  Graph k8 = random_graph(8, 1.0, 1);
  Vector wrong_dim(3);
  wrong_dim << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(matching(wrong_dim, big, k8, cfg), std::invalid_argument);
  Vector negative(2);
  negative << -1.0, 0.0;
  CHECK_THROWS_AS(matching(negative, big, k8, cfg), std::invalid_argument);
  CHECK_THROWS_AS(oriented_matching(Vector::Zero(2), big, k8, cfg), std::invalid_argument);
  CHECK_THROWS_AS(matching(u, big, random_graph(9, 1.0, 1), cfg), std::invalid_argument);
}

}  // TEST_SUITE
