#include "sepflow/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sepflow/random.hpp"

namespace sepflow {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 0) throw std::invalid_argument("graph: negative node count");
  for (Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw std::invalid_argument("graph: edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("graph: self loop");
    if (!(e.w >= 0.0)) throw std::invalid_argument("graph: negative edge weight");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v)
      edges_.back().w += e.w;  // merge parallel edges
    else
      edges_.push_back(e);
  }
  adj_.assign(n_, {});
  min_positive_weight_ = 0.0;
  for (const Edge& e : edges_) {
    adj_[e.u].emplace_back(e.v, e.w);
    adj_[e.v].emplace_back(e.u, e.w);
    total_weight_ += e.w;
    if (e.w > 0.0 && (min_positive_weight_ == 0.0 || e.w < min_positive_weight_))
      min_positive_weight_ = e.w;
  }
}

const std::vector<std::pair<int, double>>& Graph::neighbors(int v) const {
  if (v < 0 || v >= n_) throw std::invalid_argument("graph: node out of range");
  return adj_[v];
}

namespace {

struct Line {
  int number;
  std::string text;
};

std::vector<Line> significant_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++number;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    size_t a = raw.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) continue;
    size_t b = raw.find_last_not_of(" \t\r");
    out.push_back({number, std::string(raw.substr(a, b - a + 1))});
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

long parse_int(const std::string& tok, int line) {
  size_t used = 0;
  long v;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    fail(line, "expected integer, got '" + tok + "'");
  }
  if (used != tok.size()) fail(line, "expected integer, got '" + tok + "'");
  return v;
}

double parse_double(const std::string& tok, int line) {
  size_t used = 0;
  double v;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(line, "expected number, got '" + tok + "'");
  }
  if (used != tok.size()) fail(line, "expected number, got '" + tok + "'");
  return v;
}

std::vector<std::string> tokens_of(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

}  // namespace

Graph load_graph(std::string_view text) {
  std::vector<Line> lines = significant_lines(text);
  size_t start = 0;  // "c" comment lines may precede the header
  while (start < lines.size() && tokens_of(lines[start].text)[0] == "c") ++start;
  if (start == lines.size()) throw ParseError("line 1: empty graph description");

  std::vector<std::string> first = tokens_of(lines[start].text);
  if (first[0] == "p") {
    // "p <n> <m>"; a format tag between "p" and the numbers is tolerated.
    size_t at = 1;
    if (first.size() == 4) at = 2;
    if (first.size() != at + 2) fail(lines[start].number, "malformed header, want 'p <n> <m>'");
    long n = parse_int(first[at], lines[start].number);
    long m = parse_int(first[at + 1], lines[start].number);
    if (n < 0 || m < 0) fail(lines[start].number, "negative count in header");
    std::vector<Edge> edges;
    edges.reserve(static_cast<size_t>(m));
    for (size_t i = start + 1; i < lines.size(); ++i) {
      std::vector<std::string> toks = tokens_of(lines[i].text);
      if (toks[0] == "c") continue;
      if (toks[0] != "e" || toks.size() != 4)
        fail(lines[i].number, "malformed edge, want 'e <i> <j> <w>'");
      long u = parse_int(toks[1], lines[i].number);
      long v = parse_int(toks[2], lines[i].number);
      double w = parse_double(toks[3], lines[i].number);
      if (u < 1 || u > n || v < 1 || v > n) fail(lines[i].number, "node id out of range");
      if (u == v) fail(lines[i].number, "self loop");
      if (!(w >= 0.0)) fail(lines[i].number, "negative edge weight");
      edges.push_back({static_cast<int>(u - 1), static_cast<int>(v - 1), w});
    }
    if (static_cast<long>(edges.size()) != m)
      throw ParseError("header announced " + std::to_string(m) + " edges, file has " +
                       std::to_string(edges.size()));
    return Graph(static_cast<int>(n), std::move(edges));
  }

  std::vector<Edge> edges;
  int n = 0;
  for (size_t i = start; i < lines.size(); ++i) {
    const Line& line = lines[i];
    std::vector<std::string> toks = tokens_of(line.text);
    if (toks.size() != 3) fail(line.number, "malformed edge, want '<i> <j> <w>'");
    long u = parse_int(toks[0], line.number);
    long v = parse_int(toks[1], line.number);
    double w = parse_double(toks[2], line.number);
    if (u < 0 || v < 0) fail(line.number, "negative node id");
    if (u == v) fail(line.number, "self loop");
    if (!(w >= 0.0)) fail(line.number, "negative edge weight");
    n = std::max(n, static_cast<int>(std::max(u, v) + 1));
    edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
  }
  return Graph(n, std::move(edges));
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_graph(buf.str());
}

std::string serialize(const Graph& g) {
  std::ostringstream out;
  out.precision(17);
  out << "p " << g.node_count() << " " << g.edge_count() << "\n";
  for (const Edge& e : g.edges())
    out << "e " << e.u + 1 << " " << e.v + 1 << " " << e.w << "\n";
  return out.str();
}

Graph dumbbell(int k) {
  if (k < 1) throw std::invalid_argument("dumbbell: k must be positive");
  std::vector<Edge> edges;
  for (int base : {0, k})
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) edges.push_back({base + i, base + j, 1.0});
  edges.push_back({k - 1, k, 1.0});
  return Graph(2 * k, std::move(edges));
}

Graph random_graph(int n, double p, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("random_graph: negative n");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("random_graph: p outside [0, 1]");
  RngStream rng(seed, 0);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

double cut_value(const Graph& g, const std::vector<char>& side) {
  if (static_cast<int>(side.size()) != g.node_count())
    throw std::invalid_argument("cut_value: side size mismatch");
  double v = 0.0;
  for (const Edge& e : g.edges())
    if ((side[e.u] != 0) != (side[e.v] != 0)) v += e.w;
  return v;
}

int side_count(const std::vector<char>& side) {
  int k = 0;
  for (char c : side) k += (c != 0);
  return k;
}

double edge_expansion(const Graph& g, const std::vector<char>& side) {
  int inside = side_count(side);
  int outside = g.node_count() - inside;
  if (inside == 0 || outside == 0)
    throw std::invalid_argument("edge_expansion: side must be a proper nonempty subset");
  return cut_value(g, side) / std::min(inside, outside);
}

bool is_c_balanced(int n, const std::vector<char>& side, double c) {
  if (static_cast<int>(side.size()) != n)
    throw std::invalid_argument("is_c_balanced: side size mismatch");
  int inside = side_count(side);
  return std::min(inside, n - inside) >= c * n;
}

Cut make_cut(const Graph& g, std::vector<char> side) {
  Cut cut;
  cut.value = cut_value(g, side);
  int inside = side_count(side);
  cut.balance = g.node_count() == 0
                    ? 0.0
                    : static_cast<double>(std::min(inside, g.node_count() - inside)) /
                          g.node_count();
  cut.side = std::move(side);
  return cut;
}

}  // namespace sepflow
