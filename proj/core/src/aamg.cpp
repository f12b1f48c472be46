#include "sevgae/aamg.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sevgae {

std::vector<std::vector<int>> Aamg::simple_adjacency() const {
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  for (const auto& e : edges) a[e.u][e.v] = a[e.v][e.u] = 1;
  return a;
}

std::vector<std::vector<double>> Aamg::multiplicity_adjacency() const {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : edges) {
    a[e.u][e.v] += 1.0;
    a[e.v][e.u] += 1.0;
  }
  return a;
}

std::vector<int> Aamg::degrees() const {
  auto adj = simple_adjacency();
  std::vector<int> deg(n, 0);
  for (int u = 0; u < n; ++u)
    deg[u] = std::accumulate(adj[u].begin(), adj[u].end(), 0);
  return deg;
}

ValidationResult validate(const Aamg& g, const LabelSchema& schema) {
  ValidationResult r;
  auto add = [&](const std::string& s) { r.violations.push_back(s); };
  if (g.n < 1) add("node count must be >= 1");
  if (g.n > kNodeCapMax) add("node count exceeds n_max");
  if (static_cast<int>(g.node_class.size()) != g.n) add("node_class size mismatch");
  if (static_cast<int>(g.node_area.size()) != g.n) add("node_area size mismatch");
  if (static_cast<int>(g.node_center.size()) != g.n) add("node_center size mismatch");
  if (g.node_poly && static_cast<int>(g.node_poly->size()) != g.n)
    add("node_poly size mismatch");
  for (int i = 0; i < std::min<int>(g.n, g.node_class.size()); ++i) {
    if (g.node_class[i] < 0 || g.node_class[i] >= schema.node_class_count())
      add("class index out of range at node " + std::to_string(i));
  }
  for (size_t i = 0; i < g.node_area.size(); ++i) {
    if (g.node_area[i] < 0.0 || g.node_area[i] > 1.0)
      add("area out of range at node " + std::to_string(i));
  }
  for (size_t i = 0; i < g.node_center.size(); ++i) {
    for (double c : g.node_center[i])
      if (c < 0.0 || c > 1.0) {
        add("center out of range at node " + std::to_string(i));
        break;
      }
  }
  std::set<TypedEdge> seen;
  for (const auto& e : g.edges) {
    if (e.u == e.v) {
      add("self-loop at node " + std::to_string(e.u));
      continue;
    }
    if (e.u < 0 || e.v < 0 || e.u >= g.n || e.v >= g.n) {
      add("edge endpoint out of range");
      continue;
    }
    if (e.u > e.v) add("edge endpoints not ordered u < v");
    if (e.type < 0 || e.type >= schema.edge_class_count())
      add("edge type out of range");
    TypedEdge key{std::min(e.u, e.v), std::max(e.u, e.v), e.type};
    if (!seen.insert(key).second)
      add("duplicate typed edge (" + std::to_string(e.u) + "," +
          std::to_string(e.v) + ")");
  }
  // Interior area budget; the outdoor class is excluded from the sum.
  double interior = 0.0;
  for (int i = 0; i < std::min<int>(g.n, g.node_class.size()); ++i)
    if (g.node_class[i] != schema.outdoor_class())
      interior += (i < static_cast<int>(g.node_area.size())) ? g.node_area[i] : 0.0;
  if (interior > 1.0 + kAreaEps) add("interior area sum exceeds 1");
  return r;
}

namespace {

// BFS hop distances from src; -1 for unreachable.
std::vector<int> bfs(const std::vector<std::vector<int>>& adj, int src) {
  int n = static_cast<int>(adj.size());
  std::vector<int> dist(n, -1);
  std::deque<int> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v = 0; v < n; ++v)
      if (adj[u][v] && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
  }
  return dist;
}

}  // namespace

std::vector<double> closeness_centrality(const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<double> c(n, 0.0);
  if (n <= 1) return c;
  for (int u = 0; u < n; ++u) {
    auto dist = bfs(adj, u);
    long long total = 0;
    int reachable = 0;
    for (int v = 0; v < n; ++v)
      if (dist[v] > 0) {
        total += dist[v];
        ++reachable;
      }
    if (total > 0) {
      // Wasserman-Faust correction for disconnected graphs.
      c[u] = (double(reachable) / total) * (double(reachable) / (n - 1));
    }
  }
  return c;
}

std::vector<double> betweenness_centrality(const std::vector<std::vector<int>>& adj) {
  // Brandes' algorithm, unnormalized, undirected.
  int n = static_cast<int>(adj.size());
  std::vector<double> bc(n, 0.0);
  for (int s = 0; s < n; ++s) {
    std::vector<std::vector<int>> pred(n);
    std::vector<double> sigma(n, 0.0);
    std::vector<int> dist(n, -1);
    std::vector<int> stack;
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<int> q{s};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      stack.push_back(u);
      for (int v = 0; v < n; ++v) {
        if (!adj[u][v]) continue;
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
        if (dist[v] == dist[u] + 1) {
          sigma[v] += sigma[u];
          pred[v].push_back(u);
        }
      }
    }
    std::vector<double> delta(n, 0.0);
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      int w = *it;
      for (int p : pred[w]) delta[p] += sigma[p] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  for (double& b : bc) b /= 2.0;  // each undirected pair counted twice
  return bc;
}

CanonicalOrdering canonical_order(const Aamg& g, OrderingKind kind) {
  auto adj = g.simple_adjacency();
  std::vector<double> stat(g.n, 0.0);
  switch (kind) {
    case OrderingKind::DegreeDesc: {
      auto deg = g.degrees();
      for (int i = 0; i < g.n; ++i) stat[i] = deg[i];
      break;
    }
    case OrderingKind::AvgNeighborDegree: {
      auto deg = g.degrees();
      for (int u = 0; u < g.n; ++u) {
        if (deg[u] == 0) continue;
        double s = 0.0;
        for (int v = 0; v < g.n; ++v)
          if (adj[u][v]) s += deg[v];
        stat[u] = s / deg[u];
      }
      break;
    }
    case OrderingKind::Closeness:
      stat = closeness_centrality(adj);
      break;
    case OrderingKind::Betweenness:
      stat = betweenness_centrality(adj);
      break;
  }
  std::vector<int> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    if (stat[a] != stat[b]) return stat[a] > stat[b];
    return a < b;  // ties: ascending original index
  });
  return CanonicalOrdering{kind, perm};
}

std::vector<CanonicalOrdering> ordering_family(const Aamg& g) {
  return {canonical_order(g, OrderingKind::DegreeDesc),
          canonical_order(g, OrderingKind::AvgNeighborDegree),
          canonical_order(g, OrderingKind::Closeness),
          canonical_order(g, OrderingKind::Betweenness)};
}

DistanceMatrix hop_distances(const Aamg& g, int m) {
  if (m < 1) throw std::invalid_argument("hop clip m must be >= 1");
  auto adj = g.simple_adjacency();
  DistanceMatrix d;
  d.m = m;
  d.entries.assign(g.n, std::vector<int>(g.n, m));
  for (int u = 0; u < g.n; ++u) {
    auto dist = bfs(adj, u);
    for (int v = 0; v < g.n; ++v)
      d.entries[u][v] = (dist[v] < 0) ? m : std::min(dist[v], m);
  }
  return d;
}

Aamg apply_permutation(const Aamg& g, const CanonicalOrdering& p) {
  if (static_cast<int>(p.permutation.size()) != g.n)
    throw std::invalid_argument("permutation size mismatch");
  Aamg out = g;
  std::vector<int> inv(g.n);  // inv[old] = new
  for (int i = 0; i < g.n; ++i) inv[p.permutation[i]] = i;
  for (int i = 0; i < g.n; ++i) {
    int old = p.permutation[i];
    out.node_class[i] = g.node_class[old];
    out.node_area[i] = g.node_area[old];
    out.node_center[i] = g.node_center[old];
    if (g.node_poly) (*out.node_poly)[i] = (*g.node_poly)[old];
  }
  for (auto& e : out.edges) {
    int u = inv[e.u], v = inv[e.v];
    e.u = std::min(u, v);
    e.v = std::max(u, v);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace sevgae
