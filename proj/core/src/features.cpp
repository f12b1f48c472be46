#include "sevgae/features.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace sevgae {

namespace {

// Resample a closed polygon boundary to exactly V vertices: cycle short
// boundaries, uniformly subsample longer ones.
std::vector<std::array<double, 2>> resample_polygon(
    const std::vector<std::array<double, 2>>& poly, int V) {
  std::vector<std::array<double, 2>> out(V);
  int P = static_cast<int>(poly.size());
  if (P == 0) throw std::invalid_argument("empty polygon");
  if (P <= V) {
    for (int i = 0; i < V; ++i) out[i] = poly[i % P];
  } else {
    for (int i = 0; i < V; ++i) out[i] = poly[(i * P) / V];
  }
  return out;
}

}  // namespace

Eigen::MatrixXd svd_positional_encoding(const Aamg& g, int k) {
  if (k < 1) throw std::invalid_argument("svd rank must be >= 1");
  int n = g.n;
  Eigen::MatrixXd A(n, n);
  auto mult = g.multiplicity_adjacency();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = mult[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& U = svd.matrixU();
  const auto& V = svd.matrixV();
  const auto& s = svd.singularValues();  // descending
  Eigen::MatrixXd enc = Eigen::MatrixXd::Zero(n, 2 * k);
  int r = std::min<int>(k, n);
  for (int i = 0; i < r; ++i) {
    if (s(i) < 1e-9) break;  // null-space columns carry no information
    Eigen::VectorXd u = U.col(i);
    Eigen::VectorXd v = V.col(i);  // row i of V^H
    // Sign fix: largest-magnitude entry of U's column made positive.
    int arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0.0) {
      u = -u;
      v = -v;
    }
    double scale = std::sqrt(s(i));
    enc.col(i) = u * scale;
    enc.col(k + i) = v * scale;
  }
  return enc;
}

Eigen::MatrixXd build_node_features(const Aamg& g, const FeatureConfig& cfg) {
  if (g.n > cfg.n_max) throw std::invalid_argument("graph exceeds n_max");
  if (cfg.use_poly && !g.node_poly)
    throw std::invalid_argument("missing polygon data");
  int d = cfg.node_dim();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(cfg.n_max, d);
  Eigen::MatrixXd svd_block;
  if (cfg.use_svd) svd_block = svd_positional_encoding(g, cfg.svd_rank);
  for (int i = 0; i < g.n; ++i) {
    X(i, g.node_class[i]) = 1.0;
    X(i, cfg.area_channel()) = g.node_area[i];
    X(i, cfg.center_channel()) = g.node_center[i][0];
    X(i, cfg.center_channel() + 1) = g.node_center[i][1];
    if (cfg.use_poly) {
      auto verts = resample_polygon((*g.node_poly)[i], cfg.poly_vertices);
      for (int v = 0; v < cfg.poly_vertices; ++v) {
        X(i, cfg.poly_channel() + 2 * v) = verts[v][0];
        X(i, cfg.poly_channel() + 2 * v + 1) = verts[v][1];
      }
    }
    if (cfg.use_svd)
      for (int c = 0; c < 2 * cfg.svd_rank; ++c)
        X(i, cfg.svd_channel() + c) = svd_block(i, c);
  }
  for (int i = g.n; i < cfg.n_max; ++i) X(i, cfg.null_class_channel()) = 1.0;
  return X;
}

Eigen::MatrixXd build_edge_features(const Aamg& g, const FeatureConfig& cfg) {
  int c = cfg.edge_dim();
  int N = cfg.n_max;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N * N, c);
  // Default everything (pads, diagonal, non-edges) to the no-edge channel.
  A.col(cfg.no_edge_channel()).setOnes();
  for (const auto& e : g.edges) {
    A(e.u * N + e.v, e.type) = 1.0;
    A(e.v * N + e.u, e.type) = 1.0;
    A(e.u * N + e.v, cfg.no_edge_channel()) = 0.0;
    A(e.v * N + e.u, cfg.no_edge_channel()) = 0.0;
  }
  return A;
}

DenseGraph assemble_graph(const Aamg& g, const FeatureConfig& cfg) {
  DenseGraph d;
  d.n = g.n;
  d.X = build_node_features(g, cfg);
  d.A_e = build_edge_features(g, cfg);
  d.node_mask.assign(cfg.n_max, false);
  for (int i = 0; i < g.n; ++i) d.node_mask[i] = true;
  auto hd = hop_distances(g, cfg.m);
  d.hop.assign(cfg.n_max, std::vector<int>(cfg.n_max, cfg.m));
  for (int u = 0; u < g.n; ++u) {
    for (int v = 0; v < g.n; ++v) d.hop[u][v] = hd.entries[u][v];
    d.hop[u][u] = 0;
  }
  return d;
}

DenseGraphBatch assemble_batch(const std::vector<Aamg>& graphs,
                               const FeatureConfig& cfg) {
  if (graphs.empty()) throw std::invalid_argument("empty batch");
  DenseGraphBatch b;
  b.cfg = cfg;
  b.graphs.reserve(graphs.size());
  for (const auto& g : graphs) b.graphs.push_back(assemble_graph(g, cfg));
  return b;
}

}  // namespace sevgae
