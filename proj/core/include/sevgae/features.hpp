#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sevgae/aamg.hpp"

namespace sevgae {

struct FeatureConfig {
  LabelSchema schema = LabelSchema::make(SchemaVariant::Six);
  bool use_poly = false;
  int poly_vertices = 8;   // V
  bool use_svd = false;
  int svd_rank = 8;        // k
  int n_max = kNodeCapMax;
  int m = kDefaultHopClip; // hop clip

  // Node feature width: one-hot classes + null channel + area + center(2)
  // + optional poly (2V) + optional svd (2k).
  int node_dim() const {
    return schema.node_class_count() + 1 + 1 + 2 + (use_poly ? 2 * poly_vertices : 0) +
           (use_svd ? 2 * svd_rank : 0);
  }
  // Edge feature width: edge types + no-edge channel.
  int edge_dim() const { return schema.edge_class_count() + 1; }
  int null_class_channel() const { return schema.node_class_count(); }
  int no_edge_channel() const { return schema.edge_class_count(); }
  int area_channel() const { return schema.node_class_count() + 1; }
  int center_channel() const { return schema.node_class_count() + 2; }
  int poly_channel() const { return schema.node_class_count() + 4; }
  int svd_channel() const {
    return schema.node_class_count() + 4 + (use_poly ? 2 * poly_vertices : 0);
  }
};

/// Dense, padded, per-graph feature block. Node/edge tensors are row-major:
/// X(i, f); A_e stores pair (u, v) at row u * n_max + v.
struct DenseGraph {
  int n = 0;  // real node count
  Eigen::MatrixXd X;     // n_max x d
  Eigen::MatrixXd A_e;   // (n_max * n_max) x c
  std::vector<bool> node_mask;             // n_max
  std::vector<std::vector<int>> hop;       // n_max x n_max, clip m on pads
};

struct DenseGraphBatch {
  FeatureConfig cfg;
  std::vector<DenseGraph> graphs;
};

Eigen::MatrixXd build_node_features(const Aamg& g, const FeatureConfig& cfg);
Eigen::MatrixXd build_edge_features(const Aamg& g, const FeatureConfig& cfg);

/// Raw n x 2k SVD positional block of the multiplicity adjacency matrix.
/// Columns: U_i * sqrt(s_i) for i < k, then V-row_i * sqrt(s_i).
Eigen::MatrixXd svd_positional_encoding(const Aamg& g, int k);

DenseGraph assemble_graph(const Aamg& g, const FeatureConfig& cfg);
DenseGraphBatch assemble_batch(const std::vector<Aamg>& graphs, const FeatureConfig& cfg);

}  // namespace sevgae
