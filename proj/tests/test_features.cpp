#include "doctest.h"
#include "helpers.hpp"
#include "sevgae/features.hpp"

using namespace sevgae;
using sevgae::testing::small_graph;

TEST_CASE("feature widths follow the channel layout") {
  FeatureConfig cfg;
  cfg.schema = LabelSchema::make(SchemaVariant::Six);
  CHECK(cfg.node_dim() == 3 + 1 + 1 + 2);
  CHECK(cfg.edge_dim() == 4);
  cfg.use_poly = true;
  CHECK(cfg.node_dim() == 7 + 16);
  cfg.use_svd = true;
  CHECK(cfg.node_dim() == 7 + 16 + 16);
  CHECK(cfg.svd_channel() == cfg.poly_channel() + 16);
}

TEST_CASE("padded rows carry the null class") {
  FeatureConfig cfg;
  cfg.n_max = 16;
  Aamg g = small_graph(3);
  auto X = build_node_features(g, cfg);
  REQUIRE(X.rows() == 16);
  for (int i = g.n; i < 16; ++i) {
    CHECK(X(i, cfg.null_class_channel()) == 1.0);
    CHECK(X.row(i).sum() == 1.0);
  }
  for (int i = 0; i < g.n; ++i) {
    CHECK(X(i, g.node_class[i]) == 1.0);
    CHECK(X(i, cfg.null_class_channel()) == 0.0);
    CHECK(X(i, cfg.area_channel()) == g.node_area[i]);
  }
}

TEST_CASE("edge tensor defaults to no-edge everywhere") {
  FeatureConfig cfg;
  cfg.n_max = 16;
  Aamg g = small_graph(4);
  auto A = build_edge_features(g, cfg);
  REQUIRE(A.rows() == 16 * 16);
  // Diagonal and pads are no-edge.
  for (int i = 0; i < 16; ++i) CHECK(A(i * 16 + i, cfg.no_edge_channel()) == 1.0);
  for (const auto& e : g.edges) {
    CHECK(A(e.u * 16 + e.v, e.type) == 1.0);
    CHECK(A(e.v * 16 + e.u, e.type) == 1.0);
    CHECK(A(e.u * 16 + e.v, cfg.no_edge_channel()) == 0.0);
  }
}

TEST_CASE("polygon resampling cycles short boundaries") {
  FeatureConfig cfg;
  cfg.n_max = 16;
  cfg.use_poly = true;
  cfg.poly_vertices = 8;
  Aamg g = small_graph(3);
  REQUIRE(g.node_poly.has_value());
  auto X = build_node_features(g, cfg);
  const auto& poly0 = (*g.node_poly)[0];
  int P = static_cast<int>(poly0.size());
  for (int v = 0; v < 8; ++v) {
    CHECK(X(0, cfg.poly_channel() + 2 * v) == poly0[size_t(v % P)][0]);
    CHECK(X(0, cfg.poly_channel() + 2 * v + 1) == poly0[size_t(v % P)][1]);
  }
}

TEST_CASE("svd encoding reconstructs the multiplicity adjacency") {
  Aamg g = small_graph(6);
  int k = g.n;  // full rank budget
  auto enc = svd_positional_encoding(g, k);
  Eigen::MatrixXd U = enc.leftCols(k), V = enc.rightCols(k);
  Eigen::MatrixXd A(g.n, g.n);
  auto mult = g.multiplicity_adjacency();
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) A(i, j) = mult[i][j];
  // U diag-scaled times V^T equals A since columns absorb sqrt(s) each.
  CHECK((U * V.transpose() - A).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("svd encoding zero-pads low rank") {
  Aamg g;
  g.n = 3;
  g.node_class = {0, 1, 1};
  g.node_area = {0, .1, .1};
  g.node_center.assign(3, {0.5, 0.5});
  g.edges = {{0, 1, 0}};  // rank-2 adjacency, node 2 isolated
  auto enc = svd_positional_encoding(g, 3);
  CHECK(enc.col(2).norm() == 0.0);  // third singular value is 0
  CHECK(enc.col(5).norm() == 0.0);
}

TEST_CASE("assemble_graph fills mask and clipped hops") {
  FeatureConfig cfg;
  cfg.n_max = 16;
  cfg.m = 4;
  Aamg g = small_graph(5);
  auto d = assemble_graph(g, cfg);
  CHECK(d.n == g.n);
  for (int i = 0; i < 16; ++i) CHECK(d.node_mask[i] == (i < g.n));
  for (int i = 0; i < g.n; ++i) CHECK(d.hop[i][i] == 0);
  CHECK(d.hop[0][15] == 4);  // pad treated as disconnected
}

TEST_CASE("graph exceeding n_max is rejected") {
  FeatureConfig cfg;
  cfg.n_max = 4;
  Aamg g = small_graph(8, 8);
  if (g.n > 4) CHECK_THROWS(build_node_features(g, cfg));
}
