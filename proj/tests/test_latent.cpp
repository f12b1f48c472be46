#include "doctest.h"
#include "helpers.hpp"
#include "sevgae/latent.hpp"

using namespace sevgae;
using sevgae::testing::fd_max_rel_error;
using sevgae::testing::small_graph;

namespace {

EncoderState random_state(Tape& t, int n, int d_h, int c_h,
                          std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, d_h), E(n * n, c_h);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d_h; ++j) X(i, j) = rng.normal();
  for (int u = 0; u < n; ++u)
    for (int v = u; v < n; ++v)
      for (int c = 0; c < c_h; ++c) {
        double val = rng.normal();
        E(u * n + v, c) = val;
        E(v * n + u, c) = val;
      }
  return {n, t.constant(X), t.constant(E)};
}

EncoderState permute_state(Tape& t, const EncoderState& s,
                           const std::vector<int>& perm) {
  int n = s.n;
  Eigen::MatrixXd X(n, s.nodes.cols), E(n * n, s.edges.cols);
  for (int i = 0; i < n; ++i) X.row(i) = s.nodes.value().row(perm[size_t(i)]);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      E.row(u * n + v) =
          s.edges.value().row(perm[size_t(u)] * n + perm[size_t(v)]);
  return {n, t.constant(X), t.constant(E)};
}

LatentConfig tiny_lat(LatentMode mode) {
  LatentConfig c;
  c.M = 8;
  c.mode = mode;
  c.codebook_size = 4;
  c.n_max = 8;
  return c;
}

}  // namespace

TEST_CASE("gin_pool is permutation invariant") {
  LatentStage stage(tiny_lat(LatentMode::Vae), 6, 4);
  Rng rng(1);
  stage.init_normal(rng);
  Tape t;
  EncoderState s = random_state(t, 5, 6, 4, 2);
  std::vector<int> perm{3, 1, 4, 0, 2};
  EncoderState ps = permute_state(t, s, perm);
  auto a = stage(t, s, nullptr);
  auto b = stage(t, ps, nullptr);
  CHECK((a.front().z.value() - b.front().z.value()).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("gin_pool with zero edge map reduces to the node-only block") {
  // With the edge map forced to zero, the message term vanishes and pooling
  // is LN(PReLU(Linear((1+eps) X))) summed over nodes.
  GinPool pool("p", 4, 3);
  Rng rng(3);
  pool.init_normal(rng);
  pool.edge_map.W.data.setZero();
  pool.edge_map.b.data.setZero();
  pool.eps.data.setZero();
  Tape t;
  EncoderState s = random_state(t, 4, 4, 3, 4);
  Tensor pooled = pool(t, s);
  Tensor expected = t.col_sums(pool.block(t, s.nodes));
  CHECK((pooled.value() - expected.value()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("vae head reparameterization identities") {
  VaeHead head("h", 6, 8);
  Rng rng(5);
  head.init_normal(rng);
  Tape t;
  Tensor pooled = t.constant(Eigen::MatrixXd::Random(1, 6));
  LatentCode det = head(t, pooled, CodeRole::Graph, nullptr);
  CHECK((det.z.value() - det.mu.value()).cwiseAbs().maxCoeff() == 0.0);
  Rng noise(7);
  LatentCode sampled = head(t, pooled, CodeRole::Graph, &noise);
  // z = mu + exp(logvar/2) * r with the recorded noise.
  for (int i = 0; i < 8; ++i) {
    double expect = sampled.mu.value()(0, i) +
                    std::exp(sampled.logvar.value()(0, i) / 2.0) *
                        sampled.noise(i);
    CHECK(sampled.z.value()(0, i) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("sampling statistics match mu and variance") {
  // Fixed mu/logvar: freeze the heads to constants via zero weights + bias.
  VaeHead head("h", 2, 4);
  for (auto* p : head.parameters()) p->data.setZero();
  head.mu2.lin.b.data.setConstant(0.7);
  head.lv2.lin.b.data.setConstant(std::log(0.25));  // std 0.5
  // LayerNorm gains are zero above, so outputs equal the trailing biases.
  head.mu2.ln.bias.data.setConstant(0.7);
  head.lv2.ln.bias.data.setConstant(std::log(0.25));
  Rng noise(11);
  Tape t;
  Tensor pooled = t.constant(Eigen::MatrixXd::Zero(1, 2));
  const int N = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < N; ++i) {
    LatentCode c = head(t, pooled, CodeRole::Graph, &noise);
    double v = c.z.value()(0, 0);
    sum += v;
    sq += v * v;
  }
  double mean = sum / N;
  double var = sq / N - mean * mean;
  double se_mean = 0.5 / std::sqrt(double(N));
  CHECK(std::abs(mean - 0.7) < 3.0 * se_mean);
  CHECK(std::abs(var - 0.25) < 3.0 * 0.25 * std::sqrt(2.0 / N));
}

TEST_CASE("quantize picks the brute-force nearest prototype with tie rule") {
  LatentConfig cfg = tiny_lat(LatentMode::Vq);
  cfg.M = 2;
  LatentStage stage(cfg, 4, 3);
  auto& book = stage.codebook();
  book.data << 0, 0, 1, 1, 2, 2, 3, 3;
  Tape t;
  auto q = stage.quantize(t, t.constant((Eigen::MatrixXd(1, 2) << 0.2, 0.1)
                                            .finished()));
  CHECK(q.index == 0);
  auto tie = stage.quantize(
      t, t.constant((Eigen::MatrixXd(1, 2) << 0.5, 0.5).finished()));
  CHECK(tie.index == 0);  // equidistant to rows 0 and 1 -> lowest index
  auto exact = stage.quantize(
      t, t.constant((Eigen::MatrixXd(1, 2) << 2.0, 2.0).finished()));
  CHECK(exact.index == 2);
  CHECK((exact.z_k.value() - book.data.row(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("straight-through gradient equality is exact") {
  LatentConfig cfg = tiny_lat(LatentMode::Vq);
  cfg.M = 3;
  LatentStage stage(cfg, 4, 3);
  Rng rng(13);
  stage.init_codebook(rng);
  Parameter zp("z", 1, 3);
  zp.data << 0.3, -0.2, 0.5;
  Eigen::MatrixXd probe = Eigen::MatrixXd::Random(1, 3);
  // Loss through the quantized code.
  Tape t1;
  auto q = stage.quantize(t1, t1.leaf(zp));
  t1.backward(t1.sum_all(t1.mul(q.z_k, t1.constant(probe))));
  Eigen::MatrixXd grad_st = zp.grad;
  // Same loss with z_k treated as the variable directly.
  zp.zero_grad();
  Parameter zk("zk", 1, 3);
  zk.data = q.z_k.value();
  Tape t2;
  t2.backward(t2.sum_all(t2.mul(t2.leaf(zk), t2.constant(probe))));
  CHECK((grad_st - zk.grad).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reparameterization path passes float64 finite differences") {
  VaeHead head("h", 4, 6);
  Rng rng(17);
  head.init_normal(rng);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Random(1, 4);
  auto params = head.parameters();
  auto build = [&](Tape& t) {
    Rng noise(23);  // fixed draw shared across evaluations
    LatentCode c = head(t, t.constant(pooled), CodeRole::Graph, &noise);
    return t.sum_all(t.square(c.z));
  };
  auto value = [&] {
    Tape t;
    return build(t).scalar();
  };
  auto backward = [&] {
    Tape t;
    t.backward(build(t));
  };
  CHECK(fd_max_rel_error(params, value, backward, 1e-6) < 1e-3);
}

TEST_CASE("ned mode emits fused codes and membership under vq") {
  LatentStage stage(tiny_lat(LatentMode::NedVq), 6, 4);
  Rng rng(19);
  stage.init_normal(rng);
  stage.init_codebook(rng);
  Tape t;
  EncoderState s = random_state(t, 5, 6, 4, 21);
  auto codes = stage(t, s, nullptr);
  REQUIRE(codes.size() == 5);
  bool saw_node_graph = false, saw_edge_graph = false;
  for (const auto& c : codes) {
    if (c.role == CodeRole::NodeGraph || c.role == CodeRole::EdgeGraph) {
      (c.role == CodeRole::NodeGraph ? saw_node_graph : saw_edge_graph) = true;
      REQUIRE(c.vq_index >= 0);
      CHECK((c.z.value() - stage.codebook().data.row(c.vq_index))
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
  CHECK(saw_node_graph);
  CHECK(saw_edge_graph);
}

TEST_CASE("ned node and graph codes are permutation invariant") {
  LatentStage stage(tiny_lat(LatentMode::Ned), 6, 4);
  Rng rng(23);
  stage.init_normal(rng);
  Tape t;
  EncoderState s = random_state(t, 5, 6, 4, 29);
  std::vector<int> perm{4, 2, 0, 1, 3};
  EncoderState ps = permute_state(t, s, perm);
  auto a = stage(t, s, nullptr);
  auto b = stage(t, ps, nullptr);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].role == CodeRole::Graph || a[i].role == CodeRole::Node ||
        a[i].role == CodeRole::NodeGraph)
      CHECK((a[i].z.value() - b[i].z.value()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("latent invariants on config") {
  LatentConfig bad = tiny_lat(LatentMode::Vq);
  bad.codebook_size = 1;
  CHECK_THROWS(LatentStage(bad, 4, 3));
  bad = tiny_lat(LatentMode::Vae);
  bad.M = 0;
  CHECK_THROWS(LatentStage(bad, 4, 3));
}
