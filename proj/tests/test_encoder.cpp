#include "doctest.h"
#include "helpers.hpp"
#include "sevgae/encoder.hpp"

using namespace sevgae;
using sevgae::testing::fd_max_rel_error;
using sevgae::testing::small_graph;

namespace {

EncoderConfig tiny_enc() {
  EncoderConfig c;
  c.layers = 1;
  c.d_h = 8;
  c.heads = 2;
  c.c_h = 4;
  return c;
}

FeatureConfig tiny_feat() {
  FeatureConfig f;
  f.n_max = 16;
  return f;
}

// Random permutation of the first n indices.
CanonicalOrdering random_perm(int n, std::uint64_t seed) {
  CanonicalOrdering p{OrderingKind::DegreeDesc, std::vector<int>(n)};
  std::iota(p.permutation.begin(), p.permutation.end(), 0);
  Rng rng(seed);
  for (int i = n; i > 1; --i)
    std::swap(p.permutation[i - 1], p.permutation[rng.next_u64() % i]);
  return p;
}

}  // namespace

TEST_CASE("d_h must divide evenly into heads") {
  EncoderConfig c = tiny_enc();
  c.d_h = 9;
  CHECK_THROWS(EdgeAugmentedEncoder(c, 7, 4, 8));
}

TEST_CASE("encoder outputs are deterministic and symmetric") {
  FeatureConfig f = tiny_feat();
  EdgeAugmentedEncoder enc(tiny_enc(), f.node_dim(), f.edge_dim(), f.m);
  Rng rng(1);
  enc.init_normal(rng);
  Aamg g = small_graph(2);
  DenseGraph d = assemble_graph(g, f);
  Tape t1, t2;
  EncoderState a = enc.encode(t1, d);
  EncoderState b = enc.encode(t2, d);
  CHECK((a.nodes.value() - b.nodes.value()).cwiseAbs().maxCoeff() == 0.0);
  // Edge tensor equals its node-axes transpose exactly.
  const auto& E = a.edges.value();
  for (int u = 0; u < a.n; ++u)
    for (int v = 0; v < a.n; ++v)
      for (int c = 0; c < E.cols(); ++c)
        CHECK(E(u * a.n + v, c) == E(v * a.n + u, c));
}

TEST_CASE("permutation equivariance with positional encodings off") {
  FeatureConfig f = tiny_feat();
  EdgeAugmentedEncoder enc(tiny_enc(), f.node_dim(), f.edge_dim(), f.m);
  Rng rng(2);
  enc.init_normal(rng);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Aamg g = small_graph(seed + 10);
    auto perm = random_perm(g.n, seed);
    Aamg pg = apply_permutation(g, perm);
    Tape t1, t2;
    EncoderState a = enc.encode(t1, assemble_graph(g, f));
    EncoderState b = enc.encode(t2, assemble_graph(pg, f));
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
      worst = std::max(worst, (b.nodes.value().row(i) -
                               a.nodes.value().row(perm.permutation[i]))
                                  .cwiseAbs()
                                  .maxCoeff());
    for (int u = 0; u < g.n; ++u)
      for (int v = 0; v < g.n; ++v)
        worst = std::max(
            worst,
            (b.edges.value().row(u * g.n + v) -
             a.edges.value().row(perm.permutation[u] * g.n +
                                 perm.permutation[v]))
                .cwiseAbs()
                .maxCoeff());
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("padding invariance: growing n_max leaves real outputs unchanged") {
  FeatureConfig f1 = tiny_feat();
  FeatureConfig f2 = tiny_feat();
  f2.n_max = 32;
  EdgeAugmentedEncoder enc(tiny_enc(), f1.node_dim(), f1.edge_dim(), f1.m);
  Rng rng(3);
  enc.init_normal(rng);
  Aamg g = small_graph(4);
  Tape t1, t2;
  EncoderState a = enc.encode(t1, assemble_graph(g, f1));
  EncoderState b = enc.encode(t2, assemble_graph(g, f2));
  CHECK((a.nodes.value() - b.nodes.value()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.edges.value() - b.edges.value()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero node features embed to the bias row") {
  FeatureConfig f = tiny_feat();
  EdgeAugmentedEncoder enc(tiny_enc(), f.node_dim(), f.edge_dim(), f.m);
  Rng rng(4);
  enc.init_normal(rng);
  Aamg g = small_graph(5);
  DenseGraph d = assemble_graph(g, f);
  d.X.setZero();
  Tape t;
  EncoderState s = enc.embed_inputs(t, d);
  for (int i = 1; i < s.n; ++i)
    CHECK((s.nodes.value().row(i) - s.nodes.value().row(0))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("single real node: attention returns its own value scaled") {
  FeatureConfig f = tiny_feat();
  EncoderConfig c = tiny_enc();
  EdgeAugmentedEncoder enc(c, f.node_dim(), f.edge_dim(), f.m);
  Rng rng(5);
  enc.init_normal(rng);
  Aamg g;
  g.id = "one";
  g.n = 1;
  g.node_class = {1};
  g.node_area = {0.4};
  g.node_center = {{0.3, 0.7}};
  Tape t;
  EncoderState s = enc.encode(t, assemble_graph(g, f));
  CHECK(s.n == 1);
  CHECK(s.nodes.value().rows() == 1);
  CHECK(s.nodes.value().allFinite());
}

TEST_CASE("one encoder layer passes a float64 gradient check") {
  FeatureConfig f = tiny_feat();
  EdgeAugmentedEncoder enc(tiny_enc(), f.node_dim(), f.edge_dim(), f.m);
  Rng rng(6);
  enc.init_normal(rng);
  Aamg g = small_graph(1, 4);
  DenseGraph d = assemble_graph(g, f);
  auto params = enc.parameters();
  auto build = [&](Tape& t) {
    EncoderState s = enc.encode(t, d);
    return t.add(t.sum_all(t.square(s.nodes)), t.sum_all(t.square(s.edges)));
  };
  auto value = [&] {
    Tape t;
    return build(t).scalar();
  };
  auto backward = [&] {
    Tape t;
    t.backward(build(t));
  };
  CHECK(fd_max_rel_error(params, value, backward) < 1e-3);
}
