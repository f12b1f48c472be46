#include "sevgae/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace sevgae {

EdgeAugmentedEncoder::EdgeAugmentedEncoder(const EncoderConfig& cfg,
                                           int node_dim, int edge_dim,
                                           int hop_clip)
    : cfg_(cfg),
      node_dim_(node_dim),
      edge_dim_(edge_dim),
      hop_clip_(hop_clip),
      node_in_("enc.node_in", node_dim, cfg.d_h),
      edge_in_("enc.edge_in", edge_dim, cfg.c_h),
      hop_embed_("enc.hop_embed", hop_clip + 1, cfg.c_h) {
  if (cfg.d_h % cfg.heads != 0)
    throw std::invalid_argument("encoder: d_h must be divisible by heads");
  layers_.reserve(cfg.layers);
  for (int l = 0; l < cfg.layers; ++l) {
    std::string p = "enc.l" + std::to_string(l);
    Layer lay{
        Linear(p + ".q", cfg.d_h, cfg.d_h),
        Linear(p + ".k", cfg.d_h, cfg.d_h),
        Linear(p + ".v", cfg.d_h, cfg.d_h),
        Linear(p + ".edge_bias", cfg.c_h, cfg.heads),
        Linear(p + ".edge_gate", cfg.c_h, cfg.heads),
        Linear(p + ".edge_out", cfg.heads, cfg.c_h),
        LayerNorm(p + ".node_ln_in", cfg.d_h),
        LayerNorm(p + ".node_ln_out", cfg.d_h),
        LayerNorm(p + ".edge_ln_in", cfg.c_h),
        LayerNorm(p + ".edge_ln_out", cfg.c_h),
        Ffn(p + ".node_ffn", cfg.d_h, cfg.ffn_expansion),
        Ffn(p + ".edge_ffn", cfg.c_h, cfg.ffn_expansion),
    };
    layers_.push_back(std::move(lay));
  }
}

void EdgeAugmentedEncoder::collect(std::vector<Parameter*>& out) {
  node_in_.collect(out);
  edge_in_.collect(out);
  out.push_back(&hop_embed_);
  for (auto& l : layers_) {
    l.q.collect(out);
    l.k.collect(out);
    l.v.collect(out);
    l.edge_bias.collect(out);
    l.edge_gate.collect(out);
    l.edge_out.collect(out);
    l.node_ln_in.collect(out);
    l.node_ln_out.collect(out);
    l.edge_ln_in.collect(out);
    l.edge_ln_out.collect(out);
    l.node_ffn.collect(out);
    l.edge_ffn.collect(out);
  }
}

EncoderState EdgeAugmentedEncoder::embed_inputs(Tape& t,
                                                const DenseGraph& g) const {
  const int n = g.n;
  const int n_max = static_cast<int>(g.node_mask.size());
  Eigen::MatrixXd xn = g.X.topRows(n);
  Eigen::MatrixXd xe(n * n, edge_dim_);
  Eigen::MatrixXd hop_sel = Eigen::MatrixXd::Zero(n * n, hop_clip_ + 1);
  for (int u = 0; u < n; ++u)
    for (int w = 0; w < n; ++w) {
      xe.row(u * n + w) = g.A_e.row(u * n_max + w);
      hop_sel(u * n + w, std::min(g.hop[u][w], hop_clip_)) = 1.0;
    }
  auto& self = const_cast<EdgeAugmentedEncoder&>(*this);
  Tensor nodes = self.node_in_(t, t.constant(xn));
  Tensor edges = t.add(self.edge_in_(t, t.constant(xe)),
                       t.matmul(t.constant(hop_sel), t.leaf(self.hop_embed_)));
  return {n, nodes, edges};
}

EncoderState EdgeAugmentedEncoder::layer(Tape& t, const EncoderState& s,
                                         int l) const {
  auto& lay = const_cast<Layer&>(layers_[l]);
  const int n = s.n;
  const int b = cfg_.head_dim();
  const double inv_sqrt_b = 1.0 / std::sqrt(double(b));

  Tensor q = lay.q(t, s.nodes);
  Tensor k = lay.k(t, s.nodes);
  Tensor vv = lay.v(t, s.nodes);
  Tensor ebias = lay.edge_bias(t, s.edges);           // (n*n) x O
  Tensor gate = t.sigmoid(lay.edge_gate(t, s.edges)); // (n*n) x O

  std::vector<Tensor> head_outs, head_scores;
  head_outs.reserve(cfg_.heads);
  head_scores.reserve(cfg_.heads);
  for (int o = 0; o < cfg_.heads; ++o) {
    Tensor qo = t.slice_cols(q, o * b, b);
    Tensor ko = t.slice_cols(k, o * b, b);
    Tensor vo = t.slice_cols(vv, o * b, b);
    Tensor raw = t.scale(t.matmul(qo, t.transpose(ko)), inv_sqrt_b);
    Tensor h_hat = t.add(t.clip(raw, -cfg_.clip, cfg_.clip),
                         t.col_as_square(ebias, o, n));
    head_scores.push_back(h_hat);
    Tensor go = t.col_as_square(gate, o, n);
    Tensor attn = t.mul(t.softmax_rows(h_hat), go);
    // Centrality scaler: ln(1 + sum of gates per query row).
    Tensor cent = t.log_(t.add_const(t.row_sums(go), Eigen::MatrixXd::Ones(n, 1)));
    head_outs.push_back(t.scale_rows(t.matmul(attn, vo), cent));
  }

  Tensor node_res = t.add(s.nodes, t.concat_cols(head_outs));
  Tensor nodes = lay.node_ln_out(
      t, t.add(node_res, lay.node_ffn(t, lay.node_ln_in(t, node_res))));

  Tensor edge_res =
      t.add(s.edges, lay.edge_out(t, t.squares_to_cols(head_scores)));
  Tensor edges = lay.edge_ln_out(
      t, t.add(edge_res, lay.edge_ffn(t, lay.edge_ln_in(t, edge_res))));
  edges = t.symmetrize_pairs(edges, n);
  return {n, nodes, edges};
}

EncoderState EdgeAugmentedEncoder::encode(Tape& t, const DenseGraph& g) const {
  EncoderState s = embed_inputs(t, g);
  for (int l = 0; l < cfg_.layers; ++l) s = layer(t, s, l);
  return s;
}

}  // namespace sevgae
