#pragma once

#include "sevgae/features.hpp"
#include "sevgae/nn.hpp"

namespace sevgae {

struct EncoderConfig {
  int layers = 4;
  int d_h = 128;       // node channel width
  int heads = 8;       // O
  int c_h = 32;        // edge channel width
  double clip = 5.0;   // attention score clip range
  int ffn_expansion = 2;

  int head_dim() const { return d_h / heads; }  // b_k
};

/// Updated node and edge embeddings for the real nodes of one graph.
struct EncoderState {
  int n = 0;
  Tensor nodes;  // n x d_h
  Tensor edges;  // (n*n) x c_h
};

/// Edge-augmented graph transformer. Attention scores are biased by learned
/// edge terms and gated by a sigmoid of the edge channels; edge embeddings
/// evolve layer by layer alongside the node channels.
class EdgeAugmentedEncoder : public Module {
 public:
  EdgeAugmentedEncoder() = default;
  EdgeAugmentedEncoder(const EncoderConfig& cfg, int node_dim, int edge_dim,
                       int hop_clip);

  EncoderState embed_inputs(Tape& t, const DenseGraph& g) const;
  EncoderState layer(Tape& t, const EncoderState& s, int l) const;
  EncoderState encode(Tape& t, const DenseGraph& g) const;

  void collect(std::vector<Parameter*>& out) override;
  const EncoderConfig& config() const { return cfg_; }

 private:
  struct Layer {
    Linear q, k, v;
    Linear edge_bias;   // c_h -> heads, per-head attention bias E
    Linear edge_gate;   // c_h -> heads, per-head gate G
    Linear edge_out;    // heads -> c_h
    LayerNorm node_ln_in, node_ln_out, edge_ln_in, edge_ln_out;
    Ffn node_ffn, edge_ffn;
  };
  EncoderConfig cfg_;
  int node_dim_ = 0, edge_dim_ = 0, hop_clip_ = 0;
  Linear node_in_, edge_in_;
  Parameter hop_embed_;  // (m+1) x c_h distance embedding table
  std::vector<Layer> layers_;
};

}  // namespace sevgae
