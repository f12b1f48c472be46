#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sevgae/encoder.hpp"

namespace sevgae {

enum class LatentMode { Vae, Vq, Ned, NedVq };

std::string to_string(LatentMode m);
LatentMode latent_mode_from_string(const std::string& s);

struct LatentConfig {
  int M = 512;
  LatentMode mode = LatentMode::Vae;
  int codebook_size = 512;  // K_vq
  int n_max = kNodeCapMax;  // edge flatten width is n_max^2
};

enum class CodeRole { Graph, Node, Edge, NodeGraph, EdgeGraph };

struct LatentCode {
  Tensor z, mu, logvar;
  CodeRole role = CodeRole::Graph;
  Eigen::RowVectorXd noise;  // recorded r, empty in deterministic mode
  int vq_index = -1;         // codebook row when quantized
  Tensor pre_q;              // continuous code before quantization
  Tensor vq_proto;           // differentiable codebook row (for the VQ loss)
};

/// GIN pooling block of the vanilla VAE module: (1+eps) self-weight, scalar
/// edge map as message weights, residual, Linear-PReLU-LN, sum over nodes.
class GinPool : public Module {
 public:
  GinPool() = default;
  GinPool(const std::string& name, int d_h, int c_h);
  Tensor operator()(Tape& t, const EncoderState& s);
  void collect(std::vector<Parameter*>& out) override;

  Parameter eps;      // learnable scalar
  Linear edge_map;    // c_h -> 1
  LinPrLn block;      // d_h -> d_h
};

/// Two 2-layer heads producing mu and logvar, plus reparameterized sampling.
class VaeHead : public Module {
 public:
  VaeHead() = default;
  VaeHead(const std::string& name, int in, int M);
  /// rng == nullptr -> deterministic mode, z = mu.
  LatentCode operator()(Tape& t, Tensor pooled, CodeRole role, Rng* rng);
  void collect(std::vector<Parameter*>& out) override;

  LinPrLn mu1, mu2, lv1, lv2;
  int M = 0;
};

struct QuantizeResult {
  Tensor z_k;   // straight-through: value is the prototype, grad flows to z
  Tensor proto; // codebook row as a differentiable slice (for the VQ loss)
  int index = -1;
};

/// Full latent stage for one graph. Owns the sub-modules required by `mode`.
class LatentStage : public Module {
 public:
  LatentStage() = default;
  explicit LatentStage(const LatentConfig& cfg, int d_h, int c_h);

  /// Encoder state -> one (vae/vq) or two (ned/ned_vq) codes, already
  /// quantized when the mode calls for it.
  std::vector<LatentCode> operator()(Tape& t, const EncoderState& s, Rng* rng);

  QuantizeResult quantize(Tape& t, Tensor z);
  void collect(std::vector<Parameter*>& out) override;
  const LatentConfig& config() const { return cfg_; }
  Parameter& codebook() { return codebook_; }
  void init_codebook(Rng& rng);

 private:
  LatentCode ned_node_code(Tape& t, const EncoderState& s, Rng* rng);
  LatentCode ned_edge_code(Tape& t, const EncoderState& s, Rng* rng);

  LatentConfig cfg_;
  int d_h_ = 0, c_h_ = 0;
  GinPool pool_;
  VaeHead graph_head_;
  // NED-only parts.
  VaeHead node_head_, edge_head_;
  Linear ned_edge_map_;   // c_h -> 1
  Parameter ned_edge_flat_W_;  // n_max^2 x M
  Parameter ned_edge_flat_b_;  // 1 x M
  Linear fuse_node_, fuse_edge_;  // 2M -> M
  // VQ-only part.
  Parameter codebook_;  // K x M
};

}  // namespace sevgae
