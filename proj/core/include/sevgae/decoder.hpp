#pragma once

#include "sevgae/features.hpp"
#include "sevgae/nn.hpp"

namespace sevgae {

struct StyleDecoderConfig {
  int M = 512;
  int mapping_depth = 8;
  int start_resolution = 8;  // n_0, doubled per stage up to n_max
  int n_max = kNodeCapMax;
  int node_channels = 32;  // per-stage width, constant schedule
  int edge_channels = 16;
  bool noise = true;

  std::vector<int> resolutions() const;  // n_0, 2n_0, ..., n_max
};

/// Dense decoder output on the tape; A is (n_max*n_max) x c, symmetric in
/// the node axes, all entries sigmoid-activated.
struct DecodedGraph {
  Tensor X;  // n_max x d
  Tensor A;  // (n_max*n_max) x c
};

/// 8-layer MLP mapping network z -> w, M -> M.
class MappingNetwork : public Module {
 public:
  MappingNetwork() = default;
  MappingNetwork(const std::string& name, int M, int depth);
  Tensor operator()(Tape& t, Tensor z);
  void collect(std::vector<Parameter*>& out) override;

 private:
  std::vector<Linear> lin_;
  std::vector<PRelu> act_;
};

/// Style-based synthesis stack shared by the node (1-D) and edge (2-D)
/// paths: learned constant start, per-stage affine modulation of w,
/// convolution, PReLU, optional noise, nearest-neighbor upsampling.
class StyleSynthesis : public Module {
 public:
  StyleSynthesis() = default;
  /// `grid` false -> 1-D over n positions; true -> 2-D over n x n.
  StyleSynthesis(const std::string& name, const StyleDecoderConfig& cfg,
                 int out_dim, bool grid);
  /// Returns positions x out_dim (n_max or n_max^2 rows), pre-sigmoid.
  Tensor operator()(Tape& t, Tensor w, Rng* noise_rng);
  void collect(std::vector<Parameter*>& out) override;

 private:
  struct Stage {
    Linear affine;   // M -> C
    Parameter conv_w, conv_b;
    PRelu act;
    Parameter noise_scale;  // 1x1
  };
  StyleDecoderConfig cfg_;
  bool grid_ = false;
  int channels_ = 0, out_dim_ = 0;
  Parameter constant_;  // C x n_0 (or C x n_0^2)
  std::vector<Stage> stages_;
  Linear proj_;  // C -> out_dim, the final 1x1 projection
};

class StyleDecoder : public Module {
 public:
  StyleDecoder() = default;
  StyleDecoder(const StyleDecoderConfig& cfg, int node_dim, int edge_dim);
  DecodedGraph operator()(Tape& t, Tensor z_node, Tensor z_edge,
                          Rng* noise_rng);
  void collect(std::vector<Parameter*>& out) override;
  const StyleDecoderConfig& config() const { return cfg_; }

 private:
  StyleDecoderConfig cfg_;
  MappingNetwork node_map_, edge_map_;
  StyleSynthesis node_synth_, edge_synth_;
};

/// Baseline decoder: two Linear-PReLU-LN blocks per path, reshaped.
class MlpDecoder : public Module {
 public:
  MlpDecoder() = default;
  MlpDecoder(int M, int n_max, int node_dim, int edge_dim);
  DecodedGraph operator()(Tape& t, Tensor z_node, Tensor z_edge);
  void collect(std::vector<Parameter*>& out) override;

 private:
  int n_max_ = 0, node_dim_ = 0, edge_dim_ = 0;
  LinPrLn node1_, node2_, edge1_, edge2_;
};

struct DiscretizeOptions {
  std::string id = "decoded";
  /// Rescale interior areas only when their sum exceeds the validity budget.
  bool rescale_areas = true;
};

/// Threshold/argmax conversion of dense decoder values into an AAMG.
Aamg discretize(const Eigen::MatrixXd& X, const Eigen::MatrixXd& A,
                const FeatureConfig& cfg, const DiscretizeOptions& opt = {});

}  // namespace sevgae
