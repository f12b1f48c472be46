#pragma once

#include <memory>

#include "sevgae/decoder.hpp"
#include "sevgae/encoder.hpp"
#include "sevgae/latent.hpp"
#include "sevgae/objective.hpp"

namespace sevgae {

/// The seven experiment toggles plus size/optimizer settings. Serializes
/// losslessly into checkpoints and the flat key/value config files.
struct ModelConfig {
  // Toggles.
  bool style = true;  // style decoder vs the MLP baseline
  bool svd = false;
  bool ned = false;
  bool vq = false;
  bool poly = false;
  int labels = 6;     // 6 or 25
  int z_dim = 512;    // M

  // Sizes.
  int n_max = kNodeCapMax;
  int hop_clip = kDefaultHopClip;
  int enc_layers = 4;
  int d_h = 128;
  int heads = 8;
  int c_h = 32;
  int ffn_expansion = 2;
  int poly_vertices = 8;
  int svd_rank = 8;
  int codebook_size = 512;
  int node_channels = 32;
  int edge_channels = 16;
  int start_resolution = 8;
  bool decoder_noise = false;

  // Objective.
  double beta = 1.0;
  double vq_weight = 1.0;
  bool hard_min_orderings = false;
  bool single_ordering_per_step = false;

  // Optimizer.
  double learning_rate = 1e-4;
  double grad_clip = 1.0;
  int batch_size = 16;
  int epochs = 10;
  std::uint64_t seed = 0;

  LatentMode mode() const {
    if (ned && vq) return LatentMode::NedVq;
    if (ned) return LatentMode::Ned;
    if (vq) return LatentMode::Vq;
    return LatentMode::Vae;
  }
  FeatureConfig feature_config() const;
  EncoderConfig encoder_config() const;
  LatentConfig latent_config() const;
  StyleDecoderConfig style_config() const;
};

/// Flat key/value text form of ModelConfig (one `key = value` per line);
/// also the on-disk config-file schema.
std::string to_kv(const ModelConfig& cfg);
ModelConfig model_config_from_kv(const std::string& text);

struct ForwardResult {
  std::vector<LatentCode> codes;
  DecodedGraph decoded;
};

/// Encoder + latent stage + decoder for one configuration; owns all weights.
class SeVgae : public Module {
 public:
  SeVgae() = default;
  explicit SeVgae(const ModelConfig& cfg);

  /// Full pass on one graph. rng=nullptr -> deterministic latents.
  ForwardResult forward(Tape& t, const DenseGraph& g, Rng* rng,
                        Rng* noise_rng = nullptr);
  /// Decode externally supplied codes (sampling/interpolation).
  DecodedGraph decode(Tape& t, Tensor z_node, Tensor z_edge,
                      Rng* noise_rng = nullptr);
  /// Reconstruction losses of a decoded graph against its dense target.
  std::pair<Tensor, Tensor> recon_losses(Tape& t, const DecodedGraph& dec,
                                         const DenseGraph& target);

  void collect(std::vector<Parameter*>& out) override;
  void init_weights();  // deterministic from cfg.seed

  const ModelConfig& config() const { return cfg_; }
  LatentStage& latent() { return latent_; }
  EdgeAugmentedEncoder& encoder() { return encoder_; }

 private:
  ModelConfig cfg_;
  EdgeAugmentedEncoder encoder_;
  LatentStage latent_;
  StyleDecoder style_dec_;
  MlpDecoder mlp_dec_;
};

}  // namespace sevgae
