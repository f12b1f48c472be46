#include "sevgae/model.hpp"

#include <sstream>
#include <stdexcept>

namespace sevgae {

FeatureConfig ModelConfig::feature_config() const {
  FeatureConfig f;
  f.schema = LabelSchema::make(labels == 25 ? SchemaVariant::TwentyFive
                                            : SchemaVariant::Six);
  f.use_poly = poly;
  f.poly_vertices = poly_vertices;
  f.use_svd = svd;
  f.svd_rank = svd_rank;
  f.n_max = n_max;
  f.m = hop_clip;
  return f;
}

EncoderConfig ModelConfig::encoder_config() const {
  EncoderConfig e;
  e.layers = enc_layers;
  e.d_h = d_h;
  e.heads = heads;
  e.c_h = c_h;
  e.ffn_expansion = ffn_expansion;
  return e;
}

LatentConfig ModelConfig::latent_config() const {
  LatentConfig l;
  l.M = z_dim;
  l.mode = mode();
  l.codebook_size = codebook_size;
  l.n_max = n_max;
  return l;
}

StyleDecoderConfig ModelConfig::style_config() const {
  StyleDecoderConfig s;
  s.M = z_dim;
  s.n_max = n_max;
  s.node_channels = node_channels;
  s.edge_channels = edge_channels;
  s.start_resolution = start_resolution;
  s.noise = decoder_noise;
  return s;
}

std::string to_kv(const ModelConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "style = " << (c.style ? 1 : 0) << "\n"
     << "svd = " << (c.svd ? 1 : 0) << "\n"
     << "ned = " << (c.ned ? 1 : 0) << "\n"
     << "vq = " << (c.vq ? 1 : 0) << "\n"
     << "poly = " << (c.poly ? 1 : 0) << "\n"
     << "labels = " << c.labels << "\n"
     << "z_dim = " << c.z_dim << "\n"
     << "n_max = " << c.n_max << "\n"
     << "hop_clip = " << c.hop_clip << "\n"
     << "enc_layers = " << c.enc_layers << "\n"
     << "d_h = " << c.d_h << "\n"
     << "heads = " << c.heads << "\n"
     << "c_h = " << c.c_h << "\n"
     << "ffn_expansion = " << c.ffn_expansion << "\n"
     << "poly_vertices = " << c.poly_vertices << "\n"
     << "svd_rank = " << c.svd_rank << "\n"
     << "codebook_size = " << c.codebook_size << "\n"
     << "node_channels = " << c.node_channels << "\n"
     << "edge_channels = " << c.edge_channels << "\n"
     << "start_resolution = " << c.start_resolution << "\n"
     << "decoder_noise = " << (c.decoder_noise ? 1 : 0) << "\n"
     << "beta = " << c.beta << "\n"
     << "vq_weight = " << c.vq_weight << "\n"
     << "hard_min_orderings = " << (c.hard_min_orderings ? 1 : 0) << "\n"
     << "single_ordering_per_step = " << (c.single_ordering_per_step ? 1 : 0)
     << "\n"
     << "learning_rate = " << c.learning_rate << "\n"
     << "grad_clip = " << c.grad_clip << "\n"
     << "batch_size = " << c.batch_size << "\n"
     << "epochs = " << c.epochs << "\n"
     << "seed = " << c.seed << "\n";
  return os.str();
}

ModelConfig model_config_from_kv(const std::string& text) {
  ModelConfig c;
  std::istringstream is(text);
  std::string line;
  auto as_bool = [](const std::string& v) {
    return v == "1" || v == "true" || v == "yes";
  };
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos || line[0] == '#') continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (key == "style") c.style = as_bool(val);
    else if (key == "svd") c.svd = as_bool(val);
    else if (key == "ned") c.ned = as_bool(val);
    else if (key == "vq") c.vq = as_bool(val);
    else if (key == "poly") c.poly = as_bool(val);
    else if (key == "labels") c.labels = std::stoi(val);
    else if (key == "z_dim") c.z_dim = std::stoi(val);
    else if (key == "n_max") c.n_max = std::stoi(val);
    else if (key == "hop_clip") c.hop_clip = std::stoi(val);
    else if (key == "enc_layers") c.enc_layers = std::stoi(val);
    else if (key == "d_h") c.d_h = std::stoi(val);
    else if (key == "heads") c.heads = std::stoi(val);
    else if (key == "c_h") c.c_h = std::stoi(val);
    else if (key == "ffn_expansion") c.ffn_expansion = std::stoi(val);
    else if (key == "poly_vertices") c.poly_vertices = std::stoi(val);
    else if (key == "svd_rank") c.svd_rank = std::stoi(val);
    else if (key == "codebook_size") c.codebook_size = std::stoi(val);
    else if (key == "node_channels") c.node_channels = std::stoi(val);
    else if (key == "edge_channels") c.edge_channels = std::stoi(val);
    else if (key == "start_resolution") c.start_resolution = std::stoi(val);
    else if (key == "decoder_noise") c.decoder_noise = as_bool(val);
    else if (key == "beta") c.beta = std::stod(val);
    else if (key == "vq_weight") c.vq_weight = std::stod(val);
    else if (key == "hard_min_orderings") c.hard_min_orderings = as_bool(val);
    else if (key == "single_ordering_per_step")
      c.single_ordering_per_step = as_bool(val);
    else if (key == "learning_rate") c.learning_rate = std::stod(val);
    else if (key == "grad_clip") c.grad_clip = std::stod(val);
    else if (key == "batch_size") c.batch_size = std::stoi(val);
    else if (key == "epochs") c.epochs = std::stoi(val);
    else if (key == "seed") c.seed = std::stoull(val);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return c;
}

SeVgae::SeVgae(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg.labels != 6 && cfg.labels != 25)
    throw std::invalid_argument("model: labels must be 6 or 25");
  FeatureConfig f = cfg.feature_config();
  encoder_ = EdgeAugmentedEncoder(cfg.encoder_config(), f.node_dim(),
                                  f.edge_dim(), f.m);
  latent_ = LatentStage(cfg.latent_config(), cfg.d_h, cfg.c_h);
  if (cfg.style)
    style_dec_ = StyleDecoder(cfg.style_config(), f.node_dim(), f.edge_dim());
  else
    mlp_dec_ = MlpDecoder(cfg.z_dim, cfg.n_max, f.node_dim(), f.edge_dim());
}

void SeVgae::init_weights() {
  Rng rng(cfg_.seed ^ 0x5e5067ae00000001ull);
  init_normal(rng);
  latent_.init_codebook(rng);
}

DecodedGraph SeVgae::decode(Tape& t, Tensor z_node, Tensor z_edge,
                            Rng* noise_rng) {
  if (cfg_.style) return style_dec_(t, z_node, z_edge, noise_rng);
  return mlp_dec_(t, z_node, z_edge);
}

ForwardResult SeVgae::forward(Tape& t, const DenseGraph& g, Rng* rng,
                              Rng* noise_rng) {
  ForwardResult r;
  EncoderState s = encoder_.encode(t, g);
  r.codes = latent_(t, s, rng);
  Tensor z_node, z_edge;
  if (cfg_.ned) {
    // node+graph code drives the node decoder, edge+graph the edge decoder.
    for (const auto& c : r.codes) {
      if (c.role == CodeRole::NodeGraph) z_node = c.z;
      if (c.role == CodeRole::EdgeGraph) z_edge = c.z;
    }
  } else {
    z_node = z_edge = r.codes.front().z;
  }
  r.decoded = decode(t, z_node, z_edge, noise_rng);
  return r;
}

std::pair<Tensor, Tensor> SeVgae::recon_losses(Tape& t,
                                               const DecodedGraph& dec,
                                               const DenseGraph& target) {
  Tensor ln = recon_node_loss(t, dec.X, target.X, target.node_mask);
  Tensor le = recon_edge_loss(t, dec.A, target.A_e, target.node_mask);
  return {ln, le};
}

void SeVgae::collect(std::vector<Parameter*>& out) {
  encoder_.collect(out);
  latent_.collect(out);
  if (cfg_.style)
    style_dec_.collect(out);
  else
    mlp_dec_.collect(out);
}

}  // namespace sevgae
