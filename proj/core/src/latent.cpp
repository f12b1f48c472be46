#include "sevgae/latent.hpp"

#include <limits>
#include <stdexcept>

namespace sevgae {

std::string to_string(LatentMode m) {
  switch (m) {
    case LatentMode::Vae: return "vae";
    case LatentMode::Vq: return "vq";
    case LatentMode::Ned: return "ned";
    case LatentMode::NedVq: return "ned_vq";
  }
  return "vae";
}

LatentMode latent_mode_from_string(const std::string& s) {
  if (s == "vae") return LatentMode::Vae;
  if (s == "vq") return LatentMode::Vq;
  if (s == "ned") return LatentMode::Ned;
  if (s == "ned_vq") return LatentMode::NedVq;
  throw std::invalid_argument("unknown latent mode: " + s);
}

GinPool::GinPool(const std::string& name, int d_h, int c_h)
    : eps(name + ".eps", 1, 1),
      edge_map(name + ".edge_map", c_h, 1),
      block(name + ".block", d_h, d_h) {}

Tensor GinPool::operator()(Tape& t, const EncoderState& s) {
  Tensor one_plus_eps = t.add_const(t.leaf(eps), Eigen::MatrixXd::Ones(1, 1));
  Tensor x_hat = t.mul_scalar_t(s.nodes, one_plus_eps);
  Tensor a_hat = t.col_as_square(t.reshape(edge_map(t, s.edges), s.n * s.n, 1),
                                 0, s.n);
  Tensor x_msg = t.matmul(a_hat, x_hat);
  Tensor x_res = t.add(x_hat, x_msg);
  return t.col_sums(block(t, x_res));
}

void GinPool::collect(std::vector<Parameter*>& out) {
  out.push_back(&eps);
  edge_map.collect(out);
  block.collect(out);
}

VaeHead::VaeHead(const std::string& name, int in, int M_)
    : mu1(name + ".mu1", in, M_),
      mu2(name + ".mu2", M_, M_),
      lv1(name + ".lv1", in, M_),
      lv2(name + ".lv2", M_, M_),
      M(M_) {}

LatentCode VaeHead::operator()(Tape& t, Tensor pooled, CodeRole role,
                               Rng* rng) {
  LatentCode code;
  code.role = role;
  code.mu = mu2(t, mu1(t, pooled));
  code.logvar = lv2(t, lv1(t, pooled));
  if (rng) {
    code.noise.resize(M);
    for (int i = 0; i < M; ++i) code.noise(i) = rng->normal();
    Tensor std = t.exp_(t.scale(code.logvar, 0.5));
    code.z = t.add(code.mu, t.mul(std, t.constant(code.noise)));
  } else {
    code.z = code.mu;
  }
  return code;
}

void VaeHead::collect(std::vector<Parameter*>& out) {
  mu1.collect(out);
  mu2.collect(out);
  lv1.collect(out);
  lv2.collect(out);
}

LatentStage::LatentStage(const LatentConfig& cfg, int d_h, int c_h)
    : cfg_(cfg), d_h_(d_h), c_h_(c_h) {
  if (cfg.M < 1) throw std::invalid_argument("latent: M must be >= 1");
  pool_ = GinPool("lat.pool", d_h, c_h);
  graph_head_ = VaeHead("lat.graph", d_h, cfg.M);
  if (cfg.mode == LatentMode::Ned || cfg.mode == LatentMode::NedVq) {
    node_head_ = VaeHead("lat.node", d_h, cfg.M);
    edge_head_ = VaeHead("lat.edge", cfg.M, cfg.M);
    ned_edge_map_ = Linear("lat.ned_edge_map", c_h, 1);
    ned_edge_flat_W_ =
        Parameter("lat.ned_edge_flat.W", cfg.n_max * cfg.n_max, cfg.M);
    ned_edge_flat_b_ = Parameter("lat.ned_edge_flat.b", 1, cfg.M);
    fuse_node_ = Linear("lat.fuse_node", 2 * cfg.M, cfg.M);
    fuse_edge_ = Linear("lat.fuse_edge", 2 * cfg.M, cfg.M);
  }
  if (cfg.mode == LatentMode::Vq || cfg.mode == LatentMode::NedVq) {
    if (cfg.codebook_size < 2)
      throw std::invalid_argument("latent: codebook size must be >= 2");
    codebook_ = Parameter("lat.codebook", cfg.codebook_size, cfg.M);
  }
}

void LatentStage::init_codebook(Rng& rng) {
  if (codebook_.rows == 0) return;
  double lim = 1.0 / double(cfg_.codebook_size);
  for (int i = 0; i < codebook_.rows; ++i)
    for (int j = 0; j < codebook_.cols; ++j)
      codebook_.data(i, j) = (2.0 * rng.uniform() - 1.0) * lim;
}

QuantizeResult LatentStage::quantize(Tape& t, Tensor z) {
  const Eigen::MatrixXd& zv = z.value();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < codebook_.rows; ++i) {
    double d = (codebook_.data.row(i) - zv.row(0)).squaredNorm();
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = i;
    }
  }
  QuantizeResult r;
  r.index = best;
  r.z_k = t.quantize_st(z, codebook_.data.row(best));
  r.proto = t.slice_rows(t.leaf(codebook_), best, 1);
  return r;
}

LatentCode LatentStage::ned_node_code(Tape& t, const EncoderState& s,
                                      Rng* rng) {
  return node_head_(t, t.col_sums(s.nodes), CodeRole::Node, rng);
}

LatentCode LatentStage::ned_edge_code(Tape& t, const EncoderState& s,
                                      Rng* rng) {
  // Scalar edge map, flattened to the padded n_max^2 layout; padded pairs
  // contribute nothing, so only the occupied rows of the flatten weights are
  // touched.
  Tensor flat = t.transpose(ned_edge_map_(t, s.edges));  // 1 x (n*n)
  std::vector<int> rows;
  rows.reserve(s.n * s.n);
  for (int u = 0; u < s.n; ++u)
    for (int w = 0; w < s.n; ++w) rows.push_back(u * cfg_.n_max + w);
  Tensor w_sel = t.select_rows(t.leaf(ned_edge_flat_W_), rows);
  Tensor pre = t.add(t.matmul(flat, w_sel), t.leaf(ned_edge_flat_b_));
  return edge_head_(t, pre, CodeRole::Edge, rng);
}

std::vector<LatentCode> LatentStage::operator()(Tape& t,
                                                const EncoderState& s,
                                                Rng* rng) {
  if (s.n < 1) throw std::invalid_argument("latent: graph has no real nodes");
  std::vector<LatentCode> out;
  LatentCode graph = graph_head_(t, pool_(t, s), CodeRole::Graph, rng);
  switch (cfg_.mode) {
    case LatentMode::Vae:
      out.push_back(std::move(graph));
      break;
    case LatentMode::Vq: {
      QuantizeResult q = quantize(t, graph.z);
      graph.pre_q = graph.z;
      graph.z = q.z_k;
      graph.vq_index = q.index;
      graph.vq_proto = q.proto;
      out.push_back(std::move(graph));
      break;
    }
    case LatentMode::Ned:
    case LatentMode::NedVq: {
      LatentCode node = ned_node_code(t, s, rng);
      LatentCode edge = ned_edge_code(t, s, rng);
      LatentCode node_graph, edge_graph;
      node_graph.role = CodeRole::NodeGraph;
      edge_graph.role = CodeRole::EdgeGraph;
      node_graph.z = fuse_node_(t, t.concat_cols({node.z, graph.z}));
      edge_graph.z = fuse_edge_(t, t.concat_cols({edge.z, graph.z}));
      // KL in NED mode is taken on the three pre-fusion codes; keep them.
      if (cfg_.mode == LatentMode::NedVq) {
        QuantizeResult qn = quantize(t, node_graph.z);
        node_graph.pre_q = node_graph.z;
        node_graph.z = qn.z_k;
        node_graph.vq_index = qn.index;
        node_graph.vq_proto = qn.proto;
        QuantizeResult qe = quantize(t, edge_graph.z);
        edge_graph.pre_q = edge_graph.z;
        edge_graph.z = qe.z_k;
        edge_graph.vq_index = qe.index;
        edge_graph.vq_proto = qe.proto;
      }
      out.push_back(std::move(graph));
      out.push_back(std::move(node));
      out.push_back(std::move(edge));
      out.push_back(std::move(node_graph));
      out.push_back(std::move(edge_graph));
      break;
    }
  }
  return out;
}

void LatentStage::collect(std::vector<Parameter*>& out) {
  pool_.collect(out);
  graph_head_.collect(out);
  if (cfg_.mode == LatentMode::Ned || cfg_.mode == LatentMode::NedVq) {
    node_head_.collect(out);
    edge_head_.collect(out);
    ned_edge_map_.collect(out);
    out.push_back(&ned_edge_flat_W_);
    out.push_back(&ned_edge_flat_b_);
    fuse_node_.collect(out);
    fuse_edge_.collect(out);
  }
  if (codebook_.rows > 0) out.push_back(&codebook_);
}

}  // namespace sevgae
