#include "sevgae/decoder.hpp"

#include <algorithm>
#include <stdexcept>

namespace sevgae {

std::vector<int> StyleDecoderConfig::resolutions() const {
  int r = std::min(start_resolution, n_max);
  std::vector<int> out{r};
  while (r < n_max) {
    r *= 2;
    out.push_back(r);
  }
  if (r != n_max)
    throw std::invalid_argument(
        "style decoder: n_max must be start_resolution times a power of 2");
  return out;
}

MappingNetwork::MappingNetwork(const std::string& name, int M, int depth) {
  lin_.reserve(depth);
  act_.reserve(depth);
  for (int i = 0; i < depth; ++i) {
    std::string p = name + ".l" + std::to_string(i);
    lin_.emplace_back(p, M, M);
    act_.emplace_back(p + ".act");
  }
}

Tensor MappingNetwork::operator()(Tape& t, Tensor z) {
  Tensor w = z;
  for (size_t i = 0; i < lin_.size(); ++i) w = act_[i](t, lin_[i](t, w));
  return w;
}

void MappingNetwork::collect(std::vector<Parameter*>& out) {
  for (auto& l : lin_) l.collect(out);
  for (auto& a : act_) a.collect(out);
}

StyleSynthesis::StyleSynthesis(const std::string& name,
                               const StyleDecoderConfig& cfg, int out_dim,
                               bool grid)
    : cfg_(cfg), grid_(grid), out_dim_(out_dim) {
  channels_ = grid ? cfg.edge_channels : cfg.node_channels;
  auto res = cfg.resolutions();
  int r0 = res.front();
  int positions0 = grid ? r0 * r0 : r0;
  constant_ = Parameter(name + ".constant", channels_, positions0);
  const int k = 3;
  int wcols = grid ? channels_ * k * k : channels_ * k;
  stages_.reserve(res.size());
  for (size_t s = 0; s < res.size(); ++s) {
    std::string p = name + ".s" + std::to_string(s);
    Stage st{Linear(p + ".affine", cfg.M, channels_),
             Parameter(p + ".conv.W", channels_, wcols),
             Parameter(p + ".conv.b", 1, channels_), PRelu(p + ".act"),
             Parameter(p + ".noise_scale", 1, 1)};
    stages_.push_back(std::move(st));
  }
  proj_ = Linear(name + ".proj", channels_, out_dim);
}

Tensor StyleSynthesis::operator()(Tape& t, Tensor w, Rng* noise_rng) {
  auto res = cfg_.resolutions();
  Tensor x = t.leaf(constant_);
  for (size_t s = 0; s < res.size(); ++s) {
    Stage& st = stages_[s];
    int r = res[s];
    if (s > 0) {
      // Upsample from the previous stage's resolution.
      x = grid_ ? t.upsample2d_nearest(x, res[s - 1], res[s - 1])
                : t.upsample1d_nearest(x);
    }
    Tensor scales = t.transpose(st.affine(t, w));  // C x 1
    x = t.scale_rows(x, scales);
    x = grid_ ? t.conv2d_same(x, t.leaf(st.conv_w), t.leaf(st.conv_b), r, r, 3)
              : t.conv1d_same(x, t.leaf(st.conv_w), t.leaf(st.conv_b), 3);
    x = st.act(t, x);
    if (cfg_.noise && noise_rng) {
      Eigen::MatrixXd noise(channels_, grid_ ? r * r : r);
      for (int i = 0; i < noise.rows(); ++i)
        for (int j = 0; j < noise.cols(); ++j)
          noise(i, j) = noise_rng->normal();
      x = t.add(x, t.mul_scalar_t(t.constant(noise), t.leaf(st.noise_scale)));
    }
  }
  // Final 1x1 projection: positions x C -> positions x out_dim.
  return proj_(t, t.transpose(x));
}

void StyleSynthesis::collect(std::vector<Parameter*>& out) {
  out.push_back(&constant_);
  for (auto& st : stages_) {
    st.affine.collect(out);
    out.push_back(&st.conv_w);
    out.push_back(&st.conv_b);
    st.act.collect(out);
    out.push_back(&st.noise_scale);
  }
  proj_.collect(out);
}

StyleDecoder::StyleDecoder(const StyleDecoderConfig& cfg, int node_dim,
                           int edge_dim)
    : cfg_(cfg),
      node_map_("dec.node_map", cfg.M, cfg.mapping_depth),
      edge_map_("dec.edge_map", cfg.M, cfg.mapping_depth),
      node_synth_("dec.node_synth", cfg, node_dim, false),
      edge_synth_("dec.edge_synth", cfg, edge_dim, true) {}

DecodedGraph StyleDecoder::operator()(Tape& t, Tensor z_node, Tensor z_edge,
                                      Rng* noise_rng) {
  DecodedGraph g;
  g.X = t.sigmoid(node_synth_(t, node_map_(t, z_node), noise_rng));
  Tensor e = edge_synth_(t, edge_map_(t, z_edge), noise_rng);
  g.A = t.sigmoid(t.symmetrize_pairs(e, cfg_.n_max));
  return g;
}

void StyleDecoder::collect(std::vector<Parameter*>& out) {
  node_map_.collect(out);
  edge_map_.collect(out);
  node_synth_.collect(out);
  edge_synth_.collect(out);
}

MlpDecoder::MlpDecoder(int M, int n_max, int node_dim, int edge_dim)
    : n_max_(n_max),
      node_dim_(node_dim),
      edge_dim_(edge_dim),
      node1_("dec.mlp.node1", M, M),
      node2_("dec.mlp.node2", M, n_max * node_dim),
      edge1_("dec.mlp.edge1", M, M),
      edge2_("dec.mlp.edge2", M, n_max * n_max * edge_dim) {}

DecodedGraph MlpDecoder::operator()(Tape& t, Tensor z_node, Tensor z_edge) {
  DecodedGraph g;
  Tensor xn = node2_(t, node1_(t, z_node));
  g.X = t.sigmoid(t.reshape(xn, n_max_, node_dim_));
  Tensor xe = edge2_(t, edge1_(t, z_edge));
  Tensor e = t.reshape(xe, n_max_ * n_max_, edge_dim_);
  g.A = t.sigmoid(t.symmetrize_pairs(e, n_max_));
  return g;
}

void MlpDecoder::collect(std::vector<Parameter*>& out) {
  node1_.collect(out);
  node2_.collect(out);
  edge1_.collect(out);
  edge2_.collect(out);
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Undo the cyclic padding of resample_polygon: the shortest prefix whose
// cyclic repetition reproduces the stored vertex list.
std::vector<std::array<double, 2>> recover_polygon(
    const std::vector<std::array<double, 2>>& verts) {
  int V = static_cast<int>(verts.size());
  for (int k = 1; k < V; ++k) {
    bool ok = true;
    for (int i = 0; i < V && ok; ++i) ok = verts[i] == verts[i % k];
    if (ok) return {verts.begin(), verts.begin() + k};
  }
  return verts;
}

}  // namespace

Aamg discretize(const Eigen::MatrixXd& X, const Eigen::MatrixXd& A,
                const FeatureConfig& cfg, const DiscretizeOptions& opt) {
  const int N = cfg.n_max;
  const int C = cfg.schema.node_class_count();
  Aamg g;
  g.id = opt.id;
  g.schema = cfg.schema.variant;
  if (cfg.use_poly) g.node_poly.emplace();

  std::vector<int> kept(N, -1);  // old row -> new node index
  for (int i = 0; i < N; ++i) {
    int arg = 0;
    double best = X(i, 0);
    for (int c = 1; c <= C; ++c)  // includes the null channel at C
      if (X(i, c) > best) {
        best = X(i, c);
        arg = c;
      }
    if (arg == cfg.null_class_channel()) continue;
    kept[i] = g.n++;
    g.node_class.push_back(arg);
    g.node_area.push_back(clamp01(X(i, cfg.area_channel())));
    g.node_center.push_back({clamp01(X(i, cfg.center_channel())),
                             clamp01(X(i, cfg.center_channel() + 1))});
    if (cfg.use_poly) {
      std::vector<std::array<double, 2>> verts(cfg.poly_vertices);
      for (int v = 0; v < cfg.poly_vertices; ++v)
        verts[v] = {clamp01(X(i, cfg.poly_channel() + 2 * v)),
                    clamp01(X(i, cfg.poly_channel() + 2 * v + 1))};
      g.node_poly->push_back(recover_polygon(verts));
    }
  }

  const int T = cfg.schema.edge_class_count();
  for (int u = 0; u < N; ++u) {
    if (kept[u] < 0) continue;
    for (int v = u + 1; v < N; ++v) {
      if (kept[v] < 0) continue;
      const auto row = A.row(u * N + v);
      if (row(cfg.no_edge_channel()) >= 0.5) continue;
      for (int tp = 0; tp < T; ++tp)
        if (row(tp) >= 0.5) g.edges.push_back({kept[u], kept[v], tp});
    }
  }
  std::sort(g.edges.begin(), g.edges.end());

  if (opt.rescale_areas) {
    // Keep the interior area budget valid; untouched when already within it,
    // so clean round-trips stay exact.
    double interior = 0.0;
    for (int i = 0; i < g.n; ++i)
      if (g.node_class[i] != cfg.schema.outdoor_class()) interior += g.node_area[i];
    if (interior > 1.0 + kAreaEps) {
      for (int i = 0; i < g.n; ++i)
        if (g.node_class[i] != cfg.schema.outdoor_class())
          g.node_area[i] /= interior;
    }
  }
  return g;
}

}  // namespace sevgae
