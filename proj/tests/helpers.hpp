#pragma once

#include <functional>
#include <vector>

#include "sevgae/model.hpp"
#include "sevgae/synthetic.hpp"

namespace sevgae::testing {

/// Central finite differences of a scalar-valued forward over every entry of
/// every parameter; returns the max relative error against the analytic
/// gradient. The forward must build a fresh tape each call and return the
/// loss tensor after backward-ready construction.
inline double fd_max_rel_error(const std::vector<Parameter*>& params,
                               const std::function<double()>& value,
                               const std::function<void()>& backward,
                               double h = 1e-5) {
  for (auto* p : params) p->zero_grad();
  backward();  // fills grads at the current point
  double worst = 0.0;
  for (auto* p : params) {
    Eigen::MatrixXd analytic = p->grad;
    for (long i = 0; i < p->data.size(); ++i) {
      double saved = p->data.data()[i];
      p->data.data()[i] = saved + h;
      double up = value();
      p->data.data()[i] = saved - h;
      double down = value();
      p->data.data()[i] = saved;
      double fd = (up - down) / (2.0 * h);
      double a = analytic.data()[i];
      double denom = std::max({std::abs(fd), std::abs(a), 1e-4});
      worst = std::max(worst, std::abs(fd - a) / denom);
    }
  }
  return worst;
}

inline Aamg small_graph(std::uint64_t seed, int max_rooms = 8,
                        SchemaVariant schema = SchemaVariant::Six) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.count = 1;
  cfg.rooms_min = 3;
  cfg.rooms_max = max_rooms;
  cfg.schema = schema;
  return generate_layout(cfg, 0);
}

inline ModelConfig tiny_config() {
  ModelConfig c;
  c.style = false;
  c.labels = 6;
  c.z_dim = 16;
  c.n_max = 16;
  c.enc_layers = 1;
  c.d_h = 16;
  c.heads = 2;
  c.c_h = 8;
  c.codebook_size = 8;
  c.node_channels = 4;
  c.edge_channels = 4;
  c.start_resolution = 4;
  c.batch_size = 4;
  c.epochs = 1;
  c.seed = 7;
  return c;
}

}  // namespace sevgae::testing
