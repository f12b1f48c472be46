#pragma once

#include <string>

#include "sevgae/model.hpp"

namespace sevgae {

/// Adam with global-norm gradient clipping.
struct Adam {
  double lr = 1e-4;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step_count = 0;
  std::vector<Eigen::MatrixXd> m, v;  // one slot per parameter, flat order

  void init(const std::vector<Parameter*>& params);
  void step(const std::vector<Parameter*>& params);
};

struct Checkpoint {
  std::uint32_t version = 1;
  ModelConfig config;
  int epoch = 0;
  long global_step = 0;
  std::string model_rng_state;  // serialized mt19937_64 streams
  std::string data_rng_state;
};

/// Single-file binary container: magic, version, embedded config text,
/// epoch/step, RNG states, parameter blobs, Adam state.
void save_checkpoint(const std::string& path, const Checkpoint& meta,
                     const std::vector<Parameter*>& params, const Adam& opt);

/// Restores metadata and fills `params`/`opt` in place; parameter names and
/// shapes must match the model built from the embedded config.
Checkpoint load_checkpoint(const std::string& path,
                           const std::vector<Parameter*>& params, Adam& opt);

/// Reads only the embedded ModelConfig (to build the model before loading).
ModelConfig peek_checkpoint_config(const std::string& path);

}  // namespace sevgae
