#pragma once

#include <map>
#include <optional>

#include "sevgae/checkpoint.hpp"
#include "sevgae/synthetic.hpp"

namespace sevgae {

struct CorpusSplit {
  std::vector<Aamg> train, val;
};

/// Deterministic 90/10 split by FNV-1a hash of the graph id.
CorpusSplit split_corpus(const std::vector<Aamg>& graphs);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean per-graph total
  double train_rec = 0.0;
  double val_loss = 0.0;
};

/// Raised on non-finite loss; carries the offending batch for diagnostics.
struct TrainAbort : std::runtime_error {
  std::vector<std::string> batch_ids;
  explicit TrainAbort(const std::string& msg, std::vector<std::string> ids)
      : std::runtime_error(msg), batch_ids(std::move(ids)) {}
};

struct StepResult {
  double total = 0.0, rec = 0.0, kl = 0.0, vq = 0.0;
};

class Trainer {
 public:
  Trainer(const ModelConfig& cfg, std::vector<Aamg> corpus);

  /// One optimizer step over a batch; loss averaged over the batch, the
  /// reconstruction term reduced over the canonical-ordering family.
  StepResult train_step(const std::vector<const Aamg*>& batch);
  /// Full deterministic run; per-epoch checkpoint + log line when `out_dir`
  /// is set. Returns per-epoch statistics.
  std::vector<EpochStats> run(const std::optional<std::string>& out_dir);
  double validation_loss();

  void save(const std::string& path);
  void resume(const std::string& path);

  SeVgae& model() { return model_; }
  const CorpusSplit& split() const { return split_; }
  long global_step() const { return meta_.global_step; }

 private:
  double graph_loss(Tape& t, const Aamg& g, bool sample_latents,
                    std::uint64_t noise_seed, Tensor& out_total, double* rec);

  ModelConfig cfg_;
  FeatureConfig feat_;
  ObjectiveConfig obj_;
  SeVgae model_;
  std::vector<Parameter*> params_;
  Adam opt_;
  CorpusSplit split_;
  Checkpoint meta_;
  Rng data_rng_;
};

/// Standard-normal latent draws, decoded and discretized. Returns the graphs
/// and the raw dense outputs.
struct SampleResult {
  std::vector<Aamg> graphs;
  std::vector<Eigen::MatrixXd> node_dense, edge_dense;
  std::vector<Eigen::RowVectorXd> codes;  // node-path code per sample
};
SampleResult sample_graphs(SeVgae& model, int count, std::uint64_t seed);

/// Linear interpolation z(t) = (1-t) a + t b at `steps` points, decoded.
std::vector<Aamg> interpolate_codes(SeVgae& model, const Eigen::RowVectorXd& a,
                                    const Eigen::RowVectorXd& b, int steps);

/// Cartesian expansion of toggle sets: key -> list of values applied over a
/// base config; stable ordering, unique run ids.
std::vector<std::pair<std::string, ModelConfig>> experiment_matrix(
    const ModelConfig& base,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        toggles);

}  // namespace sevgae
