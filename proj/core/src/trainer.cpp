#include "sevgae/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sevgae {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

CorpusSplit split_corpus(const std::vector<Aamg>& graphs) {
  CorpusSplit s;
  for (const auto& g : graphs) {
    if (fnv1a(g.id) % 10 == 9)
      s.val.push_back(g);
    else
      s.train.push_back(g);
  }
  return s;
}

Trainer::Trainer(const ModelConfig& cfg, std::vector<Aamg> corpus)
    : cfg_(cfg),
      feat_(cfg.feature_config()),
      model_(cfg),
      split_(split_corpus(corpus)),
      data_rng_(splitmix(cfg.seed, 0xda7aull)) {
  obj_.mode = cfg.mode();
  obj_.beta = cfg.beta;
  obj_.vq_weight = cfg.vq_weight;
  obj_.hard_min_orderings = cfg.hard_min_orderings;
  model_.init_weights();
  params_ = model_.parameters();
  opt_.lr = cfg.learning_rate;
  opt_.init(params_);
  meta_.config = cfg;
}

double Trainer::graph_loss(Tape& t, const Aamg& g, bool sample_latents,
                           std::uint64_t noise_seed, Tensor& out_total,
                           double* rec) {
  auto family = ordering_family(g);
  std::vector<CanonicalOrdering> orderings;
  if (cfg_.single_ordering_per_step && sample_latents) {
    orderings.push_back(family[data_rng_.next_u64() % family.size()]);
  } else {
    orderings.assign(family.begin(), family.end());
  }

  std::vector<Tensor> per_ordering;
  std::vector<LatentCode> first_codes;
  per_ordering.reserve(orderings.size());
  for (size_t i = 0; i < orderings.size(); ++i) {
    Aamg pg = apply_permutation(g, orderings[i]);
    DenseGraph dense = assemble_graph(pg, feat_);
    // The reparameterization noise is shared across the ordering family so
    // the four passes score one latent draw under four target orderings.
    Rng noise(noise_seed);
    Rng* rng = sample_latents ? &noise : nullptr;
    ForwardResult fr = model_.forward(t, dense, rng);
    auto [ln, le] = model_.recon_losses(t, fr.decoded, dense);
    per_ordering.push_back(t.add(ln, le));
    if (i == 0) first_codes = std::move(fr.codes);
  }
  Tensor l_rec = ordering_elbo(t, per_ordering, obj_.hard_min_orderings);
  Tensor l_kl = kl_loss(t, first_codes);
  Tensor l_vq = vq_loss(t, first_codes);
  Tensor total = t.add(l_rec, t.scale(l_kl, obj_.beta));
  if (obj_.mode == LatentMode::Vq || obj_.mode == LatentMode::NedVq)
    total = t.add(total, t.scale(l_vq, obj_.vq_weight));
  out_total = total;
  if (rec) *rec = l_rec.scalar();
  return total.scalar();
}

StepResult Trainer::train_step(const std::vector<const Aamg*>& batch) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  Tape t;
  Tensor sum = t.constant(Eigen::MatrixXd::Zero(1, 1));
  StepResult r;
  for (size_t i = 0; i < batch.size(); ++i) {
    std::uint64_t noise_seed =
        splitmix(splitmix(cfg_.seed, std::uint64_t(meta_.global_step)),
                 fnv1a(batch[i]->id));
    Tensor total;
    double rec = 0.0;
    r.total += graph_loss(t, *batch[i], true, noise_seed, total, &rec);
    r.rec += rec;
    sum = t.add(sum, total);
  }
  double inv = 1.0 / double(batch.size());
  Tensor loss = t.scale(sum, inv);
  r.total *= inv;
  r.rec *= inv;
  if (!std::isfinite(loss.scalar())) {
    std::vector<std::string> ids;
    for (auto* g : batch) ids.push_back(g->id);
    std::string msg = "non-finite loss at step " +
                      std::to_string(meta_.global_step) + "; batch:";
    for (const auto& id : ids) msg += " " + id;
    throw TrainAbort(msg, ids);
  }
  for (auto* p : params_) p->zero_grad();
  t.backward(loss);
  clip_gradients(params_, cfg_.grad_clip);
  opt_.step(params_);
  ++meta_.global_step;
  return r;
}

double Trainer::validation_loss() {
  if (split_.val.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& g : split_.val) {
    Tape t;
    Tensor total;
    sum += graph_loss(t, g, false, 0, total, nullptr);
  }
  return sum / double(split_.val.size());
}

std::vector<EpochStats> Trainer::run(
    const std::optional<std::string>& out_dir) {
  std::ofstream log;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    log.open(*out_dir + "/train_log.jsonl",
             meta_.epoch == 0 ? std::ios::trunc : std::ios::app);
  }
  std::vector<EpochStats> stats;
  for (int epoch = meta_.epoch; epoch < cfg_.epochs; ++epoch) {
    // Deterministic shuffle from the data stream; always permute the
    // original order so a resumed run sees the same epoch permutation.
    std::vector<const Aamg*> order;
    for (const auto& g : split_.train) order.push_back(&g);
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[data_rng_.next_u64() % i]);
    EpochStats es;
    es.epoch = epoch;
    int steps = 0;
    for (size_t b = 0; b < order.size(); b += size_t(cfg_.batch_size)) {
      std::vector<const Aamg*> batch(
          order.begin() + long(b),
          order.begin() + long(std::min(order.size(),
                                        b + size_t(cfg_.batch_size))));
      StepResult sr = train_step(batch);
      es.train_loss += sr.total;
      es.train_rec += sr.rec;
      ++steps;
    }
    if (steps > 0) {
      es.train_loss /= steps;
      es.train_rec /= steps;
    }
    es.val_loss = validation_loss();
    stats.push_back(es);
    meta_.epoch = epoch + 1;
    if (out_dir) {
      save(*out_dir + "/ckpt_epoch" + std::to_string(epoch + 1) + ".bin");
      save(*out_dir + "/ckpt_latest.bin");
      log << "{\"epoch\":" << epoch + 1 << ",\"train_loss\":" << es.train_loss
          << ",\"train_rec\":" << es.train_rec
          << ",\"val_loss\":" << es.val_loss << "}\n";
      log.flush();
    }
  }
  return stats;
}

void Trainer::save(const std::string& path) {
  meta_.data_rng_state = data_rng_.state();
  save_checkpoint(path, meta_, params_, opt_);
}

namespace {

// Config text with the schedule-only `epochs` line dropped: resuming to train
// for more epochs is legitimate, anything else must match exactly.
std::string resume_fingerprint(const ModelConfig& cfg) {
  std::istringstream in(to_kv(cfg));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("epochs ", 0) != 0) out << line << '\n';
  return out.str();
}

}  // namespace

void Trainer::resume(const std::string& path) {
  Checkpoint ck = load_checkpoint(path, params_, opt_);
  if (resume_fingerprint(ck.config) != resume_fingerprint(cfg_))
    throw std::runtime_error("resume: checkpoint config mismatch");
  meta_ = ck;
  // Keep the active config (it may extend the epoch schedule); everything
  // else was just verified identical.
  meta_.config = cfg_;
  data_rng_.set_state(ck.data_rng_state);
}

SampleResult sample_graphs(SeVgae& model, int count, std::uint64_t seed) {
  SampleResult out;
  const ModelConfig& cfg = model.config();
  FeatureConfig feat = cfg.feature_config();
  Rng rng(splitmix(seed, 0x5a3717ull));
  for (int i = 0; i < count; ++i) {
    Tape t;
    Eigen::RowVectorXd zn(cfg.z_dim), ze(cfg.z_dim);
    for (int j = 0; j < cfg.z_dim; ++j) zn(j) = rng.normal();
    if (cfg.ned) {
      for (int j = 0; j < cfg.z_dim; ++j) ze(j) = rng.normal();
    } else {
      ze = zn;
    }
    Tensor tz_node = t.constant(zn);
    Tensor tz_edge = t.constant(ze);
    if (cfg.vq) {
      tz_node = model.latent().quantize(t, tz_node).z_k;
      tz_edge = cfg.ned ? model.latent().quantize(t, tz_edge).z_k : tz_node;
    }
    DecodedGraph dec = model.decode(t, tz_node, tz_edge);
    DiscretizeOptions opt;
    opt.id = "sample-" + std::to_string(i);
    out.graphs.push_back(
        discretize(dec.X.value(), dec.A.value(), feat, opt));
    out.node_dense.push_back(dec.X.value());
    out.edge_dense.push_back(dec.A.value());
    out.codes.push_back(zn);
  }
  return out;
}

std::vector<Aamg> interpolate_codes(SeVgae& model, const Eigen::RowVectorXd& a,
                                    const Eigen::RowVectorXd& b, int steps) {
  if (steps < 2) throw std::invalid_argument("interpolate: steps must be >= 2");
  FeatureConfig feat = model.config().feature_config();
  std::vector<Aamg> out;
  for (int s = 0; s < steps; ++s) {
    double tt = double(s) / double(steps - 1);
    Eigen::RowVectorXd z = (1.0 - tt) * a + tt * b;
    Tape t;
    Tensor tz = t.constant(z);
    if (model.config().vq) tz = model.latent().quantize(t, tz).z_k;
    DecodedGraph dec = model.decode(t, tz, tz);
    DiscretizeOptions opt;
    opt.id = "interp-" + std::to_string(s);
    out.push_back(discretize(dec.X.value(), dec.A.value(), feat, opt));
  }
  return out;
}

std::vector<std::pair<std::string, ModelConfig>> experiment_matrix(
    const ModelConfig& base,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        toggles) {
  std::vector<std::pair<std::string, ModelConfig>> out{{"run", base}};
  for (const auto& [key, values] : toggles) {
    std::vector<std::pair<std::string, ModelConfig>> next;
    for (const auto& [id, cfg] : out) {
      for (const auto& value : values) {
        ModelConfig c = model_config_from_kv(to_kv(cfg) + key + " = " + value +
                                             "\n");
        next.emplace_back(id + "_" + key + "-" + value, c);
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace sevgae
