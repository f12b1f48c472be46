#include "sevgae/objective.hpp"

#include <stdexcept>

namespace sevgae {

namespace {

Eigen::MatrixXd node_mask_matrix(const std::vector<bool>& mask, int cols) {
  int n = static_cast<int>(mask.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, cols);
  for (int i = 0; i < n; ++i)
    if (mask[i]) m.row(i).setOnes();
  return m;
}

Eigen::MatrixXd pair_mask_matrix(const std::vector<bool>& mask, int cols) {
  int n = static_cast<int>(mask.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n * n, cols);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (mask[u] && mask[v]) m.row(u * n + v).setOnes();
  return m;
}

}  // namespace

Tensor recon_node_loss(Tape& t, Tensor pred, const Eigen::MatrixXd& target,
                       const std::vector<bool>& node_mask) {
  return t.bce_sum(pred, target, node_mask_matrix(node_mask, pred.cols));
}

Tensor recon_edge_loss(Tape& t, Tensor pred, const Eigen::MatrixXd& target,
                       const std::vector<bool>& node_mask) {
  return t.bce_sum(pred, target, pair_mask_matrix(node_mask, pred.cols));
}

Tensor kl_loss(Tape& t, const std::vector<LatentCode>& codes) {
  Tensor total = t.constant(Eigen::MatrixXd::Zero(1, 1));
  for (const auto& c : codes) {
    if (c.mu.id < 0 || c.logvar.id < 0) continue;
    int M = c.mu.cols;
    Tensor term = t.add_const(c.logvar, Eigen::MatrixXd::Ones(1, M));
    term = t.sub(term, t.square(c.mu));
    term = t.sub(term, t.exp_(c.logvar));
    total = t.add(total, t.scale(t.sum_all(term), -0.5 / double(M)));
  }
  return total;
}

Tensor vq_loss(Tape& t, const std::vector<LatentCode>& codes) {
  Tensor total = t.constant(Eigen::MatrixXd::Zero(1, 1));
  for (const auto& c : codes) {
    if (c.vq_index < 0 || c.pre_q.id < 0) continue;
    Tensor dict = t.sum_all(t.square(t.sub(t.detach(c.pre_q), c.vq_proto)));
    Tensor commit = t.sum_all(t.square(t.sub(c.pre_q, t.detach(c.vq_proto))));
    total = t.add(total, t.add(dict, commit));
  }
  return total;
}

Tensor ordering_elbo(Tape& t, const std::vector<Tensor>& losses,
                     bool hard_min) {
  if (losses.empty()) throw std::invalid_argument("ordering_elbo: no losses");
  return hard_min ? t.hard_min(losses) : t.log_mean_exp_neg(losses);
}

LossBreakdown total_loss(Tape& t, const ObjectiveConfig& cfg, Tensor l_node,
                         Tensor l_edge, const std::vector<LatentCode>& codes) {
  LossBreakdown out;
  out.l_node = l_node;
  out.l_edge = l_edge;
  out.l_rec = t.add(l_node, l_edge);
  out.l_kl = kl_loss(t, codes);
  out.l_vq = vq_loss(t, codes);
  bool vq_active =
      cfg.mode == LatentMode::Vq || cfg.mode == LatentMode::NedVq;
  out.total = t.add(out.l_rec, t.scale(out.l_kl, cfg.beta));
  if (vq_active) out.total = t.add(out.total, t.scale(out.l_vq, cfg.vq_weight));
  return out;
}

}  // namespace sevgae
