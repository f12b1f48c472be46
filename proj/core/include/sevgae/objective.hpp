#pragma once

#include "sevgae/decoder.hpp"
#include "sevgae/latent.hpp"

namespace sevgae {

struct ObjectiveConfig {
  LatentMode mode = LatentMode::Vae;
  double beta = 1.0;       // KL weight
  double vq_weight = 1.0;  // dictionary + commitment weight
  bool hard_min_orderings = false;
};

struct LossBreakdown {
  Tensor l_node, l_edge, l_rec, l_kl, l_vq, total;
  std::vector<Tensor> per_ordering;  // reconstruction losses, when active
};

/// Summed BCE over real-node rows and all d channels.
Tensor recon_node_loss(Tape& t, Tensor pred, const Eigen::MatrixXd& target,
                       const std::vector<bool>& node_mask);
/// Summed BCE over real-pair rows (both endpoints real, diagonal included)
/// and all c channels.
Tensor recon_edge_loss(Tape& t, Tensor pred, const Eigen::MatrixXd& target,
                       const std::vector<bool>& node_mask);

/// -1/(2M) sum(1 + logvar - mu^2 - e^logvar), summed over the given codes.
/// Codes without a mu tensor (pure fusion outputs) are skipped.
Tensor kl_loss(Tape& t, const std::vector<LatentCode>& codes);

/// sum ||sg(z) - k||^2 + ||z - sg(k)||^2 over quantized codes.
Tensor vq_loss(Tape& t, const std::vector<LatentCode>& codes);

/// -logsumexp(-losses) + ln(count); or elementwise hard min when flagged.
Tensor ordering_elbo(Tape& t, const std::vector<Tensor>& losses, bool hard_min);

/// Table-style combination for the active mode. `l_rec` is the (possibly
/// ordering-reduced) reconstruction term.
LossBreakdown total_loss(Tape& t, const ObjectiveConfig& cfg, Tensor l_node,
                         Tensor l_edge, const std::vector<LatentCode>& codes);

}  // namespace sevgae
