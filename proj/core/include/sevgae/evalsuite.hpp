#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sevgae/aamg.hpp"

namespace sevgae {

struct EmbeddingConfig {
  int layers = 3;
  int width = 64;
  std::uint64_t seed = 42;
};

/// Per-graph embeddings from an untrained, seed-fixed GIN over the collapsed
/// adjacency; node inputs are one-hot class + area + center, sum readout.
/// Rows: graphs, cols: width.
Eigen::MatrixXd embed_set(const std::vector<Aamg>& graphs,
                          const EmbeddingConfig& cfg);

/// Gaussian Frechet distance with eps*I covariance regularization (1e-6).
double frechet_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

std::pair<double, double> precision_recall(const Eigen::MatrixXd& real,
                                           const Eigen::MatrixXd& gen,
                                           int k = 5);
std::pair<double, double> density_coverage(const Eigen::MatrixXd& real,
                                           const Eigen::MatrixXd& gen,
                                           int k = 5);

enum class MmdKernel { Linear, Rbf };
/// Unbiased MMD^2; RBF bandwidth = pooled median pairwise distance.
double mmd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, MmdKernel kern);

double f1(double a, double b);

struct EvalReport {
  double fd = 0, precision = 0, recall = 0, density = 0, coverage = 0;
  double f1_pr = 0, f1_dc = 0, mmd_linear = 0, mmd_rbf = 0;
  int n_real = 0, n_gen = 0;
  std::uint64_t embedding_seed = 42;
  std::string config_fingerprint;

  std::string to_json() const;
};

EvalReport evaluate_sets(const std::vector<Aamg>& real,
                         const std::vector<Aamg>& gen,
                         const EmbeddingConfig& cfg,
                         const std::string& fingerprint);

}  // namespace sevgae
