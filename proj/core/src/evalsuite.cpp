#include "sevgae/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sevgae/nn.hpp"
#include "sevgae/schema.hpp"

namespace sevgae {

namespace {

// Untrained GIN weights, drawn once from the fixed seed.
struct RandomGin {
  std::vector<Eigen::MatrixXd> W1, W2;  // per layer
  std::vector<Eigen::RowVectorXd> b1, b2;
  Eigen::MatrixXd in_proj;
  Eigen::RowVectorXd in_bias;
  Eigen::MatrixXd edge_proj;  // edge-type one-hot -> width

  RandomGin(int in_dim, int edge_slots, const EmbeddingConfig& cfg) {
    Rng rng(cfg.seed);
    auto draw = [&](int r, int c) {
      Eigen::MatrixXd m(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.normal() / std::sqrt(double(r));
      return m;
    };
    in_proj = draw(in_dim, cfg.width);
    in_bias = draw(1, cfg.width);
    edge_proj = draw(edge_slots, cfg.width);
    for (int l = 0; l < cfg.layers; ++l) {
      W1.push_back(draw(cfg.width, cfg.width));
      b1.push_back(draw(1, cfg.width));
      W2.push_back(draw(cfg.width, cfg.width));
      b2.push_back(draw(1, cfg.width));
    }
  }
};

Eigen::MatrixXd relu(Eigen::MatrixXd x) { return x.cwiseMax(0.0); }

}  // namespace

Eigen::MatrixXd embed_set(const std::vector<Aamg>& graphs,
                          const EmbeddingConfig& cfg) {
  if (graphs.empty()) throw std::invalid_argument("embed_set: empty set");
  // Feature width fixed by the larger vocabulary so embeddings are
  // comparable across schemas: class one-hot (25) + area + center.
  const int kClassSlots = 25;
  const int kEdgeSlots = 6;
  const int in_dim = kClassSlots + 3;
  RandomGin gin(in_dim, kEdgeSlots, cfg);
  Eigen::MatrixXd out(static_cast<int>(graphs.size()), cfg.width);
  for (size_t gi = 0; gi < graphs.size(); ++gi) {
    const Aamg& g = graphs[gi];
    int n = std::max(g.n, 1);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, in_dim);
    for (int i = 0; i < g.n; ++i) {
      x(i, std::min(g.node_class[i], kClassSlots - 1)) = 1.0;
      x(i, kClassSlots) = g.node_area[i];
      x(i, kClassSlots + 1) = g.node_center[i][0];
      x(i, kClassSlots + 2) = g.node_center[i][1];
    }
    Eigen::MatrixXd h = relu((x * gin.in_proj).rowwise() + gin.in_bias.row(0));
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    auto adj = g.simple_adjacency();
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) A(i, j) = adj[i][j];
    // Typed-edge messages: projected type one-hots summed into each endpoint.
    Eigen::MatrixXd emsg = Eigen::MatrixXd::Zero(n, cfg.width);
    for (const auto& e : g.edges) {
      int slot = std::min(e.type, kEdgeSlots - 1);
      emsg.row(e.u) += gin.edge_proj.row(slot);
      emsg.row(e.v) += gin.edge_proj.row(slot);
    }
    for (size_t l = 0; l < gin.W1.size(); ++l) {
      Eigen::MatrixXd agg = h + A * h + emsg;  // GIN aggregation, eps = 0
      h = relu((agg * gin.W1[l]).rowwise() + gin.b1[l].row(0));
      h = relu((h * gin.W2[l]).rowwise() + gin.b2[l].row(0));
    }
    out.row(static_cast<int>(gi)) = h.colwise().sum();
  }
  return out;
}

namespace {

// Symmetric PSD square root via eigendecomposition.
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
  Eigen::RowVectorXd mu = x.colwise().mean();
  Eigen::MatrixXd c = x.rowwise() - mu;
  return c.transpose() * c / double(x.rows() - 1);
}

}  // namespace

double frechet_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() < 2 || b.rows() < 2)
    throw std::invalid_argument("frechet_distance: need >= 2 samples per set");
  const double eps = 1e-6;
  int d = int(a.cols());
  Eigen::RowVectorXd mu1 = a.colwise().mean(), mu2 = b.colwise().mean();
  Eigen::MatrixXd s1 =
      covariance(a) + eps * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd s2 =
      covariance(b) + eps * Eigen::MatrixXd::Identity(d, d);
  // Tr sqrtm(S1 S2) computed via the symmetric product sqrt(S1)^T S2 sqrt(S1).
  Eigen::MatrixXd r1 = sqrtm_psd(s1);
  Eigen::MatrixXd inner = sqrtm_psd(r1 * s2 * r1);
  double fd = (mu1 - mu2).squaredNorm() + (s1 + s2).trace() - 2.0 * inner.trace();
  if (!std::isfinite(fd)) throw std::runtime_error("frechet_distance: non-finite");
  return std::max(fd, 0.0);  // guard the identical-set identity against roundoff
}

namespace {

// Distance from each row of `x` to its k-th nearest other row of `x`.
Eigen::VectorXd knn_radii(const Eigen::MatrixXd& x, int k) {
  int n = int(x.rows());
  if (n < k + 1)
    throw std::invalid_argument("knn_radii: need at least k+1 samples");
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> d;
    d.reserve(size_t(n) - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) d.push_back((x.row(i) - x.row(j)).norm());
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    r(i) = d[size_t(k - 1)];
  }
  return r;
}

}  // namespace

std::pair<double, double> precision_recall(const Eigen::MatrixXd& real,
                                           const Eigen::MatrixXd& gen,
                                           int k) {
  Eigen::VectorXd rr = knn_radii(real, k);
  Eigen::VectorXd rg = knn_radii(gen, k);
  int in_real = 0;
  for (int j = 0; j < gen.rows(); ++j)
    for (int i = 0; i < real.rows(); ++i)
      if ((gen.row(j) - real.row(i)).norm() <= rr(i)) {
        ++in_real;
        break;
      }
  int in_gen = 0;
  for (int i = 0; i < real.rows(); ++i)
    for (int j = 0; j < gen.rows(); ++j)
      if ((real.row(i) - gen.row(j)).norm() <= rg(j)) {
        ++in_gen;
        break;
      }
  return {double(in_real) / double(gen.rows()),
          double(in_gen) / double(real.rows())};
}

std::pair<double, double> density_coverage(const Eigen::MatrixXd& real,
                                           const Eigen::MatrixXd& gen,
                                           int k) {
  Eigen::VectorXd rr = knn_radii(real, k);
  double density = 0.0;
  for (int j = 0; j < gen.rows(); ++j)
    for (int i = 0; i < real.rows(); ++i)
      if ((gen.row(j) - real.row(i)).norm() <= rr(i)) density += 1.0;
  density /= double(k) * double(gen.rows());
  int covered = 0;
  for (int i = 0; i < real.rows(); ++i)
    for (int j = 0; j < gen.rows(); ++j)
      if ((gen.row(j) - real.row(i)).norm() <= rr(i)) {
        ++covered;
        break;
      }
  return {density, double(covered) / double(real.rows())};
}

double mmd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
           MmdKernel kern) {
  int n = int(a.rows()), m = int(b.rows());
  if (n < 2 || m < 2) throw std::invalid_argument("mmd: need >= 2 samples");
  double gamma = 0.0;
  if (kern == MmdKernel::Rbf) {
    std::vector<double> dists;
    Eigen::MatrixXd pool(n + m, a.cols());
    pool << a, b;
    for (int i = 0; i < n + m; ++i)
      for (int j = i + 1; j < n + m; ++j)
        dists.push_back((pool.row(i) - pool.row(j)).norm());
    std::nth_element(dists.begin(), dists.begin() + long(dists.size() / 2),
                     dists.end());
    double med = dists[dists.size() / 2];
    if (med <= 0.0) med = 1.0;
    gamma = 1.0 / (2.0 * med * med);
  }
  auto kval = [&](const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) {
    if (kern == MmdKernel::Linear) return x.dot(y);
    return std::exp(-gamma * (x - y).squaredNorm());
  };
  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) kxx += kval(a.row(i), a.row(j));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) kyy += kval(b.row(i), b.row(j));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) kxy += kval(a.row(i), b.row(j));
  return kxx / (double(n) * (n - 1)) + kyy / (double(m) * (m - 1)) -
         2.0 * kxy / (double(n) * m);
}

double f1(double a, double b) {
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("f1: negative input");
  if (a + b == 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

std::string EvalReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"fd\":" << fd << ",\"precision\":" << precision
     << ",\"recall\":" << recall << ",\"density\":" << density
     << ",\"coverage\":" << coverage << ",\"f1_pr\":" << f1_pr
     << ",\"f1_dc\":" << f1_dc << ",\"mmd_linear\":" << mmd_linear
     << ",\"mmd_rbf\":" << mmd_rbf << ",\"n_real\":" << n_real
     << ",\"n_gen\":" << n_gen << ",\"embedding_seed\":" << embedding_seed
     << ",\"config_fingerprint\":\"" << config_fingerprint << "\"}";
  return os.str();
}

EvalReport evaluate_sets(const std::vector<Aamg>& real,
                         const std::vector<Aamg>& gen,
                         const EmbeddingConfig& cfg,
                         const std::string& fingerprint) {
  Eigen::MatrixXd er = embed_set(real, cfg);
  Eigen::MatrixXd eg = embed_set(gen, cfg);
  EvalReport r;
  r.fd = frechet_distance(er, eg);
  std::tie(r.precision, r.recall) = precision_recall(er, eg);
  std::tie(r.density, r.coverage) = density_coverage(er, eg);
  r.f1_pr = f1(r.precision, r.recall);
  r.f1_dc = f1(r.density, r.coverage);
  r.mmd_linear = mmd(er, eg, MmdKernel::Linear);
  r.mmd_rbf = mmd(er, eg, MmdKernel::Rbf);
  r.n_real = int(real.size());
  r.n_gen = int(gen.size());
  r.embedding_seed = cfg.seed;
  r.config_fingerprint = fingerprint;
  return r;
}

}  // namespace sevgae
