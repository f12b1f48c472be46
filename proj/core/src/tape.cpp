#include "sevgae/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace sevgae {

const Eigen::MatrixXd& Tensor::value() const { return tape->nodes_[id].val; }
const Eigen::MatrixXd& Tensor::grad() const { return tape->nodes_[id].grad; }

Tensor Tape::make(Eigen::MatrixXd v) {
  Node n;
  n.grad = Eigen::MatrixXd::Zero(v.rows(), v.cols());
  n.val = std::move(v);
  nodes_.push_back(std::move(n));
  Tensor t;
  t.tape = this;
  t.id = static_cast<int>(nodes_.size()) - 1;
  t.rows = static_cast<int>(nodes_.back().val.rows());
  t.cols = static_cast<int>(nodes_.back().val.cols());
  return t;
}

Tensor Tape::leaf(Parameter& p) {
  Tensor t = make(p.data);
  nodes_[t.id].param = &p;
  return t;
}

Tensor Tape::constant(const Eigen::MatrixXd& v) { return make(v); }

Tensor Tape::add(Tensor a, Tensor b) {
  Tensor out = make(v(a) + v(b));
  nodes_[out.id].back = [this, a, b, out] {
    g(a) += g(out);
    g(b) += g(out);
  };
  return out;
}

Tensor Tape::sub(Tensor a, Tensor b) {
  Tensor out = make(v(a) - v(b));
  nodes_[out.id].back = [this, a, b, out] {
    g(a) += g(out);
    g(b) -= g(out);
  };
  return out;
}

Tensor Tape::mul(Tensor a, Tensor b) {
  Tensor out = make(v(a).cwiseProduct(v(b)));
  nodes_[out.id].back = [this, a, b, out] {
    g(a) += g(out).cwiseProduct(v(b));
    g(b) += g(out).cwiseProduct(v(a));
  };
  return out;
}

Tensor Tape::add_scalar_t(Tensor a, Tensor s) {
  Tensor out = make(v(a).array() + v(s)(0, 0));
  nodes_[out.id].back = [this, a, s, out] {
    g(a) += g(out);
    g(s)(0, 0) += g(out).sum();
  };
  return out;
}

Tensor Tape::mul_scalar_t(Tensor a, Tensor s) {
  Tensor out = make(v(a) * v(s)(0, 0));
  nodes_[out.id].back = [this, a, s, out] {
    g(a) += g(out) * v(s)(0, 0);
    g(s)(0, 0) += g(out).cwiseProduct(v(a)).sum();
  };
  return out;
}

Tensor Tape::scale(Tensor a, double c) {
  Tensor out = make(v(a) * c);
  nodes_[out.id].back = [this, a, c, out] { g(a) += g(out) * c; };
  return out;
}

Tensor Tape::add_const(Tensor a, const Eigen::MatrixXd& c) {
  Tensor out = make(v(a) + c);
  nodes_[out.id].back = [this, a, out] { g(a) += g(out); };
  return out;
}

Tensor Tape::matmul(Tensor a, Tensor b) {
  Tensor out = make(v(a) * v(b));
  nodes_[out.id].back = [this, a, b, out] {
    g(a) += g(out) * v(b).transpose();
    g(b) += v(a).transpose() * g(out);
  };
  return out;
}

Tensor Tape::transpose(Tensor a) {
  Tensor out = make(v(a).transpose());
  nodes_[out.id].back = [this, a, out] { g(a) += g(out).transpose(); };
  return out;
}

Tensor Tape::add_row_broadcast(Tensor x, Tensor b) {
  Eigen::MatrixXd y = v(x);
  y.rowwise() += v(b).row(0);
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, x, b, out] {
    g(x) += g(out);
    g(b).row(0) += g(out).colwise().sum();
  };
  return out;
}

Tensor Tape::scale_rows(Tensor x, Tensor c) {
  Eigen::MatrixXd y = v(x).array().colwise() * v(c).col(0).array();
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, x, c, out] {
    g(x) += (g(out).array().colwise() * v(c).col(0).array()).matrix();
    g(c).col(0) += g(out).cwiseProduct(v(x)).rowwise().sum();
  };
  return out;
}

Tensor Tape::sigmoid(Tensor a) {
  Eigen::MatrixXd y = (1.0 / (1.0 + (-v(a).array()).exp())).matrix();
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, out] {
    const auto& y_ = v(out).array();
    g(a) += (g(out).array() * y_ * (1.0 - y_)).matrix();
  };
  return out;
}

Tensor Tape::exp_(Tensor a) {
  Tensor out = make(v(a).array().exp().matrix());
  nodes_[out.id].back = [this, a, out] {
    g(a) += g(out).cwiseProduct(v(out));
  };
  return out;
}

Tensor Tape::log_(Tensor a) {
  Tensor out = make(v(a).array().log().matrix());
  nodes_[out.id].back = [this, a, out] {
    g(a) += g(out).cwiseQuotient(v(a));
  };
  return out;
}

Tensor Tape::square(Tensor a) {
  Tensor out = make(v(a).array().square().matrix());
  nodes_[out.id].back = [this, a, out] {
    g(a) += 2.0 * g(out).cwiseProduct(v(a));
  };
  return out;
}

Tensor Tape::prelu(Tensor a, Tensor slope) {
  double s = v(slope)(0, 0);
  Eigen::MatrixXd y = v(a).array().max(0.0) + s * v(a).array().min(0.0);
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, slope, out, s] {
    const auto& x = v(a).array();
    g(a) += (g(out).array() * (x > 0.0).select(
                 Eigen::ArrayXXd::Ones(x.rows(), x.cols()),
                 Eigen::ArrayXXd::Constant(x.rows(), x.cols(), s)))
                .matrix();
    g(slope)(0, 0) += (g(out).array() * x.min(0.0)).sum();
  };
  return out;
}

Tensor Tape::clip(Tensor a, double lo, double hi) {
  Tensor out = make(v(a).array().max(lo).min(hi).matrix());
  nodes_[out.id].back = [this, a, out, lo, hi] {
    const auto& x = v(a).array();
    auto inside = (x > lo && x < hi).cast<double>();
    g(a) += (g(out).array() * inside).matrix();
  };
  return out;
}

Tensor Tape::softmax_rows(Tensor a) {
  Eigen::MatrixXd y = v(a);
  for (int i = 0; i < y.rows(); ++i) {
    Eigen::ArrayXd row = y.row(i).array();
    row -= row.maxCoeff();
    row = row.exp();
    y.row(i) = (row / row.sum()).matrix();
  }
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, out] {
    const auto& y_ = v(out);
    const auto& go = g(out);
    for (int i = 0; i < y_.rows(); ++i) {
      double dot = go.row(i).dot(y_.row(i));
      g(a).row(i) += (y_.row(i).array() * (go.row(i).array() - dot)).matrix();
    }
  };
  return out;
}

Tensor Tape::layer_norm_rows(Tensor x, Tensor gain, Tensor bias) {
  constexpr double kEps = 1e-5;
  const auto& X = v(x);
  int R = static_cast<int>(X.rows()), C = static_cast<int>(X.cols());
  Eigen::MatrixXd xhat(R, C);
  Eigen::VectorXd inv_sigma(R);
  for (int i = 0; i < R; ++i) {
    double mu = X.row(i).mean();
    double var = (X.row(i).array() - mu).square().mean();
    double is = 1.0 / std::sqrt(var + kEps);
    inv_sigma(i) = is;
    xhat.row(i) = ((X.row(i).array() - mu) * is).matrix();
  }
  Eigen::MatrixXd y = xhat;
  for (int i = 0; i < R; ++i)
    y.row(i) = (xhat.row(i).array() * v(gain).row(0).array()).matrix() + v(bias).row(0);
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, x, gain, bias, out, xhat, inv_sigma] {
    const auto& go = g(out);
    for (int i = 0; i < go.rows(); ++i) {
      Eigen::RowVectorXd dxhat = go.row(i).cwiseProduct(v(gain).row(0));
      double m1 = dxhat.mean();
      double m2 = dxhat.cwiseProduct(xhat.row(i)).mean();
      g(x).row(i) +=
          inv_sigma(i) * (dxhat.array() - m1 - xhat.row(i).array() * m2).matrix();
      g(gain).row(0) += go.row(i).cwiseProduct(xhat.row(i));
      g(bias).row(0) += go.row(i);
    }
  };
  return out;
}

Tensor Tape::sum_all(Tensor a) {
  Eigen::MatrixXd y(1, 1);
  y(0, 0) = v(a).sum();
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, out] {
    g(a).array() += g(out)(0, 0);
  };
  return out;
}

Tensor Tape::col_sums(Tensor a) {
  Tensor out = make(v(a).colwise().sum());
  nodes_[out.id].back = [this, a, out] {
    g(a).rowwise() += g(out).row(0);
  };
  return out;
}

Tensor Tape::row_sums(Tensor a) {
  Tensor out = make(v(a).rowwise().sum());
  nodes_[out.id].back = [this, a, out] {
    g(a).colwise() += g(out).col(0);
  };
  return out;
}

Tensor Tape::reshape(Tensor a, int r, int c) {
  if (r * c != a.rows * a.cols) throw std::invalid_argument("reshape size mismatch");
  // Row-major reshape semantics.
  Eigen::MatrixXd y(r, c);
  const auto& A = v(a);
  int idx = 0;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j, ++idx) y(idx / c, idx % c) = A(i, j);
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, out, c] {
    int idx = 0;
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j, ++idx) g(a)(i, j) += g(out)(idx / c, idx % c);
  };
  return out;
}

Tensor Tape::concat_cols(const std::vector<Tensor>& xs) {
  int R = xs.front().rows, C = 0;
  for (auto& x : xs) C += x.cols;
  Eigen::MatrixXd y(R, C);
  int off = 0;
  for (auto& x : xs) {
    y.middleCols(off, x.cols) = v(x);
    off += x.cols;
  }
  Tensor out = make(std::move(y));
  std::vector<Tensor> parts = xs;
  nodes_[out.id].back = [this, parts, out] {
    int off = 0;
    for (auto& x : parts) {
      g(x) += g(out).middleCols(off, x.cols);
      off += x.cols;
    }
  };
  return out;
}

Tensor Tape::concat_rows(const std::vector<Tensor>& xs) {
  int C = xs.front().cols, R = 0;
  for (auto& x : xs) R += x.rows;
  Eigen::MatrixXd y(R, C);
  int off = 0;
  for (auto& x : xs) {
    y.middleRows(off, x.rows) = v(x);
    off += x.rows;
  }
  Tensor out = make(std::move(y));
  std::vector<Tensor> parts = xs;
  nodes_[out.id].back = [this, parts, out] {
    int off = 0;
    for (auto& x : parts) {
      g(x) += g(out).middleRows(off, x.rows);
      off += x.rows;
    }
  };
  return out;
}

Tensor Tape::slice_cols(Tensor a, int c0, int count) {
  Tensor out = make(v(a).middleCols(c0, count));
  nodes_[out.id].back = [this, a, out, c0, count] {
    g(a).middleCols(c0, count) += g(out);
  };
  return out;
}

Tensor Tape::slice_rows(Tensor a, int r0, int count) {
  Tensor out = make(v(a).middleRows(r0, count));
  nodes_[out.id].back = [this, a, out, r0, count] {
    g(a).middleRows(r0, count) += g(out);
  };
  return out;
}

Tensor Tape::select_rows(Tensor a, const std::vector<int>& idx) {
  Eigen::MatrixXd y(static_cast<int>(idx.size()), v(a).cols());
  for (int i = 0; i < y.rows(); ++i) y.row(i) = v(a).row(idx[i]);
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, out, idx] {
    for (int i = 0; i < static_cast<int>(idx.size()); ++i)
      g(a).row(idx[i]) += g(out).row(i);
  };
  return out;
}

Tensor Tape::col_as_square(Tensor a, int col, int n) {
  Eigen::MatrixXd y(n, n);
  for (int u = 0; u < n; ++u)
    for (int w = 0; w < n; ++w) y(u, w) = v(a)(u * n + w, col);
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, out, col, n] {
    for (int u = 0; u < n; ++u)
      for (int w = 0; w < n; ++w) g(a)(u * n + w, col) += g(out)(u, w);
  };
  return out;
}

Tensor Tape::squares_to_cols(const std::vector<Tensor>& mats) {
  int n = mats.front().rows;
  int k = static_cast<int>(mats.size());
  Eigen::MatrixXd y(n * n, k);
  for (int c = 0; c < k; ++c)
    for (int u = 0; u < n; ++u)
      for (int w = 0; w < n; ++w) y(u * n + w, c) = v(mats[c])(u, w);
  Tensor out = make(std::move(y));
  std::vector<Tensor> parts = mats;
  nodes_[out.id].back = [this, parts, out, n] {
    for (size_t c = 0; c < parts.size(); ++c)
      for (int u = 0; u < n; ++u)
        for (int w = 0; w < n; ++w)
          g(parts[c])(u, w) += g(out)(u * n + w, static_cast<int>(c));
  };
  return out;
}

Tensor Tape::symmetrize_pairs(Tensor a, int n) {
  Eigen::MatrixXd y = v(a);
  for (int u = 0; u < n; ++u)
    for (int w = u + 1; w < n; ++w) {
      Eigen::RowVectorXd avg = 0.5 * (v(a).row(u * n + w) + v(a).row(w * n + u));
      y.row(u * n + w) = avg;
      y.row(w * n + u) = avg;
    }
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, a, out, n] {
    for (int u = 0; u < n; ++u) {
      g(a).row(u * n + u) += g(out).row(u * n + u);
      for (int w = u + 1; w < n; ++w) {
        Eigen::RowVectorXd avg =
            0.5 * (g(out).row(u * n + w) + g(out).row(w * n + u));
        g(a).row(u * n + w) += avg;
        g(a).row(w * n + u) += avg;
      }
    }
  };
  return out;
}

Tensor Tape::conv1d_same(Tensor x, Tensor w, Tensor b, int k) {
  int Cin = x.rows, n = x.cols, Cout = w.rows;
  int pad = k / 2;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(Cout, n);
  const auto& X = v(x);
  const auto& W = v(w);
  for (int co = 0; co < Cout; ++co)
    for (int i = 0; i < n; ++i) {
      double acc = v(b)(0, co);
      for (int ci = 0; ci < Cin; ++ci)
        for (int t = 0; t < k; ++t) {
          int j = i + t - pad;
          if (j >= 0 && j < n) acc += W(co, ci * k + t) * X(ci, j);
        }
      y(co, i) = acc;
    }
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, x, w, b, out, k, Cin, n, Cout] {
    int pad = k / 2;
    const auto& X = v(x);
    const auto& W = v(w);
    const auto& go = g(out);
    for (int co = 0; co < Cout; ++co)
      for (int i = 0; i < n; ++i) {
        double gv = go(co, i);
        if (gv == 0.0) continue;
        g(b)(0, co) += gv;
        for (int ci = 0; ci < Cin; ++ci)
          for (int t = 0; t < k; ++t) {
            int j = i + t - pad;
            if (j >= 0 && j < n) {
              g(w)(co, ci * k + t) += gv * X(ci, j);
              g(x)(ci, j) += gv * W(co, ci * k + t);
            }
          }
      }
  };
  return out;
}

Tensor Tape::conv2d_same(Tensor x, Tensor w, Tensor b, int H, int W_, int k) {
  int Cin = x.rows, Cout = w.rows;
  int pad = k / 2;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(Cout, H * W_);
  const auto& X = v(x);
  const auto& W = v(w);
  for (int co = 0; co < Cout; ++co)
    for (int h = 0; h < H; ++h)
      for (int ww = 0; ww < W_; ++ww) {
        double acc = v(b)(0, co);
        for (int ci = 0; ci < Cin; ++ci)
          for (int dy = 0; dy < k; ++dy)
            for (int dx = 0; dx < k; ++dx) {
              int hh = h + dy - pad, wcol = ww + dx - pad;
              if (hh >= 0 && hh < H && wcol >= 0 && wcol < W_)
                acc += W(co, (ci * k + dy) * k + dx) * X(ci, hh * W_ + wcol);
            }
        y(co, h * W_ + ww) = acc;
      }
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, x, w, b, out, H, W_, k, Cin, Cout] {
    int pad = k / 2;
    const auto& X = v(x);
    const auto& W = v(w);
    const auto& go = g(out);
    for (int co = 0; co < Cout; ++co)
      for (int h = 0; h < H; ++h)
        for (int ww = 0; ww < W_; ++ww) {
          double gv = go(co, h * W_ + ww);
          if (gv == 0.0) continue;
          g(b)(0, co) += gv;
          for (int ci = 0; ci < Cin; ++ci)
            for (int dy = 0; dy < k; ++dy)
              for (int dx = 0; dx < k; ++dx) {
                int hh = h + dy - pad, wcol = ww + dx - pad;
                if (hh >= 0 && hh < H && wcol >= 0 && wcol < W_) {
                  g(w)(co, (ci * k + dy) * k + dx) += gv * X(ci, hh * W_ + wcol);
                  g(x)(ci, hh * W_ + wcol) += gv * W(co, (ci * k + dy) * k + dx);
                }
              }
        }
  };
  return out;
}

Tensor Tape::upsample1d_nearest(Tensor x) {
  int C = x.rows, n = x.cols;
  Eigen::MatrixXd y(C, 2 * n);
  for (int i = 0; i < n; ++i) {
    y.col(2 * i) = v(x).col(i);
    y.col(2 * i + 1) = v(x).col(i);
  }
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, x, out, n] {
    for (int i = 0; i < n; ++i)
      g(x).col(i) += g(out).col(2 * i) + g(out).col(2 * i + 1);
  };
  return out;
}

Tensor Tape::upsample2d_nearest(Tensor x, int H, int W_) {
  int C = x.rows;
  Eigen::MatrixXd y(C, 4 * H * W_);
  int W2 = 2 * W_;
  for (int h = 0; h < H; ++h)
    for (int w = 0; w < W_; ++w) {
      const auto src = v(x).col(h * W_ + w);
      y.col((2 * h) * W2 + 2 * w) = src;
      y.col((2 * h) * W2 + 2 * w + 1) = src;
      y.col((2 * h + 1) * W2 + 2 * w) = src;
      y.col((2 * h + 1) * W2 + 2 * w + 1) = src;
    }
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, x, out, H, W_] {
    int W2 = 2 * W_;
    for (int h = 0; h < H; ++h)
      for (int w = 0; w < W_; ++w)
        g(x).col(h * W_ + w) += g(out).col((2 * h) * W2 + 2 * w) +
                                g(out).col((2 * h) * W2 + 2 * w + 1) +
                                g(out).col((2 * h + 1) * W2 + 2 * w) +
                                g(out).col((2 * h + 1) * W2 + 2 * w + 1);
  };
  return out;
}

Tensor Tape::detach(Tensor a) { return make(v(a)); }

Tensor Tape::quantize_st(Tensor z, const Eigen::MatrixXd& prototype) {
  Tensor out = make(prototype);
  nodes_[out.id].back = [this, z, out] { g(z) += g(out); };
  return out;
}

Tensor Tape::bce_sum(Tensor pred, const Eigen::MatrixXd& target,
                     const Eigen::MatrixXd& mask, double eps) {
  const auto& P = v(pred);
  Eigen::ArrayXXd pc = P.array().max(eps).min(1.0 - eps);
  Eigen::ArrayXXd t = target.array();
  double loss =
      -(mask.array() * (t * pc.log() + (1.0 - t) * (1.0 - pc).log())).sum();
  Eigen::MatrixXd y(1, 1);
  y(0, 0) = loss;
  Tensor out = make(std::move(y));
  nodes_[out.id].back = [this, pred, out, target, mask, eps] {
    const auto& P = v(pred).array();
    auto pc = P.max(eps).min(1.0 - eps);
    auto inside = (P > eps && P < 1.0 - eps).cast<double>();
    auto t = target.array();
    g(pred) += (g(out)(0, 0) * mask.array() * inside *
                (-t / pc + (1.0 - t) / (1.0 - pc)))
                   .matrix();
  };
  return out;
}

Tensor Tape::log_mean_exp_neg(const std::vector<Tensor>& losses) {
  double m = v(losses.front())(0, 0);
  for (auto& l : losses) m = std::min(m, v(l)(0, 0));
  double S = 0.0;
  for (auto& l : losses) S += std::exp(-(v(l)(0, 0) - m));
  Eigen::MatrixXd y(1, 1);
  y(0, 0) = m - std::log(S) + std::log(double(losses.size()));
  Tensor out = make(std::move(y));
  std::vector<Tensor> ls = losses;
  nodes_[out.id].back = [this, ls, out, m, S] {
    for (auto& l : ls) {
      double wgt = std::exp(-(v(l)(0, 0) - m)) / S;
      g(l)(0, 0) += g(out)(0, 0) * wgt;
    }
  };
  return out;
}

Tensor Tape::hard_min(const std::vector<Tensor>& losses) {
  size_t arg = 0;
  for (size_t i = 1; i < losses.size(); ++i)
    if (v(losses[i])(0, 0) < v(losses[arg])(0, 0)) arg = i;
  Tensor out = make(v(losses[arg]));
  Tensor sel = losses[arg];
  nodes_[out.id].back = [this, sel, out] { g(sel)(0, 0) += g(out)(0, 0); };
  return out;
}

void Tape::backward(Tensor loss) {
  if (loss.rows != 1 || loss.cols != 1)
    throw std::invalid_argument("backward expects a scalar loss");
  nodes_[loss.id].grad(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back();
    if (nodes_[i].param) nodes_[i].param->grad += nodes_[i].grad;
  }
}

}  // namespace sevgae
