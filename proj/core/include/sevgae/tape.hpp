#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace sevgae {

/// A named trainable array. Owns its value and accumulated gradient; the
/// tape references parameters as graph leaves.
struct Parameter {
  std::string name;
  int rows = 0, cols = 0;
  Eigen::MatrixXd data;
  Eigen::MatrixXd grad;

  Parameter() = default;
  Parameter(std::string n, int r, int c)
      : name(std::move(n)), rows(r), cols(c),
        data(Eigen::MatrixXd::Zero(r, c)), grad(Eigen::MatrixXd::Zero(r, c)) {}
  void zero_grad() { grad.setZero(); }
  long size() const { return data.size(); }
};

class Tape;

/// Lightweight handle to a tape node. All tensors are 2-D matrices; vectors
/// are n x 1 columns and edge tensors are (n*n) x c with pair (u,v) stored
/// at row u*n + v.
struct Tensor {
  Tape* tape = nullptr;
  int id = -1;
  int rows = 0, cols = 0;
  const Eigen::MatrixXd& value() const;
  const Eigen::MatrixXd& grad() const;
  double scalar() const { return value()(0, 0); }
};

/// Reverse-mode autodiff tape. One tape per forward/backward pass.
class Tape {
 public:
  Tensor leaf(Parameter& p);
  Tensor constant(const Eigen::MatrixXd& v);

  Tensor add(Tensor a, Tensor b);
  Tensor sub(Tensor a, Tensor b);
  Tensor mul(Tensor a, Tensor b);           // elementwise
  Tensor add_scalar_t(Tensor a, Tensor s);  // a + s, s is 1x1
  Tensor mul_scalar_t(Tensor a, Tensor s);  // a * s, s is 1x1
  Tensor scale(Tensor a, double c);
  Tensor add_const(Tensor a, const Eigen::MatrixXd& c);
  Tensor matmul(Tensor a, Tensor b);
  Tensor transpose(Tensor a);
  Tensor add_row_broadcast(Tensor x, Tensor b);  // b is 1 x cols
  Tensor scale_rows(Tensor x, Tensor c);         // c is rows x 1

  Tensor sigmoid(Tensor a);
  Tensor exp_(Tensor a);
  Tensor log_(Tensor a);
  Tensor square(Tensor a);
  Tensor prelu(Tensor a, Tensor slope);  // slope is 1x1
  Tensor clip(Tensor a, double lo, double hi);
  Tensor softmax_rows(Tensor a);
  Tensor layer_norm_rows(Tensor x, Tensor gain, Tensor bias);  // gain/bias 1 x cols

  Tensor sum_all(Tensor a);                       // 1x1
  Tensor col_sums(Tensor a);                      // 1 x cols
  Tensor row_sums(Tensor a);                      // rows x 1
  Tensor reshape(Tensor a, int r, int c);
  Tensor concat_cols(const std::vector<Tensor>& xs);
  Tensor concat_rows(const std::vector<Tensor>& xs);
  Tensor slice_cols(Tensor a, int c0, int count);
  Tensor slice_rows(Tensor a, int r0, int count);
  Tensor select_rows(Tensor a, const std::vector<int>& idx);
  Tensor col_as_square(Tensor a, int col, int n);      // (n*n) x c -> n x n
  Tensor squares_to_cols(const std::vector<Tensor>& mats);  // k of n x n -> (n*n) x k
  Tensor symmetrize_pairs(Tensor a, int n);  // (T + T^t)/2 over node axes

  Tensor conv1d_same(Tensor x, Tensor w, Tensor b, int k);  // x: Cin x n, w: Cout x (Cin*k)
  Tensor conv2d_same(Tensor x, Tensor w, Tensor b, int H, int W, int k);  // x: Cin x (H*W)
  Tensor upsample1d_nearest(Tensor x);
  Tensor upsample2d_nearest(Tensor x, int H, int W);

  Tensor detach(Tensor a);
  /// Straight-through quantization: value is the chosen prototype, gradient
  /// passes to z unchanged.
  Tensor quantize_st(Tensor z, const Eigen::MatrixXd& prototype);

  /// Masked binary cross-entropy sum with prediction clamp at [eps, 1-eps].
  Tensor bce_sum(Tensor pred, const Eigen::MatrixXd& target,
                 const Eigen::MatrixXd& mask, double eps = 1e-7);

  /// -log(mean(exp(-L_i))) over 1x1 losses (log-mean-exp reduction).
  Tensor log_mean_exp_neg(const std::vector<Tensor>& losses);
  Tensor hard_min(const std::vector<Tensor>& losses);

  void backward(Tensor loss);
  size_t node_count() const { return nodes_.size(); }

 private:
  friend struct Tensor;
  struct Node {
    Eigen::MatrixXd val;
    Eigen::MatrixXd grad;
    std::function<void()> back;  // empty for leaves/constants
    Parameter* param = nullptr;
  };
  std::vector<Node> nodes_;

  Tensor make(Eigen::MatrixXd v);
  Node& node(Tensor t) { return nodes_[t.id]; }
  Eigen::MatrixXd& g(Tensor t) { return nodes_[t.id].grad; }
  const Eigen::MatrixXd& v(Tensor t) const { return nodes_[t.id].val; }
};

}  // namespace sevgae
