#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sevgae/tape.hpp"

namespace sevgae {

/// Deterministic RNG helpers. Box-Muller on top of mt19937_64 so the byte
/// stream does not depend on the standard library's distribution details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
  std::uint64_t next_u64() { return eng_(); }
  std::mt19937_64& engine() { return eng_; }

  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Base for parameterized blocks: children register parameters so the
/// trainer and checkpointer see one flat, stably-ordered list.
struct Module {
  virtual ~Module() = default;
  virtual void collect(std::vector<Parameter*>& out) = 0;
  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out;
    collect(out);
    return out;
  }
  void init_normal(Rng& rng, double std = 0.02);
};

struct Linear : Module {
  Parameter W, b;
  Linear() = default;
  Linear(const std::string& name, int in, int out)
      : W(name + ".W", in, out), b(name + ".b", 1, out) {}
  Tensor operator()(Tape& t, Tensor x) {
    return t.add_row_broadcast(t.matmul(x, t.leaf(W)), t.leaf(b));
  }
  void collect(std::vector<Parameter*>& out) override {
    out.push_back(&W);
    out.push_back(&b);
  }
};

struct PRelu : Module {
  Parameter slope;
  PRelu() = default;
  explicit PRelu(const std::string& name) : slope(name + ".slope", 1, 1) {
    slope.data(0, 0) = 0.25;
  }
  Tensor operator()(Tape& t, Tensor x) { return t.prelu(x, t.leaf(slope)); }
  void collect(std::vector<Parameter*>& out) override { out.push_back(&slope); }
};

struct LayerNorm : Module {
  Parameter gain, bias;
  LayerNorm() = default;
  LayerNorm(const std::string& name, int dim)
      : gain(name + ".gain", 1, dim), bias(name + ".bias", 1, dim) {
    gain.data.setOnes();
  }
  Tensor operator()(Tape& t, Tensor x) {
    return t.layer_norm_rows(x, t.leaf(gain), t.leaf(bias));
  }
  void collect(std::vector<Parameter*>& out) override {
    out.push_back(&gain);
    out.push_back(&bias);
  }
};

/// Linear -> PReLU -> LayerNorm, the recurring head block.
struct LinPrLn : Module {
  Linear lin;
  PRelu act;
  LayerNorm ln;
  LinPrLn() = default;
  LinPrLn(const std::string& name, int in, int out)
      : lin(name + ".lin", in, out), act(name + ".act"), ln(name + ".ln", out) {}
  Tensor operator()(Tape& t, Tensor x) { return ln(t, act(t, lin(t, x))); }
  void collect(std::vector<Parameter*>& out) override {
    lin.collect(out);
    act.collect(out);
    ln.collect(out);
  }
};

/// Two-layer feed-forward block with expansion.
struct Ffn : Module {
  Linear up, down;
  PRelu act;
  Ffn() = default;
  Ffn(const std::string& name, int dim, int expansion)
      : up(name + ".up", dim, dim * expansion),
        down(name + ".down", dim * expansion, dim),
        act(name + ".act") {}
  Tensor operator()(Tape& t, Tensor x) { return down(t, act(t, up(t, x))); }
  void collect(std::vector<Parameter*>& out) override {
    up.collect(out);
    down.collect(out);
    act.collect(out);
  }
};

/// Global-norm gradient clip; returns the pre-clip norm.
double clip_gradients(const std::vector<Parameter*>& params, double max_norm);

}  // namespace sevgae
