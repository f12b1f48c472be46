#include "sevgae/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sevgae {

void Adam::init(const std::vector<Parameter*>& params) {
  step_count = 0;
  m.clear();
  v.clear();
  m.reserve(params.size());
  v.reserve(params.size());
  for (auto* p : params) {
    m.push_back(Eigen::MatrixXd::Zero(p->rows, p->cols));
    v.push_back(Eigen::MatrixXd::Zero(p->rows, p->cols));
  }
}

void Adam::step(const std::vector<Parameter*>& params) {
  if (m.size() != params.size())
    throw std::logic_error("adam: state/parameter count mismatch");
  ++step_count;
  double bc1 = 1.0 - std::pow(beta1, double(step_count));
  double bc2 = 1.0 - std::pow(beta2, double(step_count));
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * p.grad;
    v[i] = beta2 * v[i] + (1.0 - beta2) * p.grad.cwiseProduct(p.grad);
    Eigen::MatrixXd mh = m[i] / bc1;
    Eigen::MatrixXd vh = v[i] / bc2;
    p.data.array() -= lr * mh.array() / (vh.array().sqrt() + eps);
  }
}

namespace {

constexpr char kMagic[8] = {'S', 'E', 'V', 'G', 'A', 'E', 'C', 'K'};

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_i64(std::ostream& os, std::int64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_string(std::ostream& os, const std::string& s) {
  write_i64(os, std::int64_t(s.size()));
  os.write(s.data(), std::streamsize(s.size()));
}
void write_matrix(std::ostream& os, const Eigen::MatrixXd& a) {
  write_i64(os, a.rows());
  write_i64(os, a.cols());
  os.write(reinterpret_cast<const char*>(a.data()),
           std::streamsize(sizeof(double) * size_t(a.size())));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::int64_t read_i64(std::istream& is) {
  std::int64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::string read_string(std::istream& is) {
  auto len = read_i64(is);
  if (len < 0) throw std::runtime_error("checkpoint: negative string length");
  std::string s(size_t(len), '\0');
  is.read(s.data(), len);
  return s;
}
Eigen::MatrixXd read_matrix(std::istream& is) {
  auto r = read_i64(is);
  auto c = read_i64(is);
  Eigen::MatrixXd a(r, c);
  is.read(reinterpret_cast<char*>(a.data()),
          std::streamsize(sizeof(double) * size_t(a.size())));
  return a;
}

void read_header(std::istream& is, Checkpoint& ck) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  ck.version = read_u32(is);
  if (ck.version != 1)
    throw std::runtime_error("checkpoint: unsupported version");
  ck.config = model_config_from_kv(read_string(is));
  ck.epoch = int(read_i64(is));
  ck.global_step = read_i64(is);
  ck.model_rng_state = read_string(is);
  ck.data_rng_state = read_string(is);
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& meta,
                     const std::vector<Parameter*>& params, const Adam& opt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot write " + path);
  os.write(kMagic, 8);
  write_u32(os, meta.version);
  write_string(os, to_kv(meta.config));
  write_i64(os, meta.epoch);
  write_i64(os, meta.global_step);
  write_string(os, meta.model_rng_state);
  write_string(os, meta.data_rng_state);

  write_i64(os, std::int64_t(params.size()));
  for (auto* p : params) {
    write_string(os, p->name);
    write_matrix(os, p->data);
  }
  write_i64(os, opt.step_count);
  write_i64(os, std::int64_t(opt.m.size()));
  for (const auto& a : opt.m) write_matrix(os, a);
  for (const auto& a : opt.v) write_matrix(os, a);
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path,
                           const std::vector<Parameter*>& params, Adam& opt) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot read " + path);
  Checkpoint ck;
  read_header(is, ck);

  auto count = read_i64(is);
  if (count != std::int64_t(params.size()))
    throw std::runtime_error("checkpoint: parameter count mismatch");
  for (auto* p : params) {
    std::string name = read_string(is);
    if (name != p->name)
      throw std::runtime_error("checkpoint: parameter order mismatch at " +
                               name + " vs " + p->name);
    Eigen::MatrixXd a = read_matrix(is);
    if (a.rows() != p->rows || a.cols() != p->cols)
      throw std::runtime_error("checkpoint: shape mismatch at " + name);
    p->data = std::move(a);
    p->grad.setZero();
  }
  opt.step_count = read_i64(is);
  auto slots = read_i64(is);
  if (slots != std::int64_t(params.size()))
    throw std::runtime_error("checkpoint: optimizer state mismatch");
  opt.m.clear();
  opt.v.clear();
  for (std::int64_t i = 0; i < slots; ++i) opt.m.push_back(read_matrix(is));
  for (std::int64_t i = 0; i < slots; ++i) opt.v.push_back(read_matrix(is));
  if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
  return ck;
}

ModelConfig peek_checkpoint_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot read " + path);
  Checkpoint ck;
  read_header(is, ck);
  return ck.config;
}

}  // namespace sevgae
