#include "sevgae/nn.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace sevgae {

std::string Rng::state() const {
  std::ostringstream os;
  std::uint64_t bits = 0;
  static_assert(sizeof bits == sizeof spare_);
  std::memcpy(&bits, &spare_, sizeof bits);
  os << eng_ << " " << (have_spare_ ? 1 : 0) << " " << bits;
  return os.str();
}

void Rng::set_state(const std::string& s) {
  std::istringstream is(s);
  int spare_flag = 0;
  std::uint64_t bits = 0;
  is >> eng_ >> spare_flag >> bits;
  have_spare_ = spare_flag != 0;
  std::memcpy(&spare_, &bits, sizeof bits);
}

void Module::init_normal(Rng& rng, double std) {
  for (Parameter* p : parameters()) {
    if (p->name.ends_with(".b") || p->name.ends_with(".bias")) continue;
    if (p->name.ends_with(".gain") || p->name.ends_with(".slope")) continue;
    for (long i = 0; i < p->data.size(); ++i)
      p->data.data()[i] = std * rng.normal();
  }
}

double clip_gradients(const std::vector<Parameter*>& params, double max_norm) {
  double sq = 0.0;
  for (Parameter* p : params) sq += p->grad.squaredNorm();
  double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    double s = max_norm / norm;
    for (Parameter* p : params) p->grad *= s;
  }
  return norm;
}

}  // namespace sevgae
