#include "hiersum/adam.hpp"

#include <cmath>

namespace hiersum {

AdamState AdamState::init(const std::vector<Tensor>& params) {
  AdamState st;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const Tensor& p : params) {
    st.m.emplace_back(p.size(), 0.0);
    st.v.emplace_back(p.size(), 0.0);
  }
  return st;
}

void adam_step(std::vector<Tensor>& params, AdamState& state,
               const AdamConfig& cfg) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw ShapeMismatch("adam_step: state does not match parameter list");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& par = params[p];
    if (state.m[p].size() != par.size())
      throw ShapeMismatch("adam_step: moment shape does not match parameter");
    auto& val = par.val_mut();
    auto& m = state.m[p];
    auto& v = state.v[p];
    const bool has_grad = par.has_grad();
    for (size_t i = 0; i < val.size(); ++i) {
      const double g = has_grad ? par.node()->grad[i] : 0.0;
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      val[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
      if (cfg.weight_decay != 0.0) val[i] -= cfg.lr * cfg.weight_decay * val[i];
    }
  }
}

double clip_grad_norm(std::vector<Tensor>& params, double max_norm) {
  double sq = 0.0;
  for (Tensor& p : params) {
    if (!p.has_grad()) continue;
    for (double g : p.node()->grad) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (Tensor& p : params) {
      if (!p.has_grad()) continue;
      for (double& g : p.node()->grad) g *= s;
    }
  }
  return norm;
}

}  // namespace hiersum
