#include "hiersum/gradcheck.hpp"

#include <cmath>

namespace hiersum {

GradCheckReport grad_check(
    const std::function<Tensor()>& make_loss,
    const std::vector<std::pair<std::string, Tensor>>& params, double eps) {
  if (eps < 1e-7 || eps > 1e-3)
    throw LogicError("grad_check: eps outside [1e-7, 1e-3]");

  for (auto& [name, p] : params) {
    (void)name;
    TensorNode* n = p.node();
    n->grad.assign(n->val.size(), 0.0);
  }
  Tensor loss = make_loss();
  backward(loss);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& [name, p] : params) {
    (void)name;
    analytic.push_back(p.node()->grad);
  }

  GradCheckReport rep;
  NoGradGuard no_grad;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Tensor p = params[pi].second;
    auto& val = p.val_mut();
    for (size_t i = 0; i < val.size(); ++i) {
      const double orig = val[i];
      val[i] = orig + eps;
      const double f_plus = make_loss().item();
      val[i] = orig - eps;
      const double f_minus = make_loss().item();
      val[i] = orig;
      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double a = analytic[pi][i];
      const double rel =
          std::fabs(a - numeric) /
          std::max(1e-8, std::fabs(a) + std::fabs(numeric));
      ++rep.n_coords;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = params[pi].first;
        rep.worst_coord = i;
        rep.worst_analytic = a;
        rep.worst_numeric = numeric;
      }
    }
  }
  return rep;
}

}  // namespace hiersum
