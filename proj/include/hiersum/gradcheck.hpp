#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hiersum/tensor.hpp"

namespace hiersum {

struct GradCheckReport {
  double max_rel_err = 0.0;
  size_t n_coords = 0;
  std::string worst_param;
  size_t worst_coord = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Central-difference check of reverse-mode gradients. `make_loss` must build
// a fresh scalar graph from the current parameter values and be deterministic
// (dropout off). Relative error per coordinate is
// |a - n| / max(1e-8, |a| + |n|).
GradCheckReport grad_check(const std::function<Tensor()>& make_loss,
                           const std::vector<std::pair<std::string, Tensor>>& params,
                           double eps = 1e-6);

}  // namespace hiersum
