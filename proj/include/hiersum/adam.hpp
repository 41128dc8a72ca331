#pragma once

#include <vector>

#include "hiersum/tensor.hpp"

namespace hiersum {

// First/second moment buffers for a fixed parameter list, in list order.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long t = 0;

  static AdamState init(const std::vector<Tensor>& params);
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled, applied as p -= lr * wd * p
};

// Standard Adam with bias correction. Parameters with no populated gradient
// are treated as zero-gradient. Increments state.t.
void adam_step(std::vector<Tensor>& params, AdamState& state,
               const AdamConfig& cfg);

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
double clip_grad_norm(std::vector<Tensor>& params, double max_norm);

}  // namespace hiersum
