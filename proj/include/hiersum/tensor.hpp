#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "hiersum/errors.hpp"

namespace hiersum {

class Tensor;

// One node of the reverse-mode computation graph. Values are row-major
// doubles. `parents` + `backfn` exist only on op results that participate in
// differentiation; leaves and no-grad results carry neither, so evaluation
// under NoGradGuard builds no graph at all.
struct TensorNode {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> val;
  std::vector<double> grad;  // allocated lazily by backward()
  bool requires_grad = false;
  std::vector<Tensor> parents;
  std::function<void(TensorNode&)> backfn;
};

// Value-semantic handle to a shared node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(size_t rows, size_t cols, bool requires_grad = false);
  static Tensor full(size_t rows, size_t cols, double v,
                     bool requires_grad = false);
  static Tensor from(size_t rows, size_t cols, std::vector<double> v,
                     bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  size_t rows() const { return node_->rows; }
  size_t cols() const { return node_->cols; }
  size_t size() const { return node_->val.size(); }

  double at(size_t r, size_t c) const { return node_->val[r * cols() + c]; }
  double item() const;  // scalar value; throws NonScalarLoss otherwise

  const std::vector<double>& val() const { return node_->val; }
  std::vector<double>& val_mut() { return node_->val; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  const std::vector<double>& grad() const;
  void zero_grad();

  TensorNode* node() const { return node_.get(); }
  std::shared_ptr<TensorNode> shared_node() const { return node_; }

  explicit Tensor(std::shared_ptr<TensorNode> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<TensorNode> node_;
};

// Runs reverse-mode accumulation from a scalar loss. Gradients of interior
// nodes are reset at the start of each call; gradients of leaves (parameters
// and inputs) accumulate across calls, so fan-out sums and multi-loss
// accumulation behave as expected. Callers zero_grad() parameters between
// optimizer steps. The graph itself stays alive as long as tensor handles
// reference it and may be re-run.
void backward(const Tensor& loss);

bool grad_enabled();

// Scoped switch that disables graph construction (inference / finite
// differences). Thread-local, so parallel no-grad evaluation is safe.
struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

// Builds an op node: result requires grad iff grads are enabled and some
// parent requires grad; otherwise parents/backfn are dropped.
Tensor make_op(size_t rows, size_t cols, std::vector<double> val,
               std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backfn);

// Allocates (zeroed) the node's grad buffer if absent.
void ensure_grad(TensorNode& n);

}  // namespace hiersum
