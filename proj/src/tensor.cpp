#include "hiersum/tensor.hpp"

#include <algorithm>
#include <unordered_set>

namespace hiersum {

namespace {
thread_local int g_no_grad_depth = 0;
}

bool grad_enabled() { return g_no_grad_depth == 0; }

NoGradGuard::NoGradGuard() { ++g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --g_no_grad_depth; }

Tensor Tensor::zeros(size_t rows, size_t cols, bool requires_grad) {
  return from(rows, cols, std::vector<double>(rows * cols, 0.0), requires_grad);
}

Tensor Tensor::full(size_t rows, size_t cols, double v, bool requires_grad) {
  return from(rows, cols, std::vector<double>(rows * cols, v), requires_grad);
}

Tensor Tensor::from(size_t rows, size_t cols, std::vector<double> v,
                    bool requires_grad) {
  if (v.size() != rows * cols)
    throw ShapeMismatch("tensor data size does not match shape");
  auto n = std::make_shared<TensorNode>();
  n->rows = rows;
  n->cols = cols;
  n->val = std::move(v);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::scalar(double v) { return from(1, 1, {v}); }

double Tensor::item() const {
  if (size() != 1) throw NonScalarLoss("item() on non-scalar tensor");
  return node_->val[0];
}

const std::vector<double>& Tensor::grad() const {
  if (node_->grad.empty())
    throw LogicError("gradient not populated; call backward() first");
  return node_->grad;
}

void Tensor::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void ensure_grad(TensorNode& n) {
  if (n.grad.empty()) n.grad.assign(n.val.size(), 0.0);
}

Tensor make_op(size_t rows, size_t cols, std::vector<double> val,
               std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backfn) {
  bool track = grad_enabled() &&
               std::any_of(parents.begin(), parents.end(),
                           [](const Tensor& p) { return p.requires_grad(); });
  auto n = std::make_shared<TensorNode>();
  n->rows = rows;
  n->cols = cols;
  n->val = std::move(val);
  if (track) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backfn = std::move(backfn);
  }
  return Tensor(n);
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1)
    throw NonScalarLoss("backward() requires a scalar loss");

  // Iterative post-order DFS over parents gives a topological order with
  // every node after all of its consumers once reversed.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  std::vector<std::pair<TensorNode*, size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  seen.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode* p = node->parents[next++].node();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior grads are scratch space for this pass; leaf grads accumulate.
  for (TensorNode* n : order) {
    if (n->backfn) {
      n->grad.assign(n->val.size(), 0.0);
    } else {
      ensure_grad(*n);
    }
  }
  loss.node()->grad[0] = 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* n = *it;
    if (n->backfn) n->backfn(*n);
  }
}

}  // namespace hiersum
