#include "hiersum/ops.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <string>

#include "hiersum/kernels.hpp"

namespace hiersum::ops {

namespace {

std::string shape_str(const Tensor& t) {
  return "[" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "]";
}

void check_bcast(const char* op, const Tensor& a, const Tensor& b) {
  bool rows_ok = a.rows() == b.rows() || a.rows() == 1 || b.rows() == 1;
  bool cols_ok = a.cols() == b.cols() || a.cols() == 1 || b.cols() == 1;
  if (!rows_ok || !cols_ok)
    throw ShapeMismatch(std::string(op) + ": shapes " + shape_str(a) + " and " +
                        shape_str(b) + " do not broadcast");
}

Tensor unary(kern::Unary op, double p, const Tensor& a) {
  std::vector<double> out(a.size());
  kern::map_unary(op, p, a.size(), a.val().data(), out.data());
  return make_op(a.rows(), a.cols(), std::move(out), {a},
                 [op, p](TensorNode& self) {
                   TensorNode* x = self.parents[0].node();
                   if (!x->requires_grad) return;
                   ensure_grad(*x);
                   kern::map_unary_grad(op, p, self.val.size(), x->val.data(),
                                        self.val.data(), self.grad.data(),
                                        x->grad.data(), true);
                 });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw ShapeMismatch("matmul: " + shape_str(a) + " * " + shape_str(b));
  const size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n);
  kern::gemm_nn(m, k, n, a.val().data(), b.val().data(), out.data(), false);
  return make_op(m, n, std::move(out), {a, b}, [m, k, n](TensorNode& self) {
    TensorNode* a = self.parents[0].node();
    TensorNode* b = self.parents[1].node();
    if (a->requires_grad) {
      ensure_grad(*a);
      kern::gemm_nt(m, n, k, self.grad.data(), b->val.data(), a->grad.data(),
                    true);
    }
    if (b->requires_grad) {
      ensure_grad(*b);
      kern::gemm_tn(k, m, n, a->val.data(), self.grad.data(), b->grad.data(),
                    true);
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_bcast("add", a, b);
  const size_t rows = std::max(a.rows(), b.rows());
  const size_t cols = std::max(a.cols(), b.cols());
  std::vector<double> out(rows * cols);
  kern::bcast_add(rows, cols, a.rows(), a.cols(), a.val().data(), b.rows(),
                  b.cols(), b.val().data(), out.data());
  return make_op(rows, cols, std::move(out), {a, b}, [](TensorNode& self) {
    for (const Tensor& p : self.parents) {
      TensorNode* x = p.node();
      if (!x->requires_grad) continue;
      ensure_grad(*x);
      kern::reduce_to(self.rows, self.cols, self.grad.data(), x->rows, x->cols,
                      x->grad.data(), true);
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_bcast("mul", a, b);
  const size_t rows = std::max(a.rows(), b.rows());
  const size_t cols = std::max(a.cols(), b.cols());
  std::vector<double> out(rows * cols);
  kern::bcast_mul(rows, cols, a.rows(), a.cols(), a.val().data(), b.rows(),
                  b.cols(), b.val().data(), out.data());
  return make_op(rows, cols, std::move(out), {a, b}, [](TensorNode& self) {
    TensorNode* a = self.parents[0].node();
    TensorNode* b = self.parents[1].node();
    std::vector<double> tmp(self.val.size());
    if (a->requires_grad) {
      ensure_grad(*a);
      kern::bcast_mul(self.rows, self.cols, self.rows, self.cols,
                      self.grad.data(), b->rows, b->cols, b->val.data(),
                      tmp.data());
      kern::reduce_to(self.rows, self.cols, tmp.data(), a->rows, a->cols,
                      a->grad.data(), true);
    }
    if (b->requires_grad) {
      ensure_grad(*b);
      kern::bcast_mul(self.rows, self.cols, self.rows, self.cols,
                      self.grad.data(), a->rows, a->cols, a->val.data(),
                      tmp.data());
      kern::reduce_to(self.rows, self.cols, tmp.data(), b->rows, b->cols,
                      b->grad.data(), true);
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> out(a.size());
  kern::axpy(a.size(), c, a.val().data(), out.data(), false);
  return make_op(a.rows(), a.cols(), std::move(out), {a},
                 [c](TensorNode& self) {
                   TensorNode* x = self.parents[0].node();
                   if (!x->requires_grad) return;
                   ensure_grad(*x);
                   kern::axpy(self.val.size(), c, self.grad.data(),
                              x->grad.data(), true);
                 });
}

Tensor transpose(const Tensor& a) {
  const size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) out[j * r + i] = a.val()[i * c + j];
  return make_op(c, r, std::move(out), {a}, [r, c](TensorNode& self) {
    TensorNode* x = self.parents[0].node();
    if (!x->requires_grad) return;
    ensure_grad(*x);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j)
        x->grad[i * c + j] += self.grad[j * r + i];
  });
}

Tensor reshape(const Tensor& a, size_t rows, size_t cols) {
  if (rows * cols != a.size())
    throw ShapeMismatch("reshape: cannot view " + shape_str(a) + " as [" +
                        std::to_string(rows) + "x" + std::to_string(cols) +
                        "]");
  std::vector<double> out = a.val();
  return make_op(rows, cols, std::move(out), {a}, [](TensorNode& self) {
    TensorNode* x = self.parents[0].node();
    if (!x->requires_grad) return;
    ensure_grad(*x);
    kern::axpy(self.val.size(), 1.0, self.grad.data(), x->grad.data(), true);
  });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows())
    throw ShapeMismatch("concat_cols: " + shape_str(a) + " vs " + shape_str(b));
  const size_t r = a.rows(), ca = a.cols(), cb = b.cols();
  std::vector<double> out(r * (ca + cb));
  for (size_t i = 0; i < r; ++i) {
    std::memcpy(out.data() + i * (ca + cb), a.val().data() + i * ca,
                ca * sizeof(double));
    std::memcpy(out.data() + i * (ca + cb) + ca, b.val().data() + i * cb,
                cb * sizeof(double));
  }
  return make_op(r, ca + cb, std::move(out), {a, b},
                 [r, ca, cb](TensorNode& self) {
                   TensorNode* a = self.parents[0].node();
                   TensorNode* b = self.parents[1].node();
                   const size_t c = ca + cb;
                   if (a->requires_grad) {
                     ensure_grad(*a);
                     for (size_t i = 0; i < r; ++i)
                       for (size_t j = 0; j < ca; ++j)
                         a->grad[i * ca + j] += self.grad[i * c + j];
                   }
                   if (b->requires_grad) {
                     ensure_grad(*b);
                     for (size_t i = 0; i < r; ++i)
                       for (size_t j = 0; j < cb; ++j)
                         b->grad[i * cb + j] += self.grad[i * c + ca + j];
                   }
                 });
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols())
    throw ShapeMismatch("concat_rows: " + shape_str(a) + " vs " + shape_str(b));
  const size_t c = a.cols(), ra = a.rows(), rb = b.rows();
  std::vector<double> out;
  out.reserve((ra + rb) * c);
  out.insert(out.end(), a.val().begin(), a.val().end());
  out.insert(out.end(), b.val().begin(), b.val().end());
  return make_op(ra + rb, c, std::move(out), {a, b},
                 [ra, rb, c](TensorNode& self) {
                   TensorNode* a = self.parents[0].node();
                   TensorNode* b = self.parents[1].node();
                   if (a->requires_grad) {
                     ensure_grad(*a);
                     kern::axpy(ra * c, 1.0, self.grad.data(), a->grad.data(),
                                true);
                   }
                   if (b->requires_grad) {
                     ensure_grad(*b);
                     kern::axpy(rb * c, 1.0, self.grad.data() + ra * c,
                                b->grad.data(), true);
                   }
                 });
}

Tensor select_rows(const Tensor& a, std::vector<size_t> idx) {
  const size_t c = a.cols();
  for (size_t i : idx)
    if (i >= a.rows())
      throw ShapeMismatch("select_rows: index " + std::to_string(i) +
                          " out of range for " + shape_str(a));
  std::vector<double> out(idx.size() * c);
  for (size_t i = 0; i < idx.size(); ++i)
    std::memcpy(out.data() + i * c, a.val().data() + idx[i] * c,
                c * sizeof(double));
  auto shared_idx = std::make_shared<std::vector<size_t>>(std::move(idx));
  return make_op(shared_idx->size(), c, std::move(out), {a},
                 [shared_idx, c](TensorNode& self) {
                   TensorNode* x = self.parents[0].node();
                   if (!x->requires_grad) return;
                   ensure_grad(*x);
                   // Serial scatter: duplicate indices must accumulate.
                   const auto& idx = *shared_idx;
                   for (size_t i = 0; i < idx.size(); ++i)
                     for (size_t j = 0; j < c; ++j)
                       x->grad[idx[i] * c + j] += self.grad[i * c + j];
                 });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  return unary(kern::Unary::LeakyRelu, slope, a);
}

Tensor elu(const Tensor& a) { return unary(kern::Unary::Elu, 0.0, a); }

Tensor sigmoid(const Tensor& a) { return unary(kern::Unary::Sigmoid, 0.0, a); }

Tensor exp(const Tensor& a) { return unary(kern::Unary::Exp, 0.0, a); }

Tensor log(const Tensor& a) {
  for (double v : a.val())
    if (v <= 0.0) throw DomainError("log: non-positive input");
  return unary(kern::Unary::Log, 0.0, a);
}

Tensor row_softmax_masked(const Tensor& scores, const Mask& mask) {
  if (mask.rows != scores.rows() || mask.cols != scores.cols())
    throw ShapeMismatch("row_softmax_masked: mask shape mismatch");
  for (size_t i = 0; i < mask.rows; ++i) {
    bool any = false;
    for (size_t j = 0; j < mask.cols && !any; ++j) any = mask.at(i, j) != 0;
    if (!any)
      throw EmptyMaskRow("row_softmax_masked: row " + std::to_string(i) +
                         " has no allowed entries");
  }
  std::vector<double> out(scores.size());
  kern::softmax_masked_rows(scores.rows(), scores.cols(), scores.val().data(),
                            mask.allowed.data(), out.data());
  auto m = std::make_shared<Mask>(mask);
  return make_op(scores.rows(), scores.cols(), std::move(out), {scores},
                 [m](TensorNode& self) {
                   TensorNode* x = self.parents[0].node();
                   if (!x->requires_grad) return;
                   ensure_grad(*x);
                   kern::softmax_masked_backward(
                       self.rows, self.cols, self.val.data(),
                       m->allowed.data(), self.grad.data(), x->grad.data(),
                       true);
                 });
}

Tensor sum(const Tensor& a) {
  double s = kern::reduce_sum(a.size(), a.val().data());
  return make_op(1, 1, {s}, {a}, [](TensorNode& self) {
    TensorNode* x = self.parents[0].node();
    if (!x->requires_grad) return;
    ensure_grad(*x);
    const double g = self.grad[0];
    for (double& v : x->grad) v += g;
  });
}

Tensor mean_rows(const Tensor& a) {
  const size_t r = a.rows(), c = a.cols();
  std::vector<double> out(c, 0.0);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) out[j] += a.val()[i * c + j];
  const double inv = 1.0 / static_cast<double>(r);
  for (double& v : out) v *= inv;
  return make_op(1, c, std::move(out), {a}, [r, c, inv](TensorNode& self) {
    TensorNode* x = self.parents[0].node();
    if (!x->requires_grad) return;
    ensure_grad(*x);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j) x->grad[i * c + j] += inv * self.grad[j];
  });
}

Tensor cosine_rows(const Tensor& h, const Tensor& u) {
  if (u.rows() != 1 || u.cols() != h.cols())
    throw ShapeMismatch("cosine_rows: " + shape_str(h) + " vs " + shape_str(u));
  const size_t n = h.rows(), d = h.cols();
  constexpr double kEps = 1e-30;
  std::vector<double> out(n, 0.0);
  double unorm2 = 0.0;
  for (size_t j = 0; j < d; ++j) unorm2 += u.val()[j] * u.val()[j];
  const double unorm = std::sqrt(unorm2);
  for (size_t i = 0; i < n; ++i) {
    double dot = 0.0, hn2 = 0.0;
    for (size_t j = 0; j < d; ++j) {
      dot += h.val()[i * d + j] * u.val()[j];
      hn2 += h.val()[i * d + j] * h.val()[i * d + j];
    }
    double hn = std::sqrt(hn2);
    out[i] = (hn > kEps && unorm > kEps) ? dot / (hn * unorm) : 0.0;
  }
  return make_op(n, 1, std::move(out), {h, u}, [n, d](TensorNode& self) {
    TensorNode* hN = self.parents[0].node();
    TensorNode* uN = self.parents[1].node();
    if (!hN->requires_grad && !uN->requires_grad) return;
    if (hN->requires_grad) ensure_grad(*hN);
    if (uN->requires_grad) ensure_grad(*uN);
    constexpr double kEps = 1e-30;
    double unorm2 = 0.0;
    for (size_t j = 0; j < d; ++j) unorm2 += uN->val[j] * uN->val[j];
    const double unorm = std::sqrt(unorm2);
    if (unorm <= kEps) return;
    for (size_t i = 0; i < n; ++i) {
      const double g = self.grad[i];
      if (g == 0.0) continue;
      const double* hi = hN->val.data() + i * d;
      double dot = 0.0, hn2 = 0.0;
      for (size_t j = 0; j < d; ++j) {
        dot += hi[j] * uN->val[j];
        hn2 += hi[j] * hi[j];
      }
      const double hn = std::sqrt(hn2);
      if (hn <= kEps) continue;
      const double ci = dot / (hn * unorm);
      const double inv = 1.0 / (hn * unorm);
      if (hN->requires_grad) {
        double* gh = hN->grad.data() + i * d;
        for (size_t j = 0; j < d; ++j)
          gh[j] += g * (uN->val[j] * inv - ci * hi[j] / hn2);
      }
      if (uN->requires_grad) {
        for (size_t j = 0; j < d; ++j)
          uN->grad[j] += g * (hi[j] * inv - ci * uN->val[j] / unorm2);
      }
    }
  });
}

Tensor cosine_sim(const Tensor& u, const Tensor& v) {
  if (u.size() != v.size())
    throw ShapeMismatch("cosine_sim: " + shape_str(u) + " vs " + shape_str(v));
  return cosine_rows(reshape(u, 1, u.size()), reshape(v, 1, v.size()));
}

Tensor dropout(const Tensor& a, double rate, bool train, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw LogicError("dropout: rate must be in [0, 1)");
  if (!train || rate == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - rate);
  auto m = std::make_shared<std::vector<double>>(a.size());
  for (double& v : *m) v = rng.next_double() >= rate ? keep_scale : 0.0;
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a.val()[i] * (*m)[i];
  return make_op(a.rows(), a.cols(), std::move(out), {a},
                 [m](TensorNode& self) {
                   TensorNode* x = self.parents[0].node();
                   if (!x->requires_grad) return;
                   ensure_grad(*x);
                   for (size_t i = 0; i < self.val.size(); ++i)
                     x->grad[i] += self.grad[i] * (*m)[i];
                 });
}

}  // namespace hiersum::ops
