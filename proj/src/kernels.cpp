#include "hiersum/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hiersum::kern {

namespace {

std::atomic<Mode> g_mode{Mode::Serial};
std::atomic<bool> g_mode_set{false};

// Below this many scalar ops the parallel variants stay on one thread; the
// fork/join overhead dwarfs the work at desk-scale sizes.
constexpr size_t kGrain = 1 << 14;

inline double unary_eval(Unary op, double p, double x) {
  switch (op) {
    case Unary::LeakyRelu:
      return x > 0.0 ? x : p * x;
    case Unary::Elu:
      return x > 0.0 ? x : std::expm1(x);
    case Unary::Sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                      : std::exp(x) / (1.0 + std::exp(x));
    case Unary::Exp:
      return std::exp(x);
    case Unary::Log:
      return std::log(x);
  }
  return 0.0;
}

inline double unary_grad_eval(Unary op, double p, double x, double y) {
  switch (op) {
    case Unary::LeakyRelu:
      return x > 0.0 ? 1.0 : p;
    case Unary::Elu:
      return x > 0.0 ? 1.0 : y + 1.0;
    case Unary::Sigmoid:
      return y * (1.0 - y);
    case Unary::Exp:
      return y;
    case Unary::Log:
      return 1.0 / x;
  }
  return 0.0;
}

inline void softmax_row(size_t cols, const double* s, const uint8_t* m,
                        double* o) {
  double mx = -HUGE_VAL;
  for (size_t j = 0; j < cols; ++j)
    if (m[j] && s[j] > mx) mx = s[j];
  double z = 0.0;
  for (size_t j = 0; j < cols; ++j) {
    if (m[j]) {
      o[j] = std::exp(s[j] - mx);
      z += o[j];
    } else {
      o[j] = 0.0;
    }
  }
  double inv = 1.0 / z;
  for (size_t j = 0; j < cols; ++j)
    if (m[j]) o[j] *= inv;
}

inline void softmax_row_backward(size_t cols, const double* alpha,
                                 const uint8_t* m, const double* da, double* ds,
                                 bool accumulate) {
  double dot = 0.0;
  for (size_t j = 0; j < cols; ++j)
    if (m[j]) dot += da[j] * alpha[j];
  for (size_t j = 0; j < cols; ++j) {
    double g = m[j] ? alpha[j] * (da[j] - dot) : 0.0;
    ds[j] = accumulate ? ds[j] + g : g;
  }
}

// i-k-j ordering: the inner j loop streams B's row k; per output element the
// accumulation order over k matches the naive reference exactly.
inline void gemm_nn_rows(size_t i0, size_t i1, size_t k, size_t n,
                         const double* a, const double* b, double* c,
                         bool accumulate) {
  for (size_t i = i0; i < i1; ++i) {
    double* ci = c + i * n;
    if (!accumulate) std::memset(ci, 0, n * sizeof(double));
    const double* ai = a + i * k;
    for (size_t kk = 0; kk < k; ++kk) {
      double aik = ai[kk];
      const double* bk = b + kk * n;
      for (size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
}

inline void gemm_nt_rows(size_t i0, size_t i1, size_t k, size_t n,
                         const double* a, const double* b, double* c,
                         bool accumulate) {
  for (size_t i = i0; i < i1; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (size_t kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
      ci[j] = accumulate ? ci[j] + acc : acc;
    }
  }
}

inline void gemm_tn_rows(size_t i0, size_t i1, size_t m, size_t k, size_t n,
                         const double* a, const double* b, double* c,
                         bool accumulate) {
  (void)m;
  for (size_t i = i0; i < i1; ++i) {
    double* ci = c + i * n;
    if (!accumulate) std::memset(ci, 0, n * sizeof(double));
    for (size_t kk = 0; kk < k; ++kk) {
      double aki = a[kk * m + i];
      const double* bk = b + kk * n;
      for (size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
    }
  }
}

inline size_t bidx(size_t i, size_t j, size_t r, size_t c) {
  return (r == 1 ? 0 : i) * c + (c == 1 ? 0 : j);
}

}  // namespace

Mode default_mode() {
  if (const char* env = std::getenv("HIERSUM_KERNELS")) {
    std::string v(env);
    if (v == "serial") return Mode::Serial;
    if (v == "parallel") return Mode::Parallel;
  }
#ifdef _OPENMP
  return Mode::Parallel;
#else
  return Mode::Serial;
#endif
}

Mode mode() {
  if (!g_mode_set.load(std::memory_order_relaxed)) {
    g_mode.store(default_mode(), std::memory_order_relaxed);
    g_mode_set.store(true, std::memory_order_relaxed);
  }
  return g_mode.load(std::memory_order_relaxed);
}

void set_mode(Mode m) {
  g_mode.store(m, std::memory_order_relaxed);
  g_mode_set.store(true, std::memory_order_relaxed);
}

// ---- serial reference ----

namespace ref {

void gemm_nn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  gemm_nn_rows(0, m, k, n, a, b, c, accumulate);
}

void gemm_nt(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  gemm_nt_rows(0, m, k, n, a, b, c, accumulate);
}

void gemm_tn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  gemm_tn_rows(0, m, m, k, n, a, b, c, accumulate);
}

void softmax_masked_rows(size_t rows, size_t cols, const double* scores,
                         const uint8_t* mask, double* out) {
  for (size_t i = 0; i < rows; ++i)
    softmax_row(cols, scores + i * cols, mask + i * cols, out + i * cols);
}

void softmax_masked_backward(size_t rows, size_t cols, const double* alpha,
                             const uint8_t* mask, const double* dalpha,
                             double* dscores, bool accumulate) {
  for (size_t i = 0; i < rows; ++i)
    softmax_row_backward(cols, alpha + i * cols, mask + i * cols,
                         dalpha + i * cols, dscores + i * cols, accumulate);
}

void map_unary(Unary op, double p, size_t size, const double* x, double* y) {
  for (size_t i = 0; i < size; ++i) y[i] = unary_eval(op, p, x[i]);
}

void map_unary_grad(Unary op, double p, size_t size, const double* x,
                    const double* y, const double* dy, double* dx,
                    bool accumulate) {
  for (size_t i = 0; i < size; ++i) {
    double g = dy[i] * unary_grad_eval(op, p, x[i], y[i]);
    dx[i] = accumulate ? dx[i] + g : g;
  }
}

void axpy(size_t size, double alpha, const double* x, double* y,
          bool accumulate) {
  if (accumulate)
    for (size_t i = 0; i < size; ++i) y[i] += alpha * x[i];
  else
    for (size_t i = 0; i < size; ++i) y[i] = alpha * x[i];
}

double reduce_sum(size_t size, const double* x) {
  double s = 0.0;
  for (size_t i = 0; i < size; ++i) s += x[i];
  return s;
}

void bcast_add(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out) {
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      out[i * cols + j] = a[bidx(i, j, ra, ca)] + b[bidx(i, j, rb, cb)];
}

void bcast_mul(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out) {
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      out[i * cols + j] = a[bidx(i, j, ra, ca)] * b[bidx(i, j, rb, cb)];
}

void reduce_to(size_t rows, size_t cols, const double* src, size_t rt,
               size_t ct, double* out, bool accumulate) {
  if (!accumulate)
    for (size_t i = 0; i < rt * ct; ++i) out[i] = 0.0;
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      out[bidx(i, j, rt, ct)] += src[i * cols + j];
}

}  // namespace ref

// ---- OpenMP ----

namespace par {

void gemm_nn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  const bool big = m * k * n >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(m); ++i)
    gemm_nn_rows(i, i + 1, k, n, a, b, c, accumulate);
}

void gemm_nt(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  const bool big = m * k * n >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(m); ++i)
    gemm_nt_rows(i, i + 1, k, n, a, b, c, accumulate);
}

void gemm_tn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  const bool big = m * k * n >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(m); ++i)
    gemm_tn_rows(i, i + 1, m, k, n, a, b, c, accumulate);
}

void softmax_masked_rows(size_t rows, size_t cols, const double* scores,
                         const uint8_t* mask, double* out) {
  const bool big = rows * cols >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(rows); ++i)
    softmax_row(cols, scores + i * cols, mask + i * cols, out + i * cols);
}

void softmax_masked_backward(size_t rows, size_t cols, const double* alpha,
                             const uint8_t* mask, const double* dalpha,
                             double* dscores, bool accumulate) {
  const bool big = rows * cols >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(rows); ++i)
    softmax_row_backward(cols, alpha + i * cols, mask + i * cols,
                         dalpha + i * cols, dscores + i * cols, accumulate);
}

void map_unary(Unary op, double p, size_t size, const double* x, double* y) {
  const bool big = size >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(size); ++i)
    y[i] = unary_eval(op, p, x[i]);
}

void map_unary_grad(Unary op, double p, size_t size, const double* x,
                    const double* y, const double* dy, double* dx,
                    bool accumulate) {
  const bool big = size >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(size); ++i) {
    double g = dy[i] * unary_grad_eval(op, p, x[i], y[i]);
    dx[i] = accumulate ? dx[i] + g : g;
  }
}

void axpy(size_t size, double alpha, const double* x, double* y,
          bool accumulate) {
  const bool big = size >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(size); ++i)
    y[i] = accumulate ? y[i] + alpha * x[i] : alpha * x[i];
}

double reduce_sum(size_t size, const double* x) {
  // Chunked pairwise order would break bit-equality with the reference, so
  // the parallel version keeps the serial accumulation order.
  return ref::reduce_sum(size, x);
}

void bcast_add(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out) {
  const bool big = rows * cols >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(rows); ++i)
    for (size_t j = 0; j < cols; ++j)
      out[i * cols + j] = a[bidx(i, j, ra, ca)] + b[bidx(i, j, rb, cb)];
}

void bcast_mul(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out) {
  const bool big = rows * cols >= kGrain;
#pragma omp parallel for schedule(static) if (big)
  for (long i = 0; i < static_cast<long>(rows); ++i)
    for (size_t j = 0; j < cols; ++j)
      out[i * cols + j] = a[bidx(i, j, ra, ca)] * b[bidx(i, j, rb, cb)];
}

void reduce_to(size_t rows, size_t cols, const double* src, size_t rt,
               size_t ct, double* out, bool accumulate) {
  // Parallel over target cells; each cell accumulates its broadcast fan-in
  // in the same row-major order as the reference.
  const bool big = rows * cols >= kGrain;
  if (rt == rows && ct == cols) {
#pragma omp parallel for schedule(static) if (big)
    for (long i = 0; i < static_cast<long>(rows * cols); ++i)
      out[i] = accumulate ? out[i] + src[i] : src[i];
    return;
  }
#pragma omp parallel for schedule(static) collapse(2) if (big)
  for (long ti = 0; ti < static_cast<long>(rt); ++ti) {
    for (long tj = 0; tj < static_cast<long>(ct); ++tj) {
      double acc = 0.0;
      for (size_t i = (rt == 1 ? 0 : ti); i < (rt == 1 ? rows : ti + 1); ++i)
        for (size_t j = (ct == 1 ? 0 : tj); j < (ct == 1 ? cols : tj + 1); ++j)
          acc += src[i * cols + j];
      size_t t = ti * ct + tj;
      out[t] = accumulate ? out[t] + acc : acc;
    }
  }
}

}  // namespace par

// ---- dispatch ----

#define HIERSUM_DISPATCH(fn, ...)            \
  do {                                       \
    if (mode() == Mode::Parallel)            \
      par::fn(__VA_ARGS__);                  \
    else                                     \
      ref::fn(__VA_ARGS__);                  \
  } while (0)

void gemm_nn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  HIERSUM_DISPATCH(gemm_nn, m, k, n, a, b, c, accumulate);
}
void gemm_nt(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  HIERSUM_DISPATCH(gemm_nt, m, k, n, a, b, c, accumulate);
}
void gemm_tn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate) {
  HIERSUM_DISPATCH(gemm_tn, m, k, n, a, b, c, accumulate);
}
void softmax_masked_rows(size_t rows, size_t cols, const double* scores,
                         const uint8_t* mask, double* out) {
  HIERSUM_DISPATCH(softmax_masked_rows, rows, cols, scores, mask, out);
}
void softmax_masked_backward(size_t rows, size_t cols, const double* alpha,
                             const uint8_t* mask, const double* dalpha,
                             double* dscores, bool accumulate) {
  HIERSUM_DISPATCH(softmax_masked_backward, rows, cols, alpha, mask, dalpha,
                   dscores, accumulate);
}
void map_unary(Unary op, double p, size_t size, const double* x, double* y) {
  HIERSUM_DISPATCH(map_unary, op, p, size, x, y);
}
void map_unary_grad(Unary op, double p, size_t size, const double* x,
                    const double* y, const double* dy, double* dx,
                    bool accumulate) {
  HIERSUM_DISPATCH(map_unary_grad, op, p, size, x, y, dy, dx, accumulate);
}
void axpy(size_t size, double alpha, const double* x, double* y,
          bool accumulate) {
  HIERSUM_DISPATCH(axpy, size, alpha, x, y, accumulate);
}
double reduce_sum(size_t size, const double* x) {
  return mode() == Mode::Parallel ? par::reduce_sum(size, x)
                                  : ref::reduce_sum(size, x);
}
void bcast_add(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out) {
  HIERSUM_DISPATCH(bcast_add, rows, cols, ra, ca, a, rb, cb, b, out);
}
void bcast_mul(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out) {
  HIERSUM_DISPATCH(bcast_mul, rows, cols, ra, ca, a, rb, cb, b, out);
}
void reduce_to(size_t rows, size_t cols, const double* src, size_t rt,
               size_t ct, double* out, bool accumulate) {
  HIERSUM_DISPATCH(reduce_to, rows, cols, src, rt, ct, out, accumulate);
}

#undef HIERSUM_DISPATCH

}  // namespace hiersum::kern
