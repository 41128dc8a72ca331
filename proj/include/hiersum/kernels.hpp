#pragma once

#include <cstddef>
#include <cstdint>

// Dense numeric kernels behind the tensor ops. Every kernel has a plain
// serial reference implementation (kern::ref) and an OpenMP one (kern::par);
// the unqualified entry points dispatch on the active mode. Both versions
// are bit-identical: the parallel variants split work so that each output
// element sees the same floating-point evaluation order as the reference.
namespace hiersum::kern {

enum class Mode { Serial, Parallel };

Mode mode();
void set_mode(Mode m);
// Reads HIERSUM_KERNELS (serial|parallel) if set; otherwise Parallel when
// built with OpenMP, Serial otherwise.
Mode default_mode();

enum class Unary { LeakyRelu, Elu, Sigmoid, Exp, Log };

namespace ref {

// C[m x n] = A[m x k] * B[k x n], row-major. accumulate adds into C.
void gemm_nn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate);
// C[m x n] = A[m x k] * B[n x k]^T
void gemm_nt(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate);
// C[m x n] = A[k x m]^T * B[k x n]
void gemm_tn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate);

// Row-wise masked softmax. Masked entries are written as exact zeros; each
// row must have at least one allowed entry (checked by the caller).
void softmax_masked_rows(size_t rows, size_t cols, const double* scores,
                         const uint8_t* mask, double* out);
// dscores (+)= jacobian-vector product given the forward output `alpha`.
void softmax_masked_backward(size_t rows, size_t cols, const double* alpha,
                             const uint8_t* mask, const double* dalpha,
                             double* dscores, bool accumulate);

void map_unary(Unary op, double p, size_t size, const double* x, double* y);
// dx (+)= dy * f'(x); `y` is the forward output (used where it is cheaper).
void map_unary_grad(Unary op, double p, size_t size, const double* x,
                    const double* y, const double* dy, double* dx,
                    bool accumulate);

// y (+)= alpha * x
void axpy(size_t size, double alpha, const double* x, double* y, bool accumulate);

double reduce_sum(size_t size, const double* x);

// Element-wise add/mul with numpy-style 2-D broadcasting. Each input dim is
// either equal to the output dim or 1.
void bcast_add(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out);
void bcast_mul(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out);
// out[rt x ct] (+)= src[rows x cols] summed over broadcast dims.
void reduce_to(size_t rows, size_t cols, const double* src, size_t rt,
               size_t ct, double* out, bool accumulate);

}  // namespace ref

namespace par {

void gemm_nn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate);
void gemm_nt(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate);
void gemm_tn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate);
void softmax_masked_rows(size_t rows, size_t cols, const double* scores,
                         const uint8_t* mask, double* out);
void softmax_masked_backward(size_t rows, size_t cols, const double* alpha,
                             const uint8_t* mask, const double* dalpha,
                             double* dscores, bool accumulate);
void map_unary(Unary op, double p, size_t size, const double* x, double* y);
void map_unary_grad(Unary op, double p, size_t size, const double* x,
                    const double* y, const double* dy, double* dx,
                    bool accumulate);
void axpy(size_t size, double alpha, const double* x, double* y, bool accumulate);
double reduce_sum(size_t size, const double* x);
void bcast_add(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out);
void bcast_mul(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out);
void reduce_to(size_t rows, size_t cols, const double* src, size_t rt,
               size_t ct, double* out, bool accumulate);

}  // namespace par

void gemm_nn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate = false);
void gemm_nt(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate = false);
void gemm_tn(size_t m, size_t k, size_t n, const double* a, const double* b,
             double* c, bool accumulate = false);
void softmax_masked_rows(size_t rows, size_t cols, const double* scores,
                         const uint8_t* mask, double* out);
void softmax_masked_backward(size_t rows, size_t cols, const double* alpha,
                             const uint8_t* mask, const double* dalpha,
                             double* dscores, bool accumulate = true);
void map_unary(Unary op, double p, size_t size, const double* x, double* y);
void map_unary_grad(Unary op, double p, size_t size, const double* x,
                    const double* y, const double* dy, double* dx,
                    bool accumulate = true);
void axpy(size_t size, double alpha, const double* x, double* y,
          bool accumulate = true);
double reduce_sum(size_t size, const double* x);
void bcast_add(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out);
void bcast_mul(size_t rows, size_t cols, size_t ra, size_t ca, const double* a,
               size_t rb, size_t cb, const double* b, double* out);
void reduce_to(size_t rows, size_t cols, const double* src, size_t rt,
               size_t ct, double* out, bool accumulate = true);

}  // namespace hiersum::kern
