#pragma once

#include <cstdint>
#include <vector>

#include "hiersum/rng.hpp"
#include "hiersum/tensor.hpp"

namespace hiersum {

// Boolean neighbor matrix used by the masked attention ops. Not a tensor:
// adjacency is structural, never differentiated.
struct Mask {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<uint8_t> allowed;

  Mask() = default;
  Mask(size_t r, size_t c) : rows(r), cols(c), allowed(r * c, 0) {}

  uint8_t at(size_t i, size_t j) const { return allowed[i * cols + j]; }
  void set(size_t i, size_t j, bool v = true) {
    allowed[i * cols + j] = v ? 1 : 0;
  }
};

namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b);
// Element-wise with numpy-style 2-D broadcasting (each dim equal or 1).
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, size_t rows, size_t cols);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const Tensor& a, const Tensor& b);
// Gather rows; duplicate indices are allowed (backward scatter-adds).
Tensor select_rows(const Tensor& a, std::vector<size_t> idx);

Tensor leaky_relu(const Tensor& a, double slope);
Tensor elu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);  // DomainError on non-positive entries

// Masked entries come out exactly 0; every row needs >= 1 allowed entry.
Tensor row_softmax_masked(const Tensor& scores, const Mask& mask);

Tensor sum(const Tensor& a);        // 1x1
Tensor mean_rows(const Tensor& a);  // 1 x cols, mean over rows

// Cosine similarity of each row of `h` against the single-row vector `u`.
// Rows (or u) with vanishing norm get similarity 0 and no gradient.
Tensor cosine_rows(const Tensor& h, const Tensor& u);  // n x 1
Tensor cosine_sim(const Tensor& u, const Tensor& v);   // 1x1

// Inverted dropout: train=true scales kept entries by 1/(1-rate); with
// train=false or rate==0 this is the identity (the input handle itself).
Tensor dropout(const Tensor& a, double rate, bool train, Rng& rng);

}  // namespace ops
}  // namespace hiersum
