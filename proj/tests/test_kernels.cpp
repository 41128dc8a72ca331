#include <doctest.h>

#include <vector>

#include "hiersum/kernels.hpp"
#include "hiersum/rng.hpp"

using namespace hiersum;

namespace {

std::vector<double> random_vec(size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

std::vector<uint8_t> random_mask(size_t rows, size_t cols, Rng& rng) {
  std::vector<uint8_t> m(rows * cols);
  for (size_t i = 0; i < rows; ++i) {
    bool any = false;
    for (size_t j = 0; j < cols; ++j) {
      m[i * cols + j] = rng.next_double() < 0.5 ? 1 : 0;
      any = any || m[i * cols + j];
    }
    if (!any) m[i * cols + rng.next_below(cols)] = 1;  // keep rows non-empty
  }
  return m;
}

}  // namespace

TEST_CASE("gemm variants match a naive triple loop") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    size_t m = 1 + rng.next_below(40);
    size_t k = 1 + rng.next_below(40);
    size_t n = 1 + rng.next_below(40);
    auto a = random_vec(m * k, rng);
    auto b = random_vec(k * n, rng);
    std::vector<double> naive(m * n, 0.0);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j)
        for (size_t kk = 0; kk < k; ++kk)
          naive[i * n + j] += a[i * k + kk] * b[kk * n + j];

    std::vector<double> c_nn(m * n);
    kern::ref::gemm_nn(m, k, n, a.data(), b.data(), c_nn.data(), false);
    for (size_t i = 0; i < m * n; ++i)
      CHECK(c_nn[i] == doctest::Approx(naive[i]).epsilon(1e-12));

    // A * B == A * (B^T)^T
    std::vector<double> bt(n * k);
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < n; ++j) bt[j * k + i] = b[i * n + j];
    std::vector<double> c_nt(m * n);
    kern::ref::gemm_nt(m, k, n, a.data(), bt.data(), c_nt.data(), false);
    for (size_t i = 0; i < m * n; ++i)
      CHECK(c_nt[i] == doctest::Approx(naive[i]).epsilon(1e-12));

    // A * B == (A^T)^T * B
    std::vector<double> at(k * m);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < k; ++j) at[j * m + i] = a[i * k + j];
    std::vector<double> c_tn(m * n);
    kern::ref::gemm_tn(m, k, n, at.data(), b.data(), c_tn.data(), false);
    for (size_t i = 0; i < m * n; ++i)
      CHECK(c_tn[i] == doctest::Approx(naive[i]).epsilon(1e-12));
  }
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    size_t m = 1 + rng.next_below(64);
    size_t k = 1 + rng.next_below(64);
    size_t n = 1 + rng.next_below(64);
    auto a = random_vec(m * k, rng);
    auto b = random_vec(k * n, rng);

    std::vector<double> c_ref(m * n), c_par(m * n);
    kern::ref::gemm_nn(m, k, n, a.data(), b.data(), c_ref.data(), false);
    kern::par::gemm_nn(m, k, n, a.data(), b.data(), c_par.data(), false);
    CHECK(c_ref == c_par);

    auto bt = random_vec(n * k, rng);
    kern::ref::gemm_nt(m, k, n, a.data(), bt.data(), c_ref.data(), false);
    kern::par::gemm_nt(m, k, n, a.data(), bt.data(), c_par.data(), false);
    CHECK(c_ref == c_par);

    auto at = random_vec(k * m, rng);
    kern::ref::gemm_tn(m, k, n, at.data(), b.data(), c_ref.data(), false);
    kern::par::gemm_tn(m, k, n, at.data(), b.data(), c_par.data(), false);
    CHECK(c_ref == c_par);

    auto scores = random_vec(m * n, rng);
    auto mask = random_mask(m, n, rng);
    std::vector<double> s_ref(m * n), s_par(m * n);
    kern::ref::softmax_masked_rows(m, n, scores.data(), mask.data(),
                                   s_ref.data());
    kern::par::softmax_masked_rows(m, n, scores.data(), mask.data(),
                                   s_par.data());
    CHECK(s_ref == s_par);

    auto dalpha = random_vec(m * n, rng);
    std::vector<double> g_ref(m * n, 0.0), g_par(m * n, 0.0);
    kern::ref::softmax_masked_backward(m, n, s_ref.data(), mask.data(),
                                       dalpha.data(), g_ref.data(), true);
    kern::par::softmax_masked_backward(m, n, s_par.data(), mask.data(),
                                       dalpha.data(), g_par.data(), true);
    CHECK(g_ref == g_par);

    for (kern::Unary op : {kern::Unary::LeakyRelu, kern::Unary::Elu,
                           kern::Unary::Sigmoid, kern::Unary::Exp}) {
      std::vector<double> y_ref(m * n), y_par(m * n);
      kern::ref::map_unary(op, 0.2, m * n, scores.data(), y_ref.data());
      kern::par::map_unary(op, 0.2, m * n, scores.data(), y_par.data());
      CHECK(y_ref == y_par);
      std::vector<double> dx_ref(m * n, 0.0), dx_par(m * n, 0.0);
      kern::ref::map_unary_grad(op, 0.2, m * n, scores.data(), y_ref.data(),
                                dalpha.data(), dx_ref.data(), true);
      kern::par::map_unary_grad(op, 0.2, m * n, scores.data(), y_par.data(),
                                dalpha.data(), dx_par.data(), true);
      CHECK(dx_ref == dx_par);
    }

    // Broadcast add/mul and their reductions over every 2-D broadcast case.
    const std::vector<std::pair<size_t, size_t>> shapes = {
        {m, n}, {1, n}, {m, 1}, {1, 1}};
    for (auto [ra, ca] : shapes) {
      auto small = random_vec(ra * ca, rng);
      std::vector<double> o_ref(m * n), o_par(m * n);
      kern::ref::bcast_add(m, n, m, n, scores.data(), ra, ca, small.data(),
                           o_ref.data());
      kern::par::bcast_add(m, n, m, n, scores.data(), ra, ca, small.data(),
                           o_par.data());
      CHECK(o_ref == o_par);
      kern::ref::bcast_mul(m, n, m, n, scores.data(), ra, ca, small.data(),
                           o_ref.data());
      kern::par::bcast_mul(m, n, m, n, scores.data(), ra, ca, small.data(),
                           o_par.data());
      CHECK(o_ref == o_par);
      std::vector<double> r_ref(ra * ca, 0.0), r_par(ra * ca, 0.0);
      kern::ref::reduce_to(m, n, scores.data(), ra, ca, r_ref.data(), true);
      kern::par::reduce_to(m, n, scores.data(), ra, ca, r_par.data(), true);
      CHECK(r_ref == r_par);
    }

    CHECK(kern::ref::reduce_sum(m * n, scores.data()) ==
          kern::par::reduce_sum(m * n, scores.data()));
  }
}

TEST_CASE("reduce_to sums over broadcast dimensions") {
  // 2x3 -> 1x3 column sums, 2x1 row sums, 1x1 total.
  std::vector<double> src = {1, 2, 3, 4, 5, 6};
  std::vector<double> cols(3, 0.0);
  kern::reduce_to(2, 3, src.data(), 1, 3, cols.data(), true);
  CHECK(cols == std::vector<double>{5, 7, 9});
  std::vector<double> rows(2, 0.0);
  kern::reduce_to(2, 3, src.data(), 2, 1, rows.data(), true);
  CHECK(rows == std::vector<double>{6, 15});
  std::vector<double> total(1, 0.0);
  kern::reduce_to(2, 3, src.data(), 1, 1, total.data(), true);
  CHECK(total[0] == 21.0);
}

TEST_CASE("mode dispatch honors set_mode") {
  kern::Mode before = kern::mode();
  kern::set_mode(kern::Mode::Serial);
  CHECK(kern::mode() == kern::Mode::Serial);
  kern::set_mode(kern::Mode::Parallel);
  CHECK(kern::mode() == kern::Mode::Parallel);
  kern::set_mode(before);
}
