#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbki/datagen.hpp"
#include "rbki/metrics.hpp"
#include "rbki/tring.hpp"

#include <cmath>

using namespace rbki;

namespace {

TRFactors random_ring(const std::vector<Index>& dims, const std::vector<Index>& ranks,
                      std::uint64_t seed) {
  TRFactors f;
  const std::size_t order = dims.size();
  f.cores.resize(order);
  for (std::size_t n = 0; n < order; ++n) {
    const Index rprev = ranks[(n + order - 1) % order];
    const Index rn = ranks[n];
    f.cores[n] = DenseTensor({rprev, dims[n], rn},
                             gaussian_vector(rprev * dims[n] * rn,
                                             RngSeed{seed + static_cast<std::uint64_t>(n)}));
  }
  return f;
}

// Element-wise evaluation straight from the cyclic trace formula.
double ring_entry_oracle(const TRFactors& f, const std::vector<Index>& idx) {
  const std::size_t order = f.cores.size();
  Matrix acc;
  for (std::size_t n = 0; n < order; ++n) {
    const auto& core = f.cores[n];
    const Index rprev = core.shape()[0];
    const Index rn = core.shape()[2];
    Matrix slice(rprev, rn);
    for (Index a = 0; a < rprev; ++a)
      for (Index b = 0; b < rn; ++b) slice(a, b) = core.at({a, idx[n], b});
    acc = n == 0 ? slice : Matrix(acc * slice);
  }
  return acc.trace();
}

DenseTensor ring_oracle(const TRFactors& f) {
  std::vector<Index> dims = f.dims();
  DenseTensor x(dims);
  std::vector<Index> idx(dims.size(), 0);
  for (Index p = 0; p < x.numel(); ++p) {
    x.vec()(p) = ring_entry_oracle(f, idx);
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("rank-one ring is a product of scalar slices") {
  const TRFactors f = random_ring({3, 4, 5}, {1, 1, 1}, 1);
  const DenseTensor x = tr_reconstruct(f);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j)
      for (Index k = 0; k < 5; ++k) {
        const double want = f.cores[0].at({0, i, 0}) * f.cores[1].at({0, j, 0}) *
                            f.cores[2].at({0, k, 0});
        CHECK(x.at({i, j, k}) == doctest::Approx(want).epsilon(1e-12));
      }
}

TEST_CASE("two-core ring matches the trace oracle") {
  const TRFactors f = random_ring({4, 5}, {3, 2}, 10);
  const DenseTensor x = tr_reconstruct(f);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 5; ++j) {
      CHECK(x.at({i, j}) == doctest::Approx(ring_entry_oracle(f, {i, j})).epsilon(1e-12));
    }
}

TEST_CASE("chained reconstruction equals the brute-force sum on small rings") {
  const std::vector<std::vector<Index>> dims_list = {{2, 3, 2}, {3, 3, 3}, {2, 2, 3, 2}};
  const std::vector<std::vector<Index>> ranks_list = {{2, 2, 2}, {2, 3, 2}, {2, 1, 2, 2}};
  for (std::size_t c = 0; c < dims_list.size(); ++c) {
    const TRFactors f = random_ring(dims_list[c], ranks_list[c], 20 + c);
    const DenseTensor got = tr_reconstruct(f);
    const DenseTensor want = ring_oracle(f);
    REQUIRE(got.numel() <= 200);
    CHECK((got.vec() - want.vec()).norm() <= 1e-12 * want.vec().norm());
  }
}

TEST_CASE("cyclically shifting the cores permutes the modes") {
  const TRFactors f = random_ring({2, 3, 4}, {2, 2, 2}, 30);
  TRFactors shifted;
  shifted.cores = {f.cores[1], f.cores[2], f.cores[0]};
  const DenseTensor x = tr_reconstruct(f);
  const DenseTensor y = tr_reconstruct(shifted);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index k = 0; k < 4; ++k)
        CHECK(x.at({i, j, k}) == doctest::Approx(y.at({j, k, i})).epsilon(1e-12));
}

TEST_CASE("subchain of a two-core ring swaps the rank pairing") {
  const TRFactors f = random_ring({4, 6}, {3, 2}, 40);
  const Matrix s = subchain_unfolding(f, 1);
  // core 2 has shape (R1, I2, R2) = (3, 6, 2); the subchain pairs (r2, r1)
  REQUIRE(s.rows() == 6);
  REQUIRE(s.cols() == 6);
  for (Index j = 0; j < 6; ++j)
    for (Index r2 = 0; r2 < 2; ++r2)
      for (Index r1 = 0; r1 < 3; ++r1)
        CHECK(s(j, r2 + 2 * r1) == f.cores[1].at({r1, j, r2}));
}

TEST_CASE("reconstruct-then-unfold equals the factored form") {
  const TRFactors f = random_ring({3, 4, 2, 3}, {2, 3, 2, 2}, 50);
  const DenseTensor x = tr_reconstruct(f);
  for (Index n = 1; n <= 4; ++n) {
    const Matrix lhs = tr_unfold(x, n);
    const Matrix c2 = unfold(f.cores[static_cast<std::size_t>(n - 1)], 2);
    const Matrix rhs = c2 * subchain_unfolding(f, n).transpose();
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("rank-one subchain is a single kronecker-like column block") {
  const TRFactors f = random_ring({3, 4, 5}, {1, 1, 1}, 60);
  const Matrix s = subchain_unfolding(f, 2);
  CHECK(s.cols() == 1);
  CHECK(s.rows() == 15);
}

TEST_CASE("circular unfolding at mode 1 matches the canonical unfolding") {
  const DenseTensor x =
      gaussian_tucker_tensor({3, 4, 5}, MultilinearRank{{3, 4, 5}}, RngSeed{70});
  CHECK((tr_unfold(x, 1) - unfold(x, 1)).norm() == 0.0);
}

TEST_CASE("tr_als fits a tensor that exactly has ring structure") {
  const TRFactors truth = random_ring({6, 7, 8}, {3, 2, 4}, 80);
  const DenseTensor x = tr_reconstruct(truth);
  const TrAlsResult r = tr_als(x, TRRank{{3, 2, 4}}, 20, 1e-6, RngSeed{81});
  CHECK(r.fit_trace.back() >= 99.0);
  CHECK(r.fit_trace.back() >= r.fit_trace.front() - 1e-9);
  CHECK_FALSE(r.underdetermined);
}

TEST_CASE("tr_als with all ranks one fits a rank-one tensor") {
  TuckerFactors rank1;
  rank1.core = DenseTensor({1, 1, 1});
  rank1.core.vec()(0) = 1.0;
  rank1.factors = {gaussian_vector(5, RngSeed{90}), gaussian_vector(6, RngSeed{91}),
                   gaussian_vector(7, RngSeed{92})};
  const DenseTensor x = tucker_reconstruct(rank1);
  const TrAlsResult r = tr_als(x, TRRank{{1, 1, 1}}, 20, 1e-6, RngSeed{93});
  CHECK(r.fit_trace.back() >= 99.9);
}

TEST_CASE("tr_als fit is monotone across sweeps") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseTensor x = DenseTensor({5, 6, 4}, gaussian_vector(120, RngSeed{100 + seed}));
    const TrAlsResult r = tr_als(x, TRRank{{2, 2, 2}}, 8, -1.0, RngSeed{200 + seed});
    for (std::size_t t = 1; t < r.fit_trace.size(); ++t)
      CHECK(r.fit_trace[t] >= r.fit_trace[t - 1] - 1e-9);
  }
}

TEST_CASE("tr_als flags underdetermined systems") {
  const DenseTensor x = DenseTensor({3, 3}, gaussian_vector(9, RngSeed{110}));
  const TrAlsResult r = tr_als(x, TRRank{{2, 2}}, 3, 1e-6, RngSeed{111});
  CHECK(r.underdetermined);  // K = 4 columns vs J = 3 rows
}

TEST_CASE("lossless compression reduces to plain tr_als") {
  const TRFactors truth = random_ring({6, 5, 4}, {2, 2, 2}, 120);
  DenseTensor x = tr_reconstruct(truth);
  const auto [noisy, lambda] = add_noise(x, NoiseSpec{15.0, RngSeed{121}});
  const TRRank rank{{2, 2, 2}};
  const RbkiTkTrResult h = rbki_tk_tr(noisy, {6, 5, 4}, rank, 2, 1.0, RngSeed{122}, 20, 1e-6);
  const TrAlsResult d = tr_als(noisy, rank, 20, 1e-6, RngSeed{122});
  const double fit_h = fit(noisy, tr_reconstruct(h.factors));
  const double fit_d = fit(noisy, tr_reconstruct(d.factors));
  CHECK(std::abs(fit_h - fit_d) <= 1e-6 * std::max(1.0, std::abs(fit_d)));
}

TEST_CASE("hierarchical solver recovers exact ring structure") {
  const TRFactors truth = random_ring({10, 12, 9}, {3, 3, 3}, 130);
  const DenseTensor x = tr_reconstruct(truth);
  const RbkiTkTrResult h =
      rbki_tk_tr(x, default_compress_sizes(x.shape(), {3, 3, 3}), TRRank{{3, 3, 3}}, 2, 1.0,
                 RngSeed{131}, 30, 1e-8);
  CHECK(fit(x, tr_reconstruct(h.factors)) >= 99.0);
}

TEST_CASE("contracting the compressed cores commutes with reconstruction") {
  const DenseTensor clean =
      gaussian_tucker_tensor({8, 9, 10}, MultilinearRank{{3, 3, 3}}, RngSeed{140});
  const auto [x, lambda] = add_noise(clean, NoiseSpec{10.0, RngSeed{141}});
  const RbkiTkTrResult h = rbki_tk_tr(x, {5, 5, 5}, TRRank{{2, 2, 2}}, 2, 1.0, RngSeed{142});
  // route 1: reconstruct the expanded ring
  const DenseTensor direct = tr_reconstruct(h.factors);
  // route 2: reconstruct the core ring, then expand through the compression
  TuckerFactors expanded = h.compression;
  expanded.core = tr_reconstruct(h.core_factors);
  const DenseTensor via_core = tucker_reconstruct(expanded);
  CHECK((direct.vec() - via_core.vec()).norm() <= 1e-9 * via_core.vec().norm());
}

TEST_CASE("default compress sizes follow the five-times rule with caps") {
  const auto s = default_compress_sizes({32, 32, 3, 2000}, {3, 3, 3, 3});
  CHECK(s == std::vector<Index>({15, 15, 3, 15}));
}

TEST_CASE("ring validation rejects broken chains") {
  TRFactors bad;
  bad.cores = {DenseTensor({2, 3, 2}), DenseTensor({3, 4, 2})};  // 2 != 3
  CHECK_THROWS_AS(validate_ring(bad), std::invalid_argument);
  CHECK_THROWS_AS((void)tr_reconstruct(bad), std::invalid_argument);
  TRFactors single;
  single.cores = {DenseTensor({2, 3, 2})};
  CHECK_THROWS_AS(validate_ring(single), std::invalid_argument);
}
