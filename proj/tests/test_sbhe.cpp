#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "tactile/errors.hpp"
#include "tactile/rng.hpp"
#include "tactile/sbhe.hpp"
#include "tactile/wavelet.hpp"

using namespace tactile;

namespace {

std::vector<std::uint32_t> identity_map(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<double> random_signal(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.gaussian();
  return x;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("identity layout at full sampling is the scaled Hadamard matrix") {
  const auto matrix = sbhe_with_layout(4, 4, 4, identity_map(4), identity_map(4));
  const Eigen::MatrixXd expected = oracles::hadamard(4) / 2.0;
  for (std::size_t r = 0; r < 4; ++r) {
    std::vector<double> unit(4, 0.0);
    unit[r] = 1.0;
    // Row r of the dense operator via the adjoint applied to e_r.
    const auto row = sbhe_apply_adjoint(matrix, unit);
    for (std::size_t cidx = 0; cidx < 4; ++cidx) {
      CHECK(row[cidx] == doctest::Approx(expected(static_cast<Eigen::Index>(r),
                                                  static_cast<Eigen::Index>(cidx)))
                             .epsilon(1e-14));
    }
  }
}

TEST_CASE("hand-computed product: identity layout, first two rows") {
  const auto matrix = sbhe_with_layout(4, 2, 4, identity_map(4), {0, 1});
  TactileFrame frame;
  frame.values = {1.0, 2.0, 3.0, 4.0};
  frame.array = TaxelArray::square(2);
  const auto y = compress(matrix, frame);
  REQUIRE(y.values.size() == 2);
  CHECK(y.values[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(y.values[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("every dense row has exactly B nonzeros of magnitude 1/sqrt(B)") {
  const auto matrix = build_sbhe(4096, 64, 32, 99);
  const double magnitude = 1.0 / std::sqrt(32.0);
  for (std::size_t r = 0; r < matrix.m; ++r) {
    std::vector<double> unit(matrix.m, 0.0);
    unit[r] = 1.0;
    const auto row = sbhe_apply_adjoint(matrix, unit);
    std::size_t nonzeros = 0;
    for (double v : row) {
      if (v != 0.0) {
        ++nonzeros;
        CHECK(std::abs(std::abs(v) - magnitude) < 1e-15);
      }
    }
    CHECK(nonzeros == 32);
  }
}

TEST_CASE("measurement presets give the published compression factor") {
  const auto matrix = build_sbhe(4096, 1365, 32, 5);
  CHECK(static_cast<double>(matrix.n) / static_cast<double>(matrix.m) ==
        doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("zero signal compresses to zero") {
  const auto matrix = build_sbhe(256, 32, 32, 11);
  const auto y = sbhe_apply(matrix, std::vector<double>(256, 0.0));
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("compress is linear") {
  Rng rng(3);
  const auto matrix = build_sbhe(512, 100, 32, 17);
  const auto x1 = random_signal(512, rng);
  const auto x2 = random_signal(512, rng);
  const double a = 1.7, b = -0.45;
  std::vector<double> mix(512);
  for (std::size_t i = 0; i < 512; ++i) mix[i] = a * x1[i] + b * x2[i];
  const auto y1 = sbhe_apply(matrix, x1);
  const auto y2 = sbhe_apply(matrix, x2);
  const auto ym = sbhe_apply(matrix, mix);
  for (std::size_t i = 0; i < ym.size(); ++i) {
    CHECK(std::abs(ym[i] - (a * y1[i] + b * y2[i])) < 1e-12 * (1.0 + std::abs(ym[i])));
  }
}

TEST_CASE("fast transform equals the dense oracle") {
  Rng seeds(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = std::array<std::size_t, 3>{32, 64, 256}[trial % 3];
    const std::size_t block = std::array<std::size_t, 3>{8, 16, 32}[seeds.below(3)];
    const std::size_t m = 1 + seeds.below(n);
    const auto matrix = build_sbhe(n, m, block, seeds.next_u64());
    const Eigen::MatrixXd dense = oracles::dense_sbhe(matrix);

    Rng rng(seeds.next_u64());
    const auto x = random_signal(n, rng);
    const auto fast = sbhe_apply(matrix, x);
    const Eigen::VectorXd xe =
        Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd expected = dense * xe;
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(std::abs(fast[i] - expected[static_cast<Eigen::Index>(i)]) <=
            1e-12 * (1.0 + std::abs(expected[static_cast<Eigen::Index>(i)])));
    }

    // Adjoint against the dense transpose on a random measurement vector.
    const auto y = random_signal(m, rng);
    const auto adj = sbhe_apply_adjoint(matrix, y);
    const Eigen::VectorXd ye =
        Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(m));
    const Eigen::VectorXd expected_adj = dense.transpose() * ye;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(adj[i] - expected_adj[static_cast<Eigen::Index>(i)]) <=
            1e-12 * (1.0 + std::abs(expected_adj[static_cast<Eigen::Index>(i)])));
    }
  }
}

TEST_CASE("rows are orthonormal: energy bound and full-sampling equality") {
  Rng rng(5);
  const auto partial = build_sbhe(1024, 200, 32, 8);
  const auto full = build_sbhe(1024, 1024, 32, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_signal(1024, rng);
    CHECK(norm(sbhe_apply(partial, x)) <= norm(x) * (1.0 + 1e-12));
    CHECK(norm(sbhe_apply(full, x)) == doctest::Approx(norm(x)).epsilon(1e-12));
  }
}

TEST_CASE("same seed reproduces the same layout") {
  const auto a = build_sbhe(2048, 300, 32, 777);
  const auto b = build_sbhe(2048, 300, 32, 777);
  CHECK(a.permutation == b.permutation);
  CHECK(a.selected_rows == b.selected_rows);
  const auto c = build_sbhe(2048, 300, 32, 778);
  CHECK(a.permutation != c.permutation);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_sbhe(100, 10, 32, 1), DimensionError);   // 32 does not divide 100
  CHECK_THROWS_AS(build_sbhe(128, 200, 32, 1), SelectionError);  // m > n
  CHECK_THROWS_AS(build_sbhe(128, 10, 12, 1), InvalidInput);     // block not a power of 2
  CHECK_THROWS_AS(build_sbhe(128, 0, 32, 1), InvalidInput);      // no measurements
  const auto matrix = build_sbhe(64, 16, 16, 1);
  TactileFrame frame;
  frame.values.assign(32, 0.0);
  frame.array = TaxelArray::square(4);  // wrong length vs n=64
  CHECK_THROWS_AS(compress(matrix, frame), DimensionError);
}

TEST_CASE("full sampling is an exact isometry for wavelet-sparse draws") {
  const auto matrix = build_sbhe(1024, 1024, 32, 21);
  const auto basis = WaveletBasis::daubechies2(32);
  const SynthesisFn synth = [&](const std::vector<double>& s) { return idwt2(s, basis); };
  const auto with_basis = isometry_check(matrix, synth, 5, 50, 123);
  CHECK(with_basis.min_ratio > 1.0 - 1e-9);
  CHECK(with_basis.max_ratio < 1.0 + 1e-9);
  const auto identity = isometry_check(matrix, nullptr, 5, 50, 123);
  CHECK(identity.delta_hat < 1e-9);
}

TEST_CASE("partial sampling keeps the empirical isometry constant small") {
  const auto matrix = build_sbhe(1024, 256, 32, 31);
  const auto basis = WaveletBasis::daubechies2(32);
  const SynthesisFn synth = [&](const std::vector<double>& s) { return idwt2(s, basis); };
  // Calibrated over repeated runs: delta_hat stays well under 0.5.
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto summary = isometry_check(matrix, synth, 5, 1000, 1000 + seed);
    ok += summary.delta_hat < 0.5;
    CHECK(summary.min_ratio > 0.0);
    CHECK(summary.mean_ratio == doctest::Approx(1.0).epsilon(0.2));
  }
  CHECK(ok == 20);
}

TEST_CASE("degenerate sparsity is rejected") {
  const auto matrix = build_sbhe(256, 64, 32, 1);
  CHECK_THROWS_AS(isometry_check(matrix, nullptr, 0, 10, 1), InvalidInput);
  CHECK_THROWS_AS(isometry_check(matrix, nullptr, 5, 0, 1), InvalidInput);
}

TEST_CASE("input coverage counts the blocks actually measured") {
  // All rows in one block share a support of block_size inputs.
  const auto one_block = sbhe_with_layout(128, 3, 32, identity_map(128), {0, 5, 31});
  CHECK(input_coverage(one_block) == doctest::Approx(32.0 / 128.0));
  const auto two_blocks = sbhe_with_layout(128, 3, 32, identity_map(128), {0, 5, 40});
  CHECK(input_coverage(two_blocks) == doctest::Approx(64.0 / 128.0));
}
