#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dressforge/factorization.hpp>

#include "helpers.hpp"

using namespace dressforge;
using namespace dressforge::testing;

TEST_CASE("birkhoff: identity loop") {
  const auto r = birkhoff(MatrixLoop::identity());
  CHECK(r.in_big_cell);
  CHECK(r.residual < 1e-14);
  CHECK((r.g_minus.trimmed(1e-14) - MatrixLoop::identity()).norm_inf() < 1e-14);
  CHECK((r.g_plus.trimmed(1e-14) - MatrixLoop::identity()).norm_inf() < 1e-14);
}

TEST_CASE("birkhoff: construct-then-split recovers random factors") {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const MatrixLoop gm = random_minus_based_loop(rng, 4);
    const MatrixLoop gp = random_plus_loop(rng, 4);
    const MatrixLoop g = multiply(gm, gp).truncated(-kDefaultTruncation,
                                                    kDefaultTruncation);
    const auto r = birkhoff(g);
    REQUIRE(r.in_big_cell);
    CHECK((r.g_minus - gm).norm_inf() < 1e-9);
    CHECK((r.g_plus.truncated(0, gp.n_max()) - gp).norm_inf() < 1e-9);
    CHECK(r.residual < 1e-9);
  }
}

TEST_CASE("birkhoff: nonzero partial index lies outside the big cell") {
  // g = antidiag(lambda, -lambda^{-1}), det = 1.
  const MatrixLoop g = antidiag_pair(1.0, -1.0);
  const auto r = birkhoff(g);
  CHECK_FALSE(r.in_big_cell);

  // Independent rank oracle: the truncated Toeplitz block for row 0 maps the
  // unknowns u_{-k} to the negative modes of (u g); build it directly and
  // check singularity.
  const int N = 6;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  for (int m = 1; m <= N; ++m)
    for (int k = 1; k <= N; ++k) {
      const Mat2 gm = g.at(-m + k);
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) A(2 * (m - 1) + q, 2 * (k - 1) + p) = gm(p, q);
    }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  CHECK(svd.singularValues().minCoeff() < 1e-12);
}

TEST_CASE("birkhoff: minus_based input passes through") {
  Rng rng(43);
  const MatrixLoop gm = random_minus_based_loop(rng, 3);
  const auto r = birkhoff(gm);
  REQUIRE(r.in_big_cell);
  CHECK((r.g_minus - gm).norm_inf() < 1e-10);
  CHECK((r.g_plus.trimmed(1e-12) - MatrixLoop::identity()).norm_inf() < 1e-10);
}

TEST_CASE("birkhoff: uniqueness under refactoring") {
  Rng rng(47);
  const MatrixLoop g = random_group_loop(rng, 3);
  const auto r1 = birkhoff(g);
  const auto r2 = birkhoff(g);
  REQUIRE(r1.in_big_cell);
  CHECK((r1.g_minus - r2.g_minus).norm_inf() < 1e-10);
}

TEST_CASE("iwasawa: unitary loop is its own unitary part") {
  MatrixLoop x(-1, 1);
  x.set_offdiag(1, cplx(0.2, 0.1), cplx(-0.3, 0.15));
  x.set_offdiag(-1, cplx(0.3, 0.15), cplx(-0.2, 0.1));
  const MatrixLoop u = exp_loop(x, -kDefaultTruncation, kDefaultTruncation);
  REQUIRE(is_unitary_on_circle(u, 1e-10));
  const auto r = iwasawa(u);
  CHECK((r.plus_part.trimmed(1e-11) - MatrixLoop::identity()).norm_inf() < 1e-9);
  CHECK((r.unitary_part.truncated(u.n_min(), u.n_max()) - u).norm_inf() < 1e-9);
}

TEST_CASE("iwasawa: constant loop already in B") {
  MatrixLoop g(0, 0);
  g.set_diag(0, 2.0, 0.5);
  const auto r = iwasawa(g);
  CHECK((r.unitary_part.trimmed(1e-12) - MatrixLoop::identity()).norm_inf() < 1e-10);
  CHECK((r.plus_part.trimmed(1e-12) - g).norm_inf() < 1e-10);
}

TEST_CASE("iwasawa: random twisted loop of degree 4") {
  Rng rng(53);
  const MatrixLoop g = random_group_loop(rng, 4);
  const auto r = iwasawa(g);
  CHECK(r.residual < 1e-9);
  CHECK(is_unitary_on_circle(r.unitary_part, 1e-9));
  CHECK(check_class(r.unitary_part, {LoopClass::Kind::unitary, 1.0}));
  // plus_part value at 0 in B: upper triangular, positive real diagonal.
  const Mat2 p0 = r.plus_part.at(0);
  CHECK(std::abs(p0(1, 0)) < 1e-10);
  CHECK(p0(0, 0).real() > 0.0);
  CHECK(p0(1, 1).real() > 0.0);
  CHECK(std::abs(p0(0, 0).imag()) < 1e-10);
  CHECK(std::abs(p0(1, 1).imag()) < 1e-10);
}

TEST_CASE("iwasawa: unitary part invariant under right multiplication by B-plus loops") {
  Rng rng(59);
  const MatrixLoop g = random_group_loop(rng, 3);
  // p: plus loop with p(0) in B.  Twisting makes the lambda=0 value diagonal,
  // so "in B" means positive real diagonal there.
  MatrixLoop y(0, 2);
  y.set_diag(0, 0.2, -0.2);
  y.set_offdiag(1, cplx(0.1, -0.05), cplx(0.05, 0.08));
  y.set_diag(2, cplx(0.02, 0.04), cplx(-0.02, -0.04));
  const MatrixLoop p = exp_loop(y, 0, kDefaultTruncation);
  const auto r1 = iwasawa(g);
  const auto r2 = iwasawa(multiply(g, p).truncated(-kDefaultTruncation,
                                                   kDefaultTruncation));
  const int lo = std::max(r1.unitary_part.n_min(), r2.unitary_part.n_min());
  const int hi = std::min(r1.unitary_part.n_max(), r2.unitary_part.n_max());
  CHECK((r1.unitary_part.truncated(lo, hi) - r2.unitary_part.truncated(lo, hi))
            .norm_inf() < 1e-8);
}

TEST_CASE("round-trip residual over random big-cell inputs") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixLoop g = random_group_loop(rng, 4);
    const auto rb = birkhoff(g);
    REQUIRE(rb.in_big_cell);
    CHECK(rb.residual <= kFactorResidualTol);
    const auto ri = iwasawa(g);
    CHECK(ri.residual <= kFactorResidualTol);
  }
}
