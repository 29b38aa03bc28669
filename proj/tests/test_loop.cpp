#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dressforge/loop.hpp>

#include "helpers.hpp"

using namespace dressforge;
using namespace dressforge::testing;

namespace {

// Exact-arithmetic oracle for evaluate: term-by-term powers with integer
// exponent bookkeeping, no Horner.
Mat2 naive_evaluate(const MatrixLoop& g, cplx l0) {
  Mat2 acc = Mat2::Zero();
  for (int n = g.n_min(); n <= g.n_max(); ++n) acc += g.at(n) * std::pow(l0, n);
  return acc;
}

}  // namespace

TEST_CASE("multiply: identity cases") {
  Rng rng(7);
  const MatrixLoop g = random_group_loop(rng, 2);
  const MatrixLoop id = MatrixLoop::identity();
  CHECK((multiply(id, g) - g).norm_inf() == doctest::Approx(0.0));
  CHECK((multiply(g, id) - g).norm_inf() == doctest::Approx(0.0));

  const MatrixLoop ad = antidiag_pair(1.0, 1.0);
  CHECK((multiply(id, ad) - ad).norm_inf() == doctest::Approx(0.0));
}

TEST_CASE("multiply: pointwise-evaluation oracle at 16 circle samples") {
  Rng rng(11);
  const MatrixLoop a = random_group_loop(rng, 2, 6);
  const MatrixLoop b = random_group_loop(rng, 2, 6);
  const MatrixLoop ab = multiply(a, b);
  for (int k = 0; k < 16; ++k) {
    const cplx l = circle_sample(k, 16);
    const Mat2 direct = a.evaluate(l) * b.evaluate(l);
    CHECK((ab.evaluate(l) - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("multiply: Minkowski range and twist closure") {
  Rng rng(3);
  const MatrixLoop a = random_group_loop(rng, 3, 5);
  const MatrixLoop b = random_group_loop(rng, 1, 4);
  const MatrixLoop ab = multiply(a, b);
  CHECK(ab.n_min() == a.n_min() + b.n_min());
  CHECK(ab.n_max() == a.n_max() + b.n_max());
  // Twisting is structural: reconstructing coefficients shows the parity.
  for (int n = ab.n_min(); n <= ab.n_max(); ++n) {
    const Mat2 m = ab.at(n);
    if (((n % 2) + 2) % 2 == 0) {
      CHECK(std::abs(m(0, 1)) == 0.0);
      CHECK(std::abs(m(1, 0)) == 0.0);
    } else {
      CHECK(std::abs(m(0, 0)) == 0.0);
      CHECK(std::abs(m(1, 1)) == 0.0);
    }
  }
}

TEST_CASE("multiply: associativity within 1e-12") {
  Rng rng(13);
  const MatrixLoop a = random_group_loop(rng, 2, 6);
  const MatrixLoop b = random_group_loop(rng, 2, 6);
  const MatrixLoop c = random_group_loop(rng, 2, 6);
  CHECK((multiply(multiply(a, b), c) - multiply(a, multiply(b, c))).norm_inf() < 1e-12);
}

TEST_CASE("multiply: determinant multiplicativity on circle samples") {
  Rng rng(17);
  const MatrixLoop a = random_group_loop(rng, 2, 6);
  const MatrixLoop b = random_group_loop(rng, 2, 6);
  const MatrixLoop ab = multiply(a, b);
  for (int k = 0; k < kCircleSamples; ++k) {
    const cplx l = circle_sample(k);
    const cplx lhs = ab.evaluate(l).determinant();
    const cplx rhs = a.evaluate(l).determinant() * b.evaluate(l).determinant();
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("evaluate: trivial and oracle cases") {
  const MatrixLoop id = MatrixLoop::identity();
  CHECK((id.evaluate(cplx(0, 1)) - Mat2::Identity()).cwiseAbs().maxCoeff() == 0.0);

  const MatrixLoop ad = antidiag_pair(1.0, 1.0);
  Mat2 expect;
  expect << 0, 1, 1, 0;
  CHECK((ad.evaluate(1.0) - expect).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(23);
  const MatrixLoop g = random_group_loop(rng, 3);
  const cplx l0 = std::polar(1.0, M_PI / 5.0);
  CHECK((g.evaluate(l0) - naive_evaluate(g, l0)).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(ad.evaluate(0.0), std::domain_error);
}

TEST_CASE("loop_adjoint: identity, unitarity, pointwise oracle, involution") {
  const MatrixLoop id = MatrixLoop::identity();
  CHECK((loop_adjoint(id) - id).norm_inf() == 0.0);

  // A unitary loop: exp of an anti-Hermitian-on-circle twisted element.
  MatrixLoop x(-1, 1);
  x.set_offdiag(1, cplx(0.2, 0.1), cplx(-0.3, 0.15));
  x.set_offdiag(-1, cplx(0.3, 0.15), cplx(-0.2, 0.1));  // x* = -x on S^1
  const MatrixLoop u = exp_loop(x, -kDefaultTruncation, kDefaultTruncation);
  REQUIRE(is_unitary_on_circle(u, 1e-10));
  const MatrixLoop prod = multiply(loop_adjoint(u), u);
  for (int k = 0; k < kCircleSamples; ++k)
    CHECK((prod.evaluate(circle_sample(k)) - Mat2::Identity()).cwiseAbs().maxCoeff() <
          kUnitaryTol);

  Rng rng(29);
  const MatrixLoop g = random_group_loop(rng, 2);
  const MatrixLoop gs = loop_adjoint(g);
  for (int k = 0; k < 16; ++k) {
    const cplx l = circle_sample(k, 16);
    CHECK((gs.evaluate(l) - g.evaluate(l).adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK((loop_adjoint(gs) - g).norm_inf() == 0.0);
}

TEST_CASE("check_class") {
  const MatrixLoop id = MatrixLoop::identity();
  for (auto kind : {LoopClass::Kind::plus, LoopClass::Kind::plus_based,
                    LoopClass::Kind::minus_based, LoopClass::Kind::unitary,
                    LoopClass::Kind::general})
    CHECK(check_class(id, {kind, 1.0}));

  const MatrixLoop ad = antidiag_pair(1.0, 1.0);
  CHECK_FALSE(check_class(ad, {LoopClass::Kind::plus, 1.0}));
}

TEST_CASE("twisting violations are rejected structurally") {
  MatrixLoop g(0, 2);
  Mat2 bad = Mat2::Zero();
  bad(0, 1) = 1.0;  // off-diagonal at even exponent
  CHECK_THROWS_AS(g.set(0, bad), std::invalid_argument);
  CHECK_THROWS_AS(g.set_offdiag(2, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(g.set_diag(1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("JSON round trip preserves coefficients exactly") {
  Rng rng(31);
  const MatrixLoop g = random_group_loop(rng, 3, 8);
  const MatrixLoop back = MatrixLoop::from_json(g.to_json());
  CHECK((back - g).norm_inf() == 0.0);
  CHECK(back.n_min() == g.n_min());
  CHECK(back.n_max() == g.n_max());
}

TEST_CASE("truncation monitor flags heavy tails") {
  Rng rng(37);
  const MatrixLoop g = random_group_loop(rng, 2, 16, 0.3);
  CHECK_FALSE(g.truncation_suspect());
  const MatrixLoop tight = g.truncated(-3, 3);
  CHECK(tight.truncation_suspect());
}
