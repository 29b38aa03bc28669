#pragma once

// Shared test utilities: random twisted loop generators and small oracles.

#include <random>

#include <dressforge/factorization.hpp>
#include <dressforge/loop.hpp>

namespace dressforge::testing {

using Rng = std::mt19937_64;

inline cplx random_cplx(Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

// Random twisted sl(2,C) Laurent polynomial: trace-free, diagonal on even
// exponents, off-diagonal on odd ones.  Coefficients shrink with |n| so that
// exponentials stay comfortably inside the truncation window.
inline MatrixLoop random_twisted_sl2(Rng& rng, int degree, double scale = 0.4) {
  MatrixLoop x(-degree, degree);
  for (int n = -degree; n <= degree; ++n) {
    const double s = scale / std::pow(1.0 + std::abs(n), 3);
    if (((n % 2) + 2) % 2 == 0) {
      const cplx a = random_cplx(rng, s);
      x.set_diag(n, a, -a);
    } else {
      x.set_offdiag(n, random_cplx(rng, s), random_cplx(rng, s));
    }
  }
  return x;
}

// Random twisted group-valued loop (det = 1 up to truncation) as exp of a
// random twisted sl(2) loop.
inline MatrixLoop random_group_loop(Rng& rng, int degree,
                                    int trunc = kDefaultTruncation,
                                    double scale = 0.4) {
  return exp_loop(random_twisted_sl2(rng, degree, scale), -trunc, trunc);
}

// Random plus-class twisted group loop with value at 0 of determinant 1.
inline MatrixLoop random_plus_loop(Rng& rng, int degree,
                                   int trunc = kDefaultTruncation,
                                   double scale = 0.4) {
  MatrixLoop x(0, degree);
  for (int n = 0; n <= degree; ++n) {
    const double s = scale / std::pow(1.0 + n, 3.0);
    if (n % 2 == 0) {
      const cplx a = random_cplx(rng, s);
      x.set_diag(n, a, -a);
    } else {
      x.set_offdiag(n, random_cplx(rng, s), random_cplx(rng, s));
    }
  }
  return exp_loop(x, 0, trunc);
}

// Random based minus-class twisted group loop.
inline MatrixLoop random_minus_based_loop(Rng& rng, int degree,
                                          int trunc = kDefaultTruncation,
                                          double scale = 0.4) {
  MatrixLoop x(-degree, -1);
  for (int n = -degree; n <= -1; ++n) {
    const double s = scale / std::pow(1.0 - n, 3.0);
    if (((n % 2) + 2) % 2 == 0) {
      const cplx a = random_cplx(rng, s);
      x.set_diag(n, a, -a);
    } else {
      x.set_offdiag(n, random_cplx(rng, s), random_cplx(rng, s));
    }
  }
  return exp_loop(x, -trunc, 0);
}

// The antidiag(lambda, lambda^{-1}) loop used across the cylinder examples.
inline MatrixLoop antidiag_pair(cplx upper, cplx lower) {
  MatrixLoop g(-1, 1);
  g.set_offdiag(1, upper, 0.0);
  g.set_offdiag(-1, 0.0, lower);
  return g;
}

}  // namespace dressforge::testing
