#pragma once

// Birkhoff factorization into the big cell and Iwasawa decomposition of
// twisted loops.  Both splittings are normalized: the Birkhoff minus factor
// is based (coefficient I at lambda^0), the Iwasawa plus factor takes its
// lambda=0 value in B = {upper triangular, positive real diagonal}.

#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "loop.hpp"

namespace dressforge {

inline constexpr double kBigCellCondThreshold = 1e12;
inline constexpr double kFactorResidualTol = 1e-9;

struct BirkhoffResult {
  MatrixLoop g_minus;  // class minus_based
  MatrixLoop g_plus;   // class plus
  double residual = 0.0;
  bool in_big_cell = false;
  double condition_estimate = 0.0;
};

struct IwasawaResult {
  MatrixLoop unitary_part;  // class unitary
  MatrixLoop plus_part;     // class plus, value at lambda=0 in B
  double residual = 0.0;
};

namespace detail {

// Max coefficient deviation of multiply(a,b) from g over g's support plus
// the spill modes of the product.
inline double recompose_residual(const MatrixLoop& a, const MatrixLoop& b,
                                 const MatrixLoop& g) {
  return (multiply(a, b) - g).norm_inf();
}

}  // namespace detail

// Solves for the based minus loop u = g_minus^{-1} from the linear condition
// that all negative Fourier modes of u*g vanish.  Row i of u*g only involves
// row i of u, so the problem splits into two block-Toeplitz systems, one per
// matrix row; their worst condition number is the big-cell detector.
inline BirkhoffResult birkhoff(const MatrixLoop& g, int depth = kDefaultTruncation) {
  const int N = std::max(depth, -g.n_min());
  BirkhoffResult out;

  // Unknowns per row: u_{-k}, k = 1..N (row 2-vectors); u_0 = e_i.
  // Equations: modes -1..-N of (u g) vanish.
  MatrixLoop u(-N, 0);
  u.set(0, Mat2::Identity());
  double cond_max = 0.0;
  for (int row = 0; row < 2; ++row) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * N);
    for (int m = 1; m <= N; ++m) {  // equation: mode -m
      for (int k = 1; k <= N; ++k) {
        const Mat2 gm = g.at(-m + k);  // u_{-k} g_{-m+k}
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q)
            A(2 * (m - 1) + q, 2 * (k - 1) + p) = gm(p, q);
      }
      const Mat2 g0 = g.at(-m);
      for (int q = 0; q < 2; ++q) rhs(2 * (m - 1) + q) = -g0(row, q);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    const double cond = (smin <= 0.0) ? std::numeric_limits<double>::infinity()
                                      : smax / smin;
    cond_max = std::max(cond_max, cond);
    if (cond > kBigCellCondThreshold) {
      out.in_big_cell = false;
      out.condition_estimate = cond_max;
      return out;
    }
    const Eigen::VectorXcd x = svd.solve(rhs);
    for (int k = 1; k <= N; ++k) {
      Mat2 uk = u.at(-k);
      uk(row, 0) = x(2 * (k - 1));
      uk(row, 1) = x(2 * (k - 1) + 1);
      u.set(-k, uk);
    }
  }

  out.condition_estimate = cond_max;
  out.in_big_cell = true;
  out.g_minus = inverse_minus_based(u);
  out.g_plus = multiply(u, g).truncated(0, std::max(0, g.n_max() + N)).trimmed(0.0);
  out.residual = detail::recompose_residual(out.g_minus, out.g_plus, g);
  return out;
}

// Iwasawa g = F g_+ via spectral factorization of P = g* g = g_+* g_+ by
// Newton iteration on Fourier coefficients, then F = g g_+^{-1}.
//
// Newton step: with residual R = P - S* S and Y = S^{-*} R S^{-1} (Hermitian
// as a loop: Y_{-n} = Y_n^H), the update X solves X + X* = Y within the plus
// algebra, with the zero-mode folded into the tangent space of B so the
// normalization g_+(0) in B is preserved.  Initial guess: Cholesky of the
// zero mode of P (diagonal by twisting, positive by positivity of P).
inline IwasawaResult iwasawa(const MatrixLoop& g, int depth = kDefaultTruncation,
                             int max_iter = 60, double tol = 1e-13) {
  const int N = std::max({depth, g.n_max(), -g.n_min()}) + 8;
  const MatrixLoop P = multiply(g.adjoint(), g);

  const Mat2 P0 = P.at(0);
  if (P0(0, 0).real() <= 0.0 || P0(1, 1).real() <= 0.0)
    throw std::runtime_error("iwasawa: input not invertible on the circle");
  MatrixLoop S(0, N);
  S.set_diag(0, std::sqrt(P0(0, 0).real()), std::sqrt(P0(1, 1).real()));

  double res = 0.0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const MatrixLoop SS = multiply(S.adjoint(), S);
    const MatrixLoop R = (P - SS).truncated(-N, N);
    res = R.norm_inf();
    if (res < tol) {
      converged = true;
      break;
    }
    const MatrixLoop Sinv = inverse_plus(S);
    const MatrixLoop Y =
        multiply(multiply(Sinv.adjoint(), R), Sinv).truncated(-N, N);
    MatrixLoop X(0, N);
    for (int n = 1; n <= N; ++n) X.set(n, Y.at(n));
    // Zero mode: X0 upper triangular with real diagonal, X0 + X0^H = Y0.
    Mat2 Y0 = Y.at(0);  // diagonal by twisting, Hermitian by construction
    Mat2 X0 = Mat2::Zero();
    X0(0, 0) = 0.5 * Y0(0, 0).real();
    X0(1, 1) = 0.5 * Y0(1, 1).real();
    X0(0, 1) = Y0(0, 1);
    X.set(0, X0);
    S = (S + multiply(X, S).truncated(0, N)).truncated(0, N);
  }
  if (!converged && res > 1e-9)
    throw std::runtime_error("iwasawa: Newton iteration failed to converge, residual " +
                             std::to_string(res));

  IwasawaResult out;
  out.plus_part = S.trimmed(0.0);
  const MatrixLoop Sinv = inverse_plus(S);
  out.unitary_part = multiply(g, Sinv).truncated(g.n_min() - 2, N).trimmed(1e-15);
  out.residual = detail::recompose_residual(out.unitary_part, out.plus_part, g);
  return out;
}

}  // namespace dressforge
