#pragma once

// Twisted 2x2 matrix Laurent loops: the shared substrate of the toolkit.
//
// A MatrixLoop is a finite Laurent series sum_n A_n lambda^n with 2x2 complex
// coefficients subject to the twisting condition g(-lambda) = s3 g(lambda) s3:
// diagonal entries live on even powers, off-diagonal entries on odd powers.
// Storage exploits this parity, so a parity violation cannot be represented.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace dressforge {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kDetTol = 1e-9;      // |det - 1| on circle samples
inline constexpr double kUnitaryTol = 1e-9;  // ||F*F - I|| on circle samples
inline constexpr int kCircleSamples = 64;
inline constexpr int kDefaultTruncation = 16;  // exponents per side
inline constexpr double kTailTol = 1e-10;      // truncation-suspect monitor

class MatrixLoop {
 public:
  MatrixLoop() : nmin_(0), nmax_(0), coef_(1, Eigen::Vector2cd::Zero()) {}

  MatrixLoop(int nmin, int nmax)
      : nmin_(nmin), nmax_(nmax),
        coef_(static_cast<size_t>(nmax - nmin + 1), Eigen::Vector2cd::Zero()) {
    if (nmax < nmin) throw std::invalid_argument("MatrixLoop: empty range");
  }

  static MatrixLoop identity() {
    MatrixLoop g(0, 0);
    g.coef_[0] = Eigen::Vector2cd(1.0, 1.0);
    return g;
  }

  int n_min() const { return nmin_; }
  int n_max() const { return nmax_; }

  // Coefficient of lambda^n, reconstructed from the parity-packed storage.
  Mat2 at(int n) const {
    Mat2 m = Mat2::Zero();
    if (n < nmin_ || n > nmax_) return m;
    const Eigen::Vector2cd& v = coef_[static_cast<size_t>(n - nmin_)];
    if (even(n)) {
      m(0, 0) = v(0);
      m(1, 1) = v(1);
    } else {
      m(0, 1) = v(0);
      m(1, 0) = v(1);
    }
    return m;
  }

  // Stores the parity-conforming part of m; rejects genuine parity violations.
  void set(int n, const Mat2& m) {
    require_in_range(n);
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    Eigen::Vector2cd& v = coef_[static_cast<size_t>(n - nmin_)];
    if (even(n)) {
      if (std::abs(m(0, 1)) > 1e-7 * scale || std::abs(m(1, 0)) > 1e-7 * scale)
        throw std::invalid_argument("MatrixLoop::set: twisting violation at even exponent");
      v = Eigen::Vector2cd(m(0, 0), m(1, 1));
    } else {
      if (std::abs(m(0, 0)) > 1e-7 * scale || std::abs(m(1, 1)) > 1e-7 * scale)
        throw std::invalid_argument("MatrixLoop::set: twisting violation at odd exponent");
      v = Eigen::Vector2cd(m(0, 1), m(1, 0));
    }
  }

  void set_diag(int n, cplx a00, cplx a11) {
    require_in_range(n);
    if (!even(n)) throw std::invalid_argument("set_diag: odd exponent");
    coef_[static_cast<size_t>(n - nmin_)] = Eigen::Vector2cd(a00, a11);
  }

  void set_offdiag(int n, cplx a01, cplx a10) {
    require_in_range(n);
    if (even(n)) throw std::invalid_argument("set_offdiag: even exponent");
    coef_[static_cast<size_t>(n - nmin_)] = Eigen::Vector2cd(a01, a10);
  }

  void add_to(int n, const Mat2& m) { set(n, at(n) + m); }

  Mat2 evaluate(cplx lambda0) const {
    if (lambda0 == cplx(0.0) && nmin_ < 0)
      throw std::domain_error("MatrixLoop::evaluate: lambda=0 with negative exponents");
    // Horner over the exponent range.
    Mat2 acc = Mat2::Zero();
    for (int n = nmax_; n >= nmin_; --n) {
      if (n < nmax_) acc *= lambda0;
      acc += at(n);
    }
    if (nmin_ != 0) acc *= std::pow(lambda0, nmin_);
    return acc;
  }

  // g*(lambda): conjugate-transpose coefficients, negate exponents.
  // On |lambda|=1, evaluate(adjoint(g), l) == evaluate(g, l)^H.
  MatrixLoop adjoint() const {
    MatrixLoop r(-nmax_, -nmin_);
    for (int n = nmin_; n <= nmax_; ++n) r.set(-n, at(n).adjoint());
    return r;
  }

  MatrixLoop truncated(int nmin, int nmax) const {
    MatrixLoop r(nmin, nmax);
    for (int n = std::max(nmin, nmin_); n <= std::min(nmax, nmax_); ++n) r.set(n, at(n));
    return r;
  }

  // Drops all-zero leading/trailing coefficients (never below a single term).
  MatrixLoop trimmed(double tol = 0.0) const {
    int lo = nmin_, hi = nmax_;
    while (lo < hi && coeff_abs(lo) <= tol) ++lo;
    while (hi > lo && coeff_abs(hi) <= tol) --hi;
    return truncated(lo, hi);
  }

  double coeff_abs(int n) const { return at(n).cwiseAbs().maxCoeff(); }

  double norm_inf() const {
    double m = 0.0;
    for (int n = nmin_; n <= nmax_; ++n) m = std::max(m, coeff_abs(n));
    return m;
  }

  // Tail-norm monitor: the finite surrogate for loop-space topology.  A loop
  // whose top two retained coefficients (on either side) carry mass is
  // suspect: the truncation window is too small for it.
  bool truncation_suspect(double tol = kTailTol) const {
    if (nmax_ - nmin_ < 3) return false;
    double lo = std::max(coeff_abs(nmin_), coeff_abs(nmin_ + 1));
    double hi = std::max(coeff_abs(nmax_), coeff_abs(nmax_ - 1));
    return std::max(lo, hi) > tol;
  }

  MatrixLoop operator+(const MatrixLoop& o) const {
    MatrixLoop r(std::min(nmin_, o.nmin_), std::max(nmax_, o.nmax_));
    for (int n = r.nmin_; n <= r.nmax_; ++n) r.set(n, at(n) + o.at(n));
    return r;
  }

  MatrixLoop operator-(const MatrixLoop& o) const {
    MatrixLoop r(std::min(nmin_, o.nmin_), std::max(nmax_, o.nmax_));
    for (int n = r.nmin_; n <= r.nmax_; ++n) r.set(n, at(n) - o.at(n));
    return r;
  }

  MatrixLoop operator*(cplx s) const {
    MatrixLoop r = *this;
    for (auto& v : r.coef_) v *= s;
    return r;
  }

  friend MatrixLoop operator*(cplx s, const MatrixLoop& g) { return g * s; }

  // det(g)(lambda) as a scalar Laurent polynomial, ascending exponents from
  // 2*nmin.  Twisting makes det even in lambda.
  std::vector<cplx> det_series() const {
    std::vector<cplx> d(static_cast<size_t>(2 * (nmax_ - nmin_) + 1), cplx(0.0));
    for (int i = nmin_; i <= nmax_; ++i)
      for (int j = nmin_; j <= nmax_; ++j) {
        Mat2 a = at(i), b = at(j);
        d[static_cast<size_t>(i + j - 2 * nmin_)] +=
            a(0, 0) * b(1, 1) - a(0, 1) * b(1, 0);
      }
    return d;
  }

  nlohmann::json to_json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (int n = nmin_; n <= nmax_; ++n) {
      Mat2 m = at(n);
      nlohmann::json entries = nlohmann::json::array();
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          entries.push_back({m(r, c).real(), m(r, c).imag()});
      coeffs.push_back({n, entries});
    }
    return {{"n_min", nmin_}, {"n_max", nmax_}, {"coeffs", coeffs}};
  }

  static MatrixLoop from_json(const nlohmann::json& j) {
    MatrixLoop g(j.at("n_min").get<int>(), j.at("n_max").get<int>());
    for (const auto& item : j.at("coeffs")) {
      int n = item.at(0).get<int>();
      const auto& e = item.at(1);
      Mat2 m;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          m(r, c) = cplx(e.at(2 * r + c).at(0).get<double>(),
                         e.at(2 * r + c).at(1).get<double>());
      g.set(n, m);
    }
    return g;
  }

 private:
  static bool even(int n) { return ((n % 2) + 2) % 2 == 0; }

  void require_in_range(int n) const {
    if (n < nmin_ || n > nmax_)
      throw std::out_of_range("MatrixLoop: exponent " + std::to_string(n) +
                              " outside [" + std::to_string(nmin_) + "," +
                              std::to_string(nmax_) + "]");
  }

  int nmin_, nmax_;
  std::vector<Eigen::Vector2cd> coef_;
};

// Cauchy-product convolution; result range is the Minkowski sum of operand
// ranges.  Truncation policy is the caller's business.
inline MatrixLoop multiply(const MatrixLoop& a, const MatrixLoop& b) {
  MatrixLoop r(a.n_min() + b.n_min(), a.n_max() + b.n_max());
  for (int i = a.n_min(); i <= a.n_max(); ++i) {
    Mat2 ai = a.at(i);
    if (ai.isZero(0.0)) continue;
    for (int j = b.n_min(); j <= b.n_max(); ++j) r.add_to(i + j, ai * b.at(j));
  }
  return r;
}

inline Mat2 evaluate(const MatrixLoop& g, cplx lambda0) { return g.evaluate(lambda0); }

inline MatrixLoop loop_adjoint(const MatrixLoop& g) { return g.adjoint(); }

inline cplx circle_sample(int k, int total = kCircleSamples) {
  const double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(total);
  return cplx(std::cos(t), std::sin(t));
}

inline bool is_group_valued(const MatrixLoop& g, double tol = kDetTol) {
  for (int k = 0; k < kCircleSamples; ++k)
    if (std::abs(g.evaluate(circle_sample(k)).determinant() - cplx(1.0)) > tol)
      return false;
  return true;
}

inline bool is_unitary_on_circle(const MatrixLoop& g, double tol = kUnitaryTol) {
  for (int k = 0; k < kCircleSamples; ++k) {
    Mat2 u = g.evaluate(circle_sample(k));
    if ((u.adjoint() * u - Mat2::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

struct LoopClass {
  enum class Kind { plus, plus_based, minus_based, unitary, general };
  Kind kind = Kind::general;
  double radius = 1.0;
};

// Exponent-range, base-point, and unitarity conditions of a loop class.
inline bool check_class(const MatrixLoop& g, const LoopClass& c,
                        double tol = kUnitaryTol) {
  const MatrixLoop t = g.trimmed(tol);
  switch (c.kind) {
    case LoopClass::Kind::plus:
      return t.n_min() >= 0;
    case LoopClass::Kind::plus_based:
      return t.n_min() >= 0 &&
             (t.at(0) - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
    case LoopClass::Kind::minus_based:
      return t.n_max() <= 0 &&
             (t.at(0) - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
    case LoopClass::Kind::unitary:
      return is_unitary_on_circle(g, tol);
    case LoopClass::Kind::general:
      return true;
  }
  return false;
}

// Inverse of a minus-based loop (n_max <= 0, coefficient at 0 = I) via the
// Neumann series; exact on the truncation since v^k only has exponents <= -k.
inline MatrixLoop inverse_minus_based(const MatrixLoop& g) {
  if (g.n_max() > 0)
    throw std::invalid_argument("inverse_minus_based: positive exponents present");
  const int depth = -g.n_min();
  MatrixLoop v = g;  // strictly negative part
  v.set(0, g.at(0) - Mat2::Identity());
  MatrixLoop acc = MatrixLoop::identity().truncated(g.n_min(), 0);
  MatrixLoop pw = acc;
  for (int k = 1; k <= depth; ++k) {
    pw = multiply(pw, v * cplx(-1.0)).truncated(g.n_min(), 0);
    acc = acc + pw;
  }
  return acc;
}

// Inverse of a plus-class loop with invertible value at lambda=0, truncated to
// the loop's own exponent range.
inline MatrixLoop inverse_plus(const MatrixLoop& g) {
  if (g.n_min() < 0)
    throw std::invalid_argument("inverse_plus: negative exponents present");
  const Mat2 g0 = g.at(0);
  if (std::abs(g0.determinant()) < 1e-14)
    throw std::invalid_argument("inverse_plus: singular value at lambda=0");
  const Mat2 g0inv = g0.inverse();
  MatrixLoop w(0, g.n_max());  // g0^{-1} g = I + w, w strictly positive modes
  for (int n = 1; n <= g.n_max(); ++n) w.set(n, g0inv * g.at(n));
  MatrixLoop acc = MatrixLoop::identity().truncated(0, g.n_max());
  MatrixLoop pw = acc;
  for (int k = 1; k <= g.n_max(); ++k) {
    pw = multiply(pw, w * cplx(-1.0)).truncated(0, g.n_max());
    acc = acc + pw;
  }
  // g^{-1} = (I + w)^{-1} g0^{-1}
  MatrixLoop r(0, g.n_max());
  for (int n = 0; n <= g.n_max(); ++n) r.set(n, acc.at(n) * g0inv);
  return r;
}

// exp of a twisted sl(2) loop, truncated to [nmin, nmax].
inline MatrixLoop exp_loop(const MatrixLoop& x, int nmin, int nmax, int terms = 40) {
  MatrixLoop acc = MatrixLoop::identity().truncated(nmin, nmax);
  MatrixLoop pw = acc;
  for (int k = 1; k <= terms; ++k) {
    pw = multiply(pw, x).truncated(nmin, nmax) * (1.0 / static_cast<double>(k));
    acc = acc + pw;
    if (pw.norm_inf() < 1e-18) break;
  }
  return acc;
}

}  // namespace dressforge
