#pragma once

// Complex rational functions of z: the coefficient field for meromorphic
// potentials and the isotropy recursion.  Coefficients are double-precision
// complex; multiplicity bookkeeping (normalization, orders, the square test)
// goes through companion-matrix roots with cluster tolerance kRootClusterTol.

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace dressforge {

using cplx = std::complex<double>;

inline constexpr double kRootClusterTol = 1e-8;

namespace poly {

using Poly = std::vector<cplx>;  // ascending degree; empty or {0} is zero

inline Poly trimmed(Poly p, double tol = 0.0) {
  while (p.size() > 1 && std::abs(p.back()) <= tol) p.pop_back();
  if (p.empty()) p.push_back(cplx(0.0));
  return p;
}

inline bool is_zero(const Poly& p) {
  for (const cplx& c : p)
    if (c != cplx(0.0)) return false;
  return true;
}

inline int degree(const Poly& p) { return static_cast<int>(trimmed(p).size()) - 1; }

inline cplx eval(const Poly& p, cplx z) {
  cplx acc(0.0);
  for (size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

inline Poly add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), cplx(0.0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return trimmed(r);
}

inline Poly sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), cplx(0.0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return trimmed(r);
}

inline Poly mul(const Poly& a, const Poly& b) {
  if (is_zero(a) || is_zero(b)) return {cplx(0.0)};
  Poly r(a.size() + b.size() - 1, cplx(0.0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly scale(const Poly& a, cplx s) {
  Poly r = a;
  for (cplx& c : r) c *= s;
  return r;
}

inline Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {cplx(0.0)};
  Poly r(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) r[i - 1] = static_cast<double>(i) * p[i];
  return r;
}

inline Poly from_roots(const std::vector<cplx>& roots, cplx lead = cplx(1.0)) {
  Poly r{lead};
  for (const cplx& root : roots) {
    Poly next(r.size() + 1, cplx(0.0));
    for (size_t i = 0; i < r.size(); ++i) {
      next[i + 1] += r[i];
      next[i] -= root * r[i];
    }
    r = next;
  }
  return r;
}

// Roots via companion-matrix eigenvalues.
inline std::vector<cplx> roots(const Poly& p_in) {
  const Poly p = trimmed(p_in, 0.0);
  const int d = static_cast<int>(p.size()) - 1;
  if (d <= 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -p[static_cast<size_t>(i)] / p.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> r(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) r[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return r;
}

struct RootCluster {
  cplx location;
  int multiplicity;
};

// A multiplicity-m root scatters the companion eigenvalues by roughly
// eps^(1/m), so the merge radius has to grow with the cluster size.  Cluster
// centers are polished by Newton on the (m-1)-th derivative, where the root
// is simple again.
inline std::vector<RootCluster> clustered_roots(const Poly& p,
                                                double tol = kRootClusterTol) {
  std::vector<cplx> rs = roots(p);
  auto radius_for = [tol](int m, double mag) {
    return std::max(tol, 50.0 * std::pow(1e-16, 1.0 / m) * (1.0 + mag));
  };
  std::vector<RootCluster> out;
  std::vector<bool> used(rs.size(), false);
  for (size_t i = 0; i < rs.size(); ++i) {
    if (used[i]) continue;
    // Hypothesize the largest multiplicity whose scatter radius actually
    // contains that many eigenvalues around rs[i].
    std::vector<size_t> members;
    for (int m_try = static_cast<int>(rs.size()); m_try >= 1; --m_try) {
      members.clear();
      const double radius = radius_for(m_try, std::abs(rs[i]));
      for (size_t j = 0; j < rs.size(); ++j)
        if (!used[j] && std::abs(rs[j] - rs[i]) < radius) members.push_back(j);
      if (static_cast<int>(members.size()) >= m_try) break;
    }
    cplx center = 0.0;
    for (size_t j : members) {
      center += rs[j];
      used[j] = true;
    }
    const int count = static_cast<int>(members.size());
    center /= static_cast<double>(count);
    if (count > 1) {
      Poly w = p;
      for (int k = 1; k < count; ++k) w = derivative(w);
      const Poly dw = derivative(w);
      cplx zc = center;
      for (int it = 0; it < 30; ++it) {
        const cplx dv = eval(dw, zc);
        if (std::abs(dv) < 1e-14) break;
        const cplx step = eval(w, zc) / dv;
        zc -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(zc))) break;
      }
      if (std::abs(zc - center) < radius_for(count, std::abs(center))) center = zc;
    }
    out.push_back({center, count});
  }
  return out;
}

// Taylor coefficients of p around z0 (ascending), via repeated Horner.
inline Poly taylor_shift(const Poly& p, cplx z0) {
  Poly w = trimmed(p);
  Poly out(w.size(), cplx(0.0));
  for (size_t k = 0; k < out.size(); ++k) {
    const size_t d = w.size();
    if (d == 1) {
      out[k] = w[0];
      break;
    }
    // synthetic division of w by (z - z0); the remainder is a coefficient
    Poly q(d - 1);
    cplx carry = w[d - 1];
    for (size_t i = d - 1; i-- > 0;) {
      q[i] = carry;
      carry = w[i] + z0 * carry;
    }
    out[k] = carry;
    w = std::move(q);
  }
  return out;
}

}  // namespace poly

struct LocalLaurent {
  cplx center = 0.0;
  int k_min = 0;  // leading exponent (order at the center)
  std::vector<cplx> coeffs;  // ascending from k_min; empty means identically 0

  cplx coeff(int k) const {
    const int idx = k - k_min;
    if (idx < 0 || idx >= static_cast<int>(coeffs.size())) return 0.0;
    return coeffs[static_cast<size_t>(idx)];
  }
  bool is_zero() const { return coeffs.empty(); }
  int order() const { return k_min; }
};

class RationalFunction {
 public:
  RationalFunction() : num_{cplx(0.0)}, den_{cplx(1.0)} {}

  RationalFunction(poly::Poly num, poly::Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (poly::is_zero(den_))
      throw std::invalid_argument("RationalFunction: zero denominator");
    normalize();
  }

  static RationalFunction constant(cplx c) { return RationalFunction({c}, {cplx(1.0)}); }
  static RationalFunction variable() { return RationalFunction({cplx(0.0), cplx(1.0)}, {cplx(1.0)}); }
  static RationalFunction monomial(int power) {
    if (power >= 0) {
      poly::Poly p(static_cast<size_t>(power) + 1, cplx(0.0));
      p.back() = 1.0;
      return RationalFunction(p, {cplx(1.0)});
    }
    poly::Poly q(static_cast<size_t>(-power) + 1, cplx(0.0));
    q.back() = 1.0;
    return RationalFunction({cplx(1.0)}, q);
  }

  const poly::Poly& num() const { return num_; }
  const poly::Poly& den() const { return den_; }
  bool is_zero() const { return poly::is_zero(num_); }

  cplx operator()(cplx z) const { return poly::eval(num_, z) / poly::eval(den_, z); }

  RationalFunction operator+(const RationalFunction& o) const {
    return RationalFunction(
        poly::add(poly::mul(num_, o.den_), poly::mul(o.num_, den_)),
        poly::mul(den_, o.den_));
  }
  RationalFunction operator-(const RationalFunction& o) const {
    return RationalFunction(
        poly::sub(poly::mul(num_, o.den_), poly::mul(o.num_, den_)),
        poly::mul(den_, o.den_));
  }
  RationalFunction operator*(const RationalFunction& o) const {
    return RationalFunction(poly::mul(num_, o.num_), poly::mul(den_, o.den_));
  }
  RationalFunction operator/(const RationalFunction& o) const {
    if (o.is_zero()) throw std::domain_error("RationalFunction: division by zero function");
    return RationalFunction(poly::mul(num_, o.den_), poly::mul(den_, o.num_));
  }
  RationalFunction operator-() const {
    return RationalFunction(poly::scale(num_, -1.0), den_);
  }
  // Cross-multiplied coefficient comparison; avoids the root-cancelling
  // normalization, which can amplify a near-zero numerator.
  bool near_equal(const RationalFunction& o, double tol = 1e-9) const {
    const poly::Poly a = poly::mul(num_, o.den_);
    const poly::Poly b = poly::mul(o.num_, den_);
    double scale = 1.0, worst = 0.0;
    for (const cplx& c : a) scale = std::max(scale, std::abs(c));
    for (const cplx& c : b) scale = std::max(scale, std::abs(c));
    for (const cplx& c : poly::sub(a, b)) worst = std::max(worst, std::abs(c));
    return worst <= tol * scale;
  }

  // Derivative via the factored denominator: with d = lc * prod (z-r_i)^m_i,
  // (n/d)' = (n' w - n s) / (d w) where w = prod (z-r_i) and
  // s = sum_i m_i prod_{j!=i}(z-r_j).  This grows the denominator by one
  // power per distinct root instead of squaring it, which keeps repeated
  // derivatives (ubiquitous in the recursion machinery) at bounded degree.
  // Falls back to the plain quotient rule when the factorization is shaky.
  RationalFunction derivative() const {
    const poly::Poly dn = poly::derivative(num_);
    if (poly::degree(den_) == 0)
      return RationalFunction(poly::scale(dn, cplx(1.0) / den_[0]), {cplx(1.0)});
    const auto clusters = poly::clustered_roots(den_);
    std::vector<cplx> all;
    for (const auto& c : clusters)
      for (int k = 0; k < c.multiplicity; ++k) all.push_back(c.location);
    const poly::Poly recon = poly::from_roots(all, poly::trimmed(den_).back());
    double scale = 0.0, err = 0.0;
    for (const cplx& c : den_) scale = std::max(scale, std::abs(c));
    for (const cplx& c : poly::sub(recon, den_)) err = std::max(err, std::abs(c));
    if (static_cast<int>(all.size()) != poly::degree(den_) || err > 1e-8 * scale)
      return RationalFunction(
          poly::sub(poly::mul(dn, den_), poly::mul(num_, poly::derivative(den_))),
          poly::mul(den_, den_));
    std::vector<cplx> distinct;
    for (const auto& c : clusters) distinct.push_back(c.location);
    const poly::Poly w = poly::from_roots(distinct, cplx(1.0));
    poly::Poly s{cplx(0.0)};
    for (size_t i = 0; i < clusters.size(); ++i) {
      std::vector<cplx> rest;
      for (size_t j = 0; j < clusters.size(); ++j)
        if (j != i) rest.push_back(clusters[j].location);
      s = poly::add(s, poly::from_roots(rest, cplx(clusters[i].multiplicity)));
    }
    return RationalFunction(poly::sub(poly::mul(dn, w), poly::mul(num_, s)),
                            poly::mul(den_, w));
  }

  // Integer order at z0: multiplicity as a zero (positive) or pole (negative).
  int order_at(cplx z0) const {
    if (is_zero()) throw std::domain_error("order_at: zero function");
    return local_multiplicity(num_, z0) - local_multiplicity(den_, z0);
  }

  nlohmann::json to_json() const {
    auto dump = [](const poly::Poly& p) {
      nlohmann::json a = nlohmann::json::array();
      for (const cplx& c : p) a.push_back({c.real(), c.imag()});
      return a;
    };
    return {{"num", dump(num_)}, {"den", dump(den_)}};
  }

  static RationalFunction from_json(const nlohmann::json& j) {
    auto load = [](const nlohmann::json& a) {
      poly::Poly p;
      for (const auto& c : a) p.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      return p;
    };
    return RationalFunction(load(j.at("num")), load(j.at("den")));
  }

 private:
  double coeff_scale() const {
    double m = 0.0;
    for (const cplx& c : num_) m = std::max(m, std::abs(c));
    return m;
  }

  static int local_multiplicity(const poly::Poly& p, cplx z0,
                                double tol = kRootClusterTol) {
    int count = 0;
    for (const auto& rc : poly::clustered_roots(p, tol))
      if (std::abs(rc.location - z0) <
          std::max(tol, 5e-6 * (1.0 + std::abs(z0))) * 2.0)
        count += rc.multiplicity;
    return count;
  }

  // Monic denominator; cancel root clusters shared by numerator and
  // denominator (the double-precision surrogate for gcd removal).
  void normalize() {
    num_ = poly::trimmed(num_, 0.0);
    den_ = poly::trimmed(den_, 0.0);
    if (poly::is_zero(num_)) {
      num_ = {cplx(0.0)};
      den_ = {cplx(1.0)};
      return;
    }
    // Root-based cancellation costs an eigensolve per polynomial; above this
    // degree the roots are too ill-conditioned to cancel reliably anyway, so
    // keep the unreduced representation.
    constexpr int kCancelDegreeCap = 48;
    if (poly::degree(num_) > 0 && poly::degree(den_) > 0 &&
        poly::degree(num_) <= kCancelDegreeCap &&
        poly::degree(den_) <= kCancelDegreeCap) {
      std::vector<cplx> nr = poly::roots(num_);
      std::vector<cplx> dr = poly::roots(den_);
      std::vector<bool> ncut(nr.size(), false), dcut(dr.size(), false);
      bool cancelled = false;
      for (size_t i = 0; i < nr.size(); ++i) {
        for (size_t j = 0; j < dr.size(); ++j) {
          if (!dcut[j] &&
              std::abs(nr[i] - dr[j]) < 1e-7 * (1.0 + std::abs(nr[i]))) {
            ncut[i] = true;
            dcut[j] = true;
            cancelled = true;
            break;
          }
        }
      }
      if (cancelled) {
        std::vector<cplx> nkeep, dkeep;
        for (size_t i = 0; i < nr.size(); ++i)
          if (!ncut[i]) nkeep.push_back(nr[i]);
        for (size_t j = 0; j < dr.size(); ++j)
          if (!dcut[j]) dkeep.push_back(dr[j]);
        num_ = poly::from_roots(nkeep, num_.back());
        den_ = poly::from_roots(dkeep, den_.back());
      }
    }
    const cplx lead = den_.back();
    num_ = poly::scale(num_, cplx(1.0) / lead);
    den_ = poly::scale(den_, cplx(1.0) / lead);
    den_.back() = 1.0;  // pin the monic coefficient exactly
  }

  poly::Poly num_, den_;
};

enum class RationalOp { add, sub, mul, div };

inline RationalFunction arith(const RationalFunction& a, const RationalFunction& b,
                              RationalOp op) {
  switch (op) {
    case RationalOp::add: return a + b;
    case RationalOp::sub: return a - b;
    case RationalOp::mul: return a * b;
    case RationalOp::div: return a / b;
  }
  throw std::logic_error("arith: bad op");
}

inline RationalFunction derivative(const RationalFunction& a) { return a.derivative(); }

// Order of f at z0 == residue of f'/f there.
inline int log_derivative_residue(const RationalFunction& f, cplx z0) {
  return f.order_at(z0);
}

struct SquareTestResult {
  bool is_square = false;
  RationalFunction sqrt;  // valid only when is_square
};

// E is a square of a meromorphic (here: rational) function iff every zero and
// pole has even multiplicity; the leading ratio is always a square over C.
inline SquareTestResult square_test(const RationalFunction& E) {
  if (E.is_zero()) throw std::domain_error("square_test: zero function");
  SquareTestResult out;
  const auto nr = poly::clustered_roots(E.num());
  const auto dr = poly::clustered_roots(E.den());
  for (const auto& c : nr)
    if (c.multiplicity % 2 != 0) return out;
  for (const auto& c : dr)
    if (c.multiplicity % 2 != 0) return out;
  std::vector<cplx> nhalf, dhalf;
  for (const auto& c : nr)
    for (int k = 0; k < c.multiplicity / 2; ++k) nhalf.push_back(c.location);
  for (const auto& c : dr)
    for (int k = 0; k < c.multiplicity / 2; ++k) dhalf.push_back(c.location);
  const cplx lead = poly::trimmed(E.num()).back();  // den is monic
  out.is_square = true;
  out.sqrt = RationalFunction(poly::from_roots(nhalf, std::sqrt(lead)),
                              poly::from_roots(dhalf));
  return out;
}

// Laurent expansion of a at z0 through `depth` terms past the leading order.
inline LocalLaurent local_expand(const RationalFunction& a, cplx z0, int depth) {
  if (depth < 1) throw std::invalid_argument("local_expand: depth >= 1 required");
  LocalLaurent out;
  out.center = z0;
  if (a.is_zero()) return out;

  poly::Poly n = poly::taylor_shift(a.num(), z0);
  poly::Poly d = poly::taylor_shift(a.den(), z0);
  auto leading = [](const poly::Poly& p) {
    const double scale = [&] {
      double m = 0.0;
      for (const cplx& c : p) m = std::max(m, std::abs(c));
      return m;
    }();
    for (size_t i = 0; i < p.size(); ++i)
      if (std::abs(p[i]) > 1e-10 * scale) return static_cast<int>(i);
    return static_cast<int>(p.size());
  };
  const int on = leading(n), od = leading(d);
  n.erase(n.begin(), n.begin() + on);
  d.erase(d.begin(), d.begin() + od);
  out.k_min = on - od;

  // series division n/d to `depth` terms
  std::vector<cplx> q(static_cast<size_t>(depth), cplx(0.0));
  for (int k = 0; k < depth; ++k) {
    cplx acc = (k < static_cast<int>(n.size())) ? n[static_cast<size_t>(k)] : cplx(0.0);
    for (int j = 0; j < k; ++j) {
      const int di = k - j;
      if (di < static_cast<int>(d.size())) acc -= q[static_cast<size_t>(j)] * d[static_cast<size_t>(di)];
    }
    q[static_cast<size_t>(k)] = acc / d[0];
  }
  out.coeffs = std::move(q);
  return out;
}

}  // namespace dressforge
