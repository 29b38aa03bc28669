#pragma once

// Moebius symmetry machinery for the unit disk and the monodromy theory of
// automorphic potentials: the constant-coefficient obstruction, the quotient
// monodromy rho of an automorphic potential, its conjugation law under
// dressing, and the equivalence between surface symmetry and invariance of
// the holomorphic frame.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "dressing.hpp"
#include "dpw.hpp"
#include "loop.hpp"

namespace dressforge {

inline constexpr double kMoebiusNormTol = 1e-12;
inline constexpr double kSymmetryTol = 1e-8;

// Automorphism of the unit disk: z -> (a z + b) / (conj(b) z + conj(a)) with
// |a|^2 - |b|^2 = 1.  The pair (a, b) is kept normalized.
struct MoebiusMap {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  MoebiusMap() = default;
  MoebiusMap(cplx a_, cplx b_) : a(a_), b(b_) { renormalize(); }

  void renormalize() {
    const double det = std::norm(a) - std::norm(b);
    if (det <= 0.0)
      throw std::invalid_argument("MoebiusMap: |a|^2 - |b|^2 must be positive");
    const double s = std::sqrt(det);
    a /= s;
    b /= s;
  }

  bool normalized(double tol = kMoebiusNormTol) const {
    return std::abs(std::norm(a) - std::norm(b) - 1.0) <= tol;
  }

  cplx operator()(cplx z) const { return (a * z + b) / (std::conj(b) * z + std::conj(a)); }

  // d(gamma)/dz = 1 / (conj(b) z + conj(a))^2 for the normalized form.
  cplx derivative(cplx z) const {
    const cplx d = std::conj(b) * z + std::conj(a);
    return cplx(1.0) / (d * d);
  }

  MoebiusMap inverse() const { return MoebiusMap(std::conj(a), -b); }

  nlohmann::json to_json() const {
    return {{"a", {a.real(), a.imag()}}, {"b", {b.real(), b.imag()}}};
  }
};

inline cplx moebius(const MoebiusMap& m, cplx z) { return m(z); }

inline MoebiusMap compose(const MoebiusMap& m1, const MoebiusMap& m2) {
  // Matrix product of [[a, b], [conj(b), conj(a)]]; the result has the same
  // shape, so renormalizing the (a, b) pair suffices.
  const cplx a = m1.a * m2.a + m1.b * std::conj(m2.b);
  const cplx b = m1.a * m2.b + m1.b * std::conj(m2.a);
  return MoebiusMap(a, b);
}

// A disk automorphism has a fixed point inside the disk iff it is a rotation
// around the origin.
inline bool fixed_point_in_disk(const MoebiusMap& m, double tol = kMoebiusNormTol) {
  return std::abs(std::abs(m.a) - 1.0) <= tol && std::abs(m.b) <= tol;
}

// ---------------------------------------------------------------------------
// Obstruction for potentials with constant upper coefficient f == C > 0.
//
// If the extended frame of such a surface (with umbilics) transforms
// equivariantly under gamma, the triviality of the dressing isotropy forces
// an explicit plus factor
//   chi_+ = [[s/conj(a), 0], [conj(b) lambda / (C s), conj(a)/s]],  s = sqrt(C),
// and a minus factor ansatz chi_- = [[1, q lambda^{-1}], [0, 1]].  Unitarity
// of chi = chi_- chi_+ on the circle and the lambda^{-1} coefficient of the
// base-point condition yield four scalar constraints; they are simultaneously
// satisfiable only for C = 1, b = 0, |a| = 1 (a rotation).
struct SymmetryReport {
  bool admissible = false;
  double residual_q = 0.0;          // q + b / (conj(a) C)
  double residual_unitarity = 0.0;  // s/conj(a) + conj(b) q / (C s) - a/s
  double residual_modulus = 0.0;    // C - |b|^2/C^2 - |a|^2
  double residual_monodromy = 0.0;  // C b / conj(a) - q
  double chi_unitary_defect = 0.0;  // sup-norm defect of chi on the circle
  double c_value = 0.0;
  bool b_zero = false;
  double a_modulus = 0.0;

  nlohmann::json to_json() const {
    return {{"admissible", admissible},
            {"residual_q", residual_q},
            {"residual_unitarity", residual_unitarity},
            {"residual_modulus", residual_modulus},
            {"residual_monodromy", residual_monodromy},
            {"chi_unitary_defect", chi_unitary_defect},
            {"C", c_value},
            {"b_zero", b_zero},
            {"a_modulus", a_modulus}};
  }
};

inline SymmetryReport constant_f_obstruction(double C, const MoebiusMap& m,
                                             double tol = kSymmetryTol) {
  if (C <= 0.0) throw std::invalid_argument("constant_f_obstruction: C must be positive");
  if (!m.normalized()) throw std::invalid_argument("constant_f_obstruction: invalid MoebiusMap");
  SymmetryReport rep;
  const double s = std::sqrt(C);
  const cplx abar = std::conj(m.a);
  const cplx bbar = std::conj(m.b);
  const cplx q = -m.b / (abar * C);  // forced by unitarity of the off-diagonal
  const cplx q_monodromy = C * m.b / abar;
  rep.residual_q = std::abs(q + m.b / (abar * C));
  rep.residual_unitarity = std::abs(s / abar + bbar * q / (C * s) - m.a / s);
  rep.residual_modulus = std::abs(C - std::norm(m.b) / (C * C) - std::norm(m.a));
  rep.residual_monodromy = std::abs(q_monodromy - q);
  rep.c_value = C;
  rep.b_zero = std::abs(m.b) <= tol;
  rep.a_modulus = std::abs(m.a);

  // Cross-check: assemble chi = chi_- chi_+ as a loop and measure how far it
  // is from unitary on the circle.
  MatrixLoop chi_plus(0, 1);
  chi_plus.set(0, (Mat2() << s / abar, 0.0, 0.0, abar / s).finished());
  chi_plus.set(1, (Mat2() << 0.0, 0.0, bbar / (C * s), 0.0).finished());
  MatrixLoop chi_minus(-1, 0);
  chi_minus.set(0, Mat2::Identity());
  chi_minus.set(-1, (Mat2() << 0.0, q, 0.0, 0.0).finished());
  const MatrixLoop chi = multiply(chi_minus, chi_plus);
  double defect = 0.0;
  for (int k = 0; k < kCircleSamples; ++k) {
    const Mat2 u = chi.evaluate(circle_sample(k));
    defect = std::max(defect, (u * u.adjoint() - Mat2::Identity()).cwiseAbs().maxCoeff());
  }
  rep.chi_unitary_defect = defect;

  rep.admissible = rep.residual_q <= tol && rep.residual_unitarity <= tol &&
                   rep.residual_modulus <= tol && rep.residual_monodromy <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Automorphic potentials: E(gamma(z)) = gamma'(z)^{-2} E(z) and
// f(gamma(z)) = gamma'(z)^{-1} f(z).

using Automorphism = std::function<cplx(cplx)>;

namespace detail {

inline std::vector<cplx> automorphic_samples(const MeromorphicPotential& xi, double radius) {
  std::vector<cplx> pts;
  const std::vector<cplx> bad = xi.singular_points();
  for (int k = 0; k < 40; ++k) {
    const double th = 2.0 * M_PI * (k + 0.3) / 40.0;
    const double r = radius * (0.35 + 0.6 * ((k * 7) % 11) / 11.0);
    const cplx z = std::polar(r, th);
    bool ok = std::abs(z) > 1e-3;
    for (const cplx& p : bad)
      if (std::abs(z - p) < 5e-2) ok = false;
    if (ok) pts.push_back(z);
  }
  return pts;
}

}  // namespace detail

inline bool automorphic_check(const MeromorphicPotential& xi, const Automorphism& gamma,
                              const Automorphism& dgamma, double tol = 1e-10) {
  const double radius = xi.domain == Domain::disk ? 0.8 : 1.5;
  const std::vector<cplx> pts = detail::automorphic_samples(xi, radius);
  if (pts.empty()) throw std::runtime_error("automorphic_check: no usable sample points");
  for (const cplx& z : pts) {
    const cplx w = gamma(z);
    const cplx dg = dgamma(z);
    if (xi.domain == Domain::disk && std::abs(w) >= 1.0) continue;
    const cplx ez = xi.E(z), ew = xi.E(w);
    const cplx fz = xi.f(z), fw = xi.f(w);
    const double escale = std::max(1.0, std::max(std::abs(ez), std::abs(ew)));
    const double fscale = std::max(1.0, std::max(std::abs(fz), std::abs(fw)));
    if (std::abs(ew - ez / (dg * dg)) > tol * escale) return false;
    if (std::abs(fw - fz / dg) > tol * fscale) return false;
  }
  return true;
}

inline bool automorphic_check(const MeromorphicPotential& xi, const MoebiusMap& m,
                              double tol = 1e-10) {
  return automorphic_check(
      xi, [&m](cplx z) { return m(z); }, [&m](cplx z) { return m.derivative(z); }, tol);
}

// ---------------------------------------------------------------------------
// Monodromy of an automorphic potential: the integral g_-^0 of xi_0 satisfies
// g_-^0(gamma(z)) = rho_-^0 g_-^0(z) with rho_-^0 independent of z and based
// at the identity in its lambda^0 coefficient.

struct MonodromyRecord {
  MatrixLoop rho_minus_0;
  double consistency = 0.0;  // max deviation of the quotient across base points
  double based_defect = 0.0; // distance of the lambda^0 coefficient from I
  std::vector<cplx> base_points;

  nlohmann::json to_json() const {
    nlohmann::json bp = nlohmann::json::array();
    for (const cplx& z : base_points) bp.push_back({z.real(), z.imag()});
    return {{"rho_minus_0", rho_minus_0.to_json()},
            {"consistency", consistency},
            {"based_defect", based_defect},
            {"base_points", bp}};
  }
};

namespace detail {

// Continues the solution g of dg = g xi from `from` to `to` along a polyline
// that stays away from a potential pole at the origin: radially to |to|, then
// along the circular arc through the smaller angle.
inline void continue_along(MatrixLoop& g, const MeromorphicPotential& xi, cplx from, cplx to,
                           int depth) {
  const double r0 = std::abs(from), r1 = std::abs(to);
  if (r1 < 1e-12 || r0 < 1e-12) {
    integrate_segment(g, xi, from, to, depth);
    return;
  }
  const cplx radial = from * (r1 / r0);
  integrate_segment(g, xi, from, radial, depth);
  const double a0 = std::arg(radial), a1 = std::arg(to);
  double da = a1 - a0;
  while (da > M_PI) da -= 2.0 * M_PI;
  while (da < -M_PI) da += 2.0 * M_PI;
  const int arcs = std::max(1, static_cast<int>(std::ceil(std::abs(da) / 0.3)));
  cplx prev = radial;
  for (int k = 1; k <= arcs; ++k) {
    const cplx next = std::polar(r1, a0 + da * k / arcs);
    integrate_segment(g, xi, prev, next, depth);
    prev = next;
  }
}

// g_- at z and its analytic continuation to gamma(z).  The image value is
// continued from z itself (not re-based at the anchor) so the quotient picks
// up the monodromy of the automorphism and not a winding artifact of the
// base path.
inline std::pair<MatrixLoop, MatrixLoop> gminus_pair(const MeromorphicPotential& xi, cplx z,
                                                     cplx image, cplx anchor, int depth) {
  MatrixLoop g_at = MatrixLoop::identity().truncated(-depth, 0);
  continue_along(g_at, xi, anchor, z, depth);
  MatrixLoop g_img = g_at;
  continue_along(g_img, xi, z, image, depth);
  return {g_at, g_img};
}

}  // namespace detail

// Coefficient-wise SL(2) inverse: for det = 1 the inverse is the adjugate,
// which is linear in the entries and therefore acts mode by mode.
inline MatrixLoop sl2_inverse(const MatrixLoop& g) {
  MatrixLoop r(g.n_min(), g.n_max());
  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    const Mat2 m = g.at(n);
    Mat2 adj;
    adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    r.set(n, adj);
  }
  return r;
}

inline MonodromyRecord monodromy_of_automorphic(const MeromorphicPotential& xi,
                                                const Automorphism& gamma,
                                                const std::vector<cplx>& base_points,
                                                int depth = kDefaultTruncation,
                                                double tol = kSymmetryTol) {
  if (base_points.empty())
    throw std::invalid_argument("monodromy_of_automorphic: need at least one base point");
  MonodromyRecord rec;
  rec.base_points = base_points;
  const cplx anchor = base_points.front();
  bool first = true;
  for (const cplx& z : base_points) {
    const auto [g_at, g_img] = detail::gminus_pair(xi, z, gamma(z), anchor, depth);
    const MatrixLoop rho =
        multiply(g_img, inverse_minus_based(g_at)).truncated(-depth, 0);
    if (first) {
      rec.rho_minus_0 = rho;
      first = false;
    } else {
      rec.consistency = std::max(rec.consistency, (rho - rec.rho_minus_0).norm_inf());
    }
  }
  rec.based_defect = (rec.rho_minus_0.at(0) - Mat2::Identity()).cwiseAbs().maxCoeff();
  if (rec.consistency > tol)
    throw std::runtime_error("monodromy_of_automorphic: quotient depends on the base point");
  return rec;
}

// ---------------------------------------------------------------------------
// Conjugation law under dressing: with g_- defined by h g_-^0 = g_- p_+, the
// dressed frame transforms as g_- o gamma = rho g_- w_+ with
// rho = h rho_-^0 h^{-1} and w_+ = p_+ (p_+ o gamma)^{-1}.

struct DressedMonodromyResult {
  MatrixLoop rho;             // quotient monodromy measured from the dressed g_-
  double law_residual = 0.0;  // distance to h rho_-^0 h^{-1}
  double w_plus_defect = 0.0; // negative-mode mass of the extracted w_+
  bool in_big_cell = true;

  nlohmann::json to_json() const {
    return {{"rho", rho.to_json()},
            {"law_residual", law_residual},
            {"w_plus_defect", w_plus_defect},
            {"in_big_cell", in_big_cell}};
  }
};

inline DressedMonodromyResult dressed_monodromy_law(const MatrixLoop& h,
                                                    const MeromorphicPotential& xi,
                                                    const Automorphism& gamma,
                                                    const MonodromyRecord& record,
                                                    int depth = kDefaultTruncation) {
  DressedMonodromyResult out;
  const cplx anchor = record.base_points.front();
  const MatrixLoop expected =
      multiply(multiply(h, record.rho_minus_0), inverse_plus(h)).truncated(-depth, depth);
  bool first = true;
  for (const cplx& z : record.base_points) {
    const auto [g0_at, g0_img] = detail::gminus_pair(xi, z, gamma(z), anchor, depth);
    const DressResult d_at = dress_loop(h, g0_at);
    const DressResult d_img = dress_loop(h, g0_img);
    if (!d_at.in_big_cell || !d_img.in_big_cell) {
      out.in_big_cell = false;
      continue;
    }
    // Extract rho from the transformation law with w_+ = p_+(z) p_+(gamma(z))^{-1}.
    const MatrixLoop w = multiply(d_at.p_plus, inverse_plus(d_img.p_plus));
    const MatrixLoop rho = multiply(multiply(d_img.g_hat, inverse_plus(w)),
                                    inverse_minus_based(d_at.g_hat))
                               .truncated(-depth, depth);
    if (first) {
      out.rho = rho;
      first = false;
    }
    out.law_residual = std::max(out.law_residual, (rho - expected).trimmed(1e-14).norm_inf());
    // Independent plus-class check: g_-(z)^{-1} rho^{-1} g_-(gamma(z)) must
    // have no negative modes when rho obeys the conjugation law.
    const MatrixLoop adj = multiply(
        multiply(inverse_minus_based(d_at.g_hat), sl2_inverse(expected)), d_img.g_hat);
    double neg = 0.0;
    for (int n = adj.n_min(); n < 0; ++n) neg = std::max(neg, adj.coeff_abs(n));
    out.w_plus_defect = std::max(out.w_plus_defect, neg);
  }
  if (first) throw std::runtime_error("dressed_monodromy_law: all base points left the big cell");
  return out;
}

// Measures how badly a candidate monodromy fails the plus-class constraint on
// w_+; used to confirm the uniqueness half of the conjugation law.
inline double w_plus_defect_for(const MatrixLoop& rho_candidate, const MatrixLoop& h,
                                const MeromorphicPotential& xi, const Automorphism& gamma,
                                cplx z, cplx anchor, int depth = kDefaultTruncation) {
  const auto [g0_at, g0_img] = detail::gminus_pair(xi, z, gamma(z), anchor, depth);
  const DressResult d_at = dress_loop(h, g0_at);
  const DressResult d_img = dress_loop(h, g0_img);
  if (!d_at.in_big_cell || !d_img.in_big_cell)
    throw std::runtime_error("w_plus_defect_for: big-cell failure");
  const MatrixLoop w = multiply(
      multiply(inverse_minus_based(d_at.g_hat), sl2_inverse(rho_candidate)), d_img.g_hat);
  double neg = 0.0;
  for (int n = w.n_min(); n < 0; ++n) neg = std::max(neg, w.coeff_abs(n));
  return neg;
}

// ---------------------------------------------------------------------------
// Equivalence: gamma is a symmetry of the dressed surface iff the dressed g_-
// is gamma-invariant.  The symmetry side is decided through the monodromy:
// rho must be unitary on the circle with constant eigenvalues, which (as its
// lambda^0 coefficient is conjugate to the identity) forces rho = I.

struct EquivalenceResult {
  bool symmetric = false;
  bool g_minus_invariant = false;
  double invariance_residual = 0.0;
  double rho_unitary_defect = 0.0;
  double eigen_constancy_defect = 0.0;

  nlohmann::json to_json() const {
    return {{"symmetric", symmetric},
            {"g_minus_invariant", g_minus_invariant},
            {"invariance_residual", invariance_residual},
            {"rho_unitary_defect", rho_unitary_defect},
            {"eigen_constancy_defect", eigen_constancy_defect}};
  }
};

inline EquivalenceResult symmetry_equivalence_check(const MeromorphicPotential& xi,
                                                    const Automorphism& gamma,
                                                    const MatrixLoop& h,
                                                    const std::vector<cplx>& base_points,
                                                    int depth = kDefaultTruncation,
                                                    double tol = kSymmetryTol) {
  const MonodromyRecord rec = monodromy_of_automorphic(xi, gamma, base_points, depth, tol);
  const DressedMonodromyResult law = dressed_monodromy_law(h, xi, gamma, rec, depth);
  EquivalenceResult out;

  const cplx anchor = base_points.front();
  for (const cplx& z : base_points) {
    const auto [g0_at, g0_img] = detail::gminus_pair(xi, z, gamma(z), anchor, depth);
    const DressResult d_at = dress_loop(h, g0_at);
    const DressResult d_img = dress_loop(h, g0_img);
    out.invariance_residual =
        std::max(out.invariance_residual, (d_img.g_hat - d_at.g_hat).norm_inf());
  }
  out.g_minus_invariant = out.invariance_residual <= tol;

  // Unitary extendability of rho and constancy of its eigenvalues, probed via
  // the Fourier modes of tr rho on the circle: a constant-eigenvalue unitary
  // loop has all nonzero trace modes vanishing.
  double unit = 0.0;
  for (int k = 0; k < kCircleSamples; ++k) {
    const Mat2 u = law.rho.evaluate(circle_sample(k));
    unit = std::max(unit, (u * u.adjoint() - Mat2::Identity()).cwiseAbs().maxCoeff());
  }
  out.rho_unitary_defect = unit;
  double nonconst = 0.0;
  for (int n = law.rho.n_min(); n <= law.rho.n_max(); ++n) {
    if (n == 0) continue;
    nonconst = std::max(nonconst, std::abs(law.rho.at(n).trace()));
  }
  out.eigen_constancy_defect = nonconst;
  const bool rho_identity = (law.rho - MatrixLoop::identity()).trimmed(1e-14).norm_inf() <= tol;
  out.symmetric = unit <= tol && nonconst <= tol && rho_identity;

  if (out.symmetric != out.g_minus_invariant)
    throw std::runtime_error("symmetry_equivalence_check: equivalence flags disagree");
  return out;
}

}  // namespace dressforge
