#pragma once

// Dressing action on the minus factor: h # g_- = (h g_-)_- via Birkhoff
// splitting, plus readback of the dressed potential and the closed-form
// one-parameter families acting on f.

#include <functional>

#include "dpw.hpp"

namespace dressforge {

inline constexpr double kHopfInvarianceTol = 1e-10;
inline constexpr double kPotentialFdStep = 1e-3;

struct DressResult {
  MatrixLoop g_hat;   // dressed minus factor, normalized to I at lambda=infinity
  MatrixLoop p_plus;  // h g_- = g_hat p_plus
  bool in_big_cell = false;
  double condition_estimate = 0.0;
};

inline DressResult dress_loop(const MatrixLoop& h, const MatrixLoop& g) {
  const BirkhoffResult b = birkhoff(multiply(h, g));
  DressResult r;
  r.in_big_cell = b.in_big_cell;
  r.condition_estimate = b.condition_estimate;
  if (b.in_big_cell) {
    r.g_hat = b.g_minus;
    r.p_plus = b.g_plus;
  }
  return r;
}

// Dresses every minus factor of a frame field; points outside the big cell
// are marked singular.  Frames are invalidated and must be recomputed.
inline FrameField dress_field(const MatrixLoop& h, FrameField ff) {
  ff.frames_ready = false;
  ff.frame.clear();
  ff.plus_part.clear();
  for (size_t k = 0; k < ff.points.size(); ++k) {
    if (ff.singular[k]) continue;
    const DressResult r = dress_loop(h, ff.g_minus[k]);
    if (!r.in_big_cell) {
      ff.singular[k] = true;
      continue;
    }
    ff.g_minus[k] = r.g_hat;
  }
  return ff;
}

using ScalarField = std::function<cplx(cplx)>;

struct PotentialSample {
  cplx f_hat;       // (0,1) entry of the lambda^{-1} mode of G^{-1} G'
  cplx lower_hat;   // (1,0) entry, i.e. E_hat / f_hat
  double offmode_residual = 0.0;  // mass of G^{-1}G' outside the lambda^{-1} mode
};

// Reads the potential back from a pointwise minus factor: the logarithmic
// derivative G^{-1} dG/dz must concentrate in the lambda^{-1} mode.
// Fourth-order central differences with the given step.
inline PotentialSample potential_from_gminus(const std::function<MatrixLoop(cplx)>& G,
                                             cplx z, double step = kPotentialFdStep) {
  const MatrixLoop g0 = G(z);
  const MatrixLoop gp1 = G(z + step), gm1 = G(z - step);
  const MatrixLoop gp2 = G(z + 2 * step), gm2 = G(z - 2 * step);
  const MatrixLoop dg =
      (gm2 - 8.0 * gm1 + 8.0 * gp1 - gp2) * (1.0 / (12.0 * step));
  const MatrixLoop u = multiply(inverse_minus_based(g0), dg);
  PotentialSample s;
  const Mat2 m = u.at(-1);
  s.f_hat = m(0, 1);
  s.lower_hat = m(1, 0);
  double off = 0.0;
  const int lo = std::max(u.n_min() / 2, u.n_min() + 1);  // skip truncation tail
  for (int n = lo; n <= u.n_max(); ++n)
    if (n != -1) off = std::max(off, u.coeff_abs(n));
  s.offmode_residual = off / std::max(1.0, std::abs(s.f_hat));
  return s;
}

struct DressedPotentialProbe {
  std::vector<cplx> points;
  std::vector<PotentialSample> samples;
  double max_hopf_residual = 0.0;  // |f_hat * lower_hat - E| over the probes
  double max_offmode_residual = 0.0;
};

// Samples the dressed potential on a 3x3 probe grid and checks that the
// Hopf-type product f_hat * (E_hat / f_hat) reproduces the original E.
inline DressedPotentialProbe dress_potential(const MatrixLoop& h,
                                             const MeromorphicPotential& xi,
                                             double extent = 0.3,
                                             int depth = kDefaultTruncation) {
  auto dressed_at = [&](cplx z) {
    const DressResult r = dress_loop(h, integrate_gminus_at(xi, z, depth));
    if (!r.in_big_cell)
      throw std::runtime_error("dress_potential: probe point outside the big cell");
    return r.g_hat;
  };
  DressedPotentialProbe probe;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      const cplx z(extent * j, extent * i);
      const PotentialSample s = potential_from_gminus(dressed_at, z);
      probe.points.push_back(z);
      probe.samples.push_back(s);
      probe.max_hopf_residual =
          std::max(probe.max_hopf_residual, std::abs(s.f_hat * s.lower_hat - xi.E(z)));
      probe.max_offmode_residual = std::max(probe.max_offmode_residual, s.offmode_residual);
    }
  if (probe.max_hopf_residual > kHopfInvarianceTol * 100)
    throw std::runtime_error("dress_potential: Hopf invariance broken");
  return probe;
}

// Diagonal one-parameter family: f -> t^2 f (exact, rational in, rational out).
inline RationalFunction t_dress_diag(cplx t, const RationalFunction& f) {
  return RationalFunction::constant(t * t) * f;
}

inline MatrixLoop diag_dressing_loop(cplx t) {
  MatrixLoop h(0, 0);
  h.set_diag(0, t, 1.0 / t);
  return h;
}

inline MatrixLoop unipotent_dressing_loop(cplx t) {
  MatrixLoop h(0, 1);
  h.set_diag(0, 1.0, 1.0);
  h.set_offdiag(1, 0.0, t);  // I + t lambda e_21
  return h;
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], Newton on the recurrence.
template <int N>
const std::pair<std::array<double, N>, std::array<double, N>>& gauss_legendre() {
  static const auto table = [] {
    std::array<double, N> x{}, w{};
    for (int i = 0; i < N; ++i) {
      double t = std::cos(M_PI * (i + 0.75) / (N + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = N * (t * p1 - p0) / (t * t - 1.0);
        const double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-15) {
          x[static_cast<size_t>(i)] = t;
          w[static_cast<size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
          break;
        }
      }
    }
    return std::make_pair(x, w);
  }();
  return table;
}

}  // namespace detail

// Integral of f along the straight segment from 0 to z (32-node quadrature).
inline cplx segment_integral(const RationalFunction& f, cplx z) {
  const auto& [x, w] = detail::gauss_legendre<32>();
  cplx acc = 0.0;
  for (int i = 0; i < 32; ++i) {
    const cplx zi = 0.5 * (x[static_cast<size_t>(i)] + 1.0) * z;
    acc += w[static_cast<size_t>(i)] * f(zi);
  }
  return acc * 0.5 * z;
}

// Unipotent one-parameter family: f -> f / (1 + t * int_0^z f)^2.
// Not rational in general, so this returns an evaluator.
inline ScalarField t_dress_unipotent_map(cplx t, RationalFunction f) {
  return [t, f = std::move(f)](cplx z) {
    const cplx d = 1.0 + t * segment_integral(f, z);
    return f(z) / (d * d);
  };
}

// Residual of the first-order system satisfied by q = p_plus^{-1}:
//   dq/dz = q (lambda^{-1} Mhat) - (lambda^{-1} M) q,
// with M = [[0, f], [E/f, 0]] and Mhat built from the dressed potential.
inline double component_ode_residual(const MatrixLoop& h, const MeromorphicPotential& xi,
                                     const ScalarField& f_hat, const ScalarField& lower_hat,
                                     cplx z, double step = kPotentialFdStep,
                                     int depth = kDefaultTruncation) {
  auto q_at = [&](cplx zz) {
    const DressResult r = dress_loop(h, integrate_gminus_at(xi, zz, depth));
    if (!r.in_big_cell)
      throw std::runtime_error("component_ode_residual: outside the big cell");
    return inverse_plus(r.p_plus);
  };
  const MatrixLoop q0 = q_at(z);
  const MatrixLoop dq = (q_at(z - 2 * step) - 8.0 * q_at(z - step) + 8.0 * q_at(z + step) -
                         q_at(z + 2 * step)) *
                        (1.0 / (12.0 * step));
  MatrixLoop M(-1, -1), Mhat(-1, -1);
  M.set_offdiag(-1, xi.f(z), xi.lower_entry()(z));
  Mhat.set_offdiag(-1, f_hat(z), lower_hat(z));
  const MatrixLoop resid = dq - multiply(q0, Mhat) + multiply(M, q0);
  // top modes of q are polluted by the Birkhoff truncation; check the low ones
  const int hi = std::min(6, q0.n_max() - 2);
  double worst = 0.0;
  for (int n = -1; n <= hi; ++n) worst = std::max(worst, resid.coeff_abs(n));
  return worst / std::max(1.0, q0.norm_inf());
}

}  // namespace dressforge
