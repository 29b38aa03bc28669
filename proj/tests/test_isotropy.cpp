#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dressforge/isotropy.hpp>

#include "helpers.hpp"

using namespace dressforge;
using dressforge::testing::Rng;

TEST_CASE("leading_solution: radicand and monodromy classification") {
  SUBCASE("f=1, E=1: constant, trivially meromorphic") {
    const auto sol = leading_solution(RationalFunction::constant(1.0),
                                      RationalFunction::constant(1.0), CoeffSide::b);
    CHECK(sol.meromorphic);
    CHECK(sol.monodromy.empty());
    CHECK(std::abs(sol.radicand(cplx(0.3, 0.2)) - 1.0) < 1e-12);
  }
  SUBCASE("f=1, E=z: factor -1 around the origin") {
    const auto sol = leading_solution(RationalFunction::constant(1.0),
                                      RationalFunction::variable(), CoeffSide::b);
    CHECK_FALSE(sol.meromorphic);
    CHECK_FALSE(sol.inconclusive);
    REQUIRE(sol.monodromy.size() == 1);
    CHECK(std::abs(sol.monodromy[0].point) < 1e-8);
    CHECK(sol.monodromy[0].classification == -1);
    CHECK(std::abs(sol.monodromy[0].factor + 1.0) < 1e-3);
  }
  SUBCASE("f=z, E=z^2: simplifies to 1, meromorphic; square-consistency") {
    const auto sol = leading_solution(
        RationalFunction::variable(),
        RationalFunction::variable() * RationalFunction::variable(), CoeffSide::b);
    CHECK(sol.meromorphic);
    // oracle by squaring: radicand * E == f^2
    const RationalFunction f = RationalFunction::variable();
    const RationalFunction E = f * f;
    CHECK((sol.radicand * E).near_equal(f * f, 1e-10));
  }
  SUBCASE("c side uses the reciprocal radicand") {
    const RationalFunction f({cplx(1.0), cplx(2.0)}, {cplx(1.0)});
    const RationalFunction E = RationalFunction::constant(3.0);
    const auto sb = leading_solution(f, E, CoeffSide::b);
    const auto sc = leading_solution(f, E, CoeffSide::c);
    CHECK((sb.radicand * sc.radicand).near_equal(RationalFunction::constant(1.0), 1e-9));
  }
}

TEST_CASE("recursion on the cylinder: L[const]=0 keeps all coefficients constant") {
  RecursionState st = init_recursion(RationalFunction::constant(1.0),
                                     RationalFunction::constant(1.0), CoeffSide::b);
  for (int n = 3; n <= 7; n += 2) recursion_step(st, n);
  const auto v1 = coefficients_at(st, cplx(0.5, 0.1));
  const auto v2 = coefficients_at(st, cplx(-0.4, 0.6));
  for (int n = 1; n <= 7; n += 2) {
    CHECK(std::abs(v1.at(n) - v2.at(n)) < 1e-9);  // constant in z
    CHECK(std::abs(v1.at(n)) > 0.5);              // nonzero candidates
  }
}

TEST_CASE("recursion with zero leading constant is homogeneous only") {
  RecursionState st = init_recursion(RationalFunction::constant(1.0),
                                     RationalFunction::constant(1.0), CoeffSide::b,
                                     cplx(0.0));
  st.constants[3] = cplx(2.5, 0.0);
  recursion_step(st, 3);
  const auto v = coefficients_at(st, cplx(0.3, -0.2));
  CHECK(std::abs(v.at(1)) < 1e-12);
  CHECK(std::abs(v.at(3) - cplx(2.5)) < 1e-9);
}

TEST_CASE("recursion satisfies the defining third-order relation (FD oracle)") {
  // E = 1 + z/2 (zero at -2, far away), f = 1: genuinely z-dependent system
  const RationalFunction f = RationalFunction::constant(1.0);
  const RationalFunction E({cplx(1.0), cplx(0.5)}, {cplx(1.0)});
  RecursionState st = init_recursion(f, E, CoeffSide::b);
  for (int n = 3; n <= 5; n += 2) recursion_step(st, n);

  const cplx z0(0.21, 0.13), base(0.37, 0.21);
  const double h = 2e-2;
  // sampled b_n on a 7-point stencil along the real direction; the tight
  // integrator step keeps the noise below what the h^-3 stencil amplifies
  std::map<int, std::array<cplx, 7>> b;
  for (int s = -3; s <= 3; ++s) {
    const auto v = coefficients_at(st, z0 + static_cast<double>(s) * h, base, 1e-3);
    for (int n = 1; n <= 5; n += 2) b[n][static_cast<size_t>(s + 3)] = v.at(n);
  }
  // central stencils around index 3
  auto D1 = [&](const std::array<cplx, 7>& y) {
    return (-y[5] + 8.0 * y[4] - 8.0 * y[2] + y[1]) / (12.0 * h);
  };
  auto D2 = [&](const std::array<cplx, 7>& y) {
    return (-y[5] + 16.0 * y[4] - 30.0 * y[3] + 16.0 * y[2] - y[1]) / (12.0 * h * h);
  };
  auto D3 = [&](const std::array<cplx, 7>& y) {
    return (-y[6] + 8.0 * y[5] - 13.0 * y[4] + 13.0 * y[2] - 8.0 * y[1] + y[0]) /
           (8.0 * h * h * h);
  };
  const RationalFunction phi = derivative(f) / f;  // zero here
  const RationalFunction Q =
      RationalFunction::constant(-1.0) *
      (derivative(phi) - RationalFunction::constant(2.0) * phi * phi);
  for (int n : {3, 5}) {
    const cplx lhs = D3(b.at(n - 2)) - 3.0 * phi(z0) * D2(b.at(n - 2)) +
                     Q(z0) * D1(b.at(n - 2));
    const cplx rhs = 4.0 * E(z0) * D1(b.at(n)) +
                     2.0 * (derivative(E)(z0) - 2.0 * phi(z0) * E(z0)) * b.at(n)[3];
    CHECK(std::abs(lhs - rhs) < 1e-6);
  }
}

TEST_CASE("pole orders stay bounded for f = z^-2, E = 1 (j = 2)") {
  const RationalFunction f = RationalFunction::monomial(-2);
  const RationalFunction E = RationalFunction::constant(1.0);
  RecursionState st = init_recursion(f, E, CoeffSide::b);
  for (int n = 3; n <= 7; n += 2) recursion_step(st, n);
  const auto table = local_pole_orders(st, cplx(0.0), cplx(0.37, 0.21));
  REQUIRE(table.size() == 4);
  for (const auto& e : table) {
    INFO("n=", e.n, " k=", e.k, " slope=", e.slope);
    CHECK(e.k <= 2);  // 2(j-1) with j=2
  }
  CHECK(table[0].k == 2);  // b_1 = C z^-2 exactly
}

TEST_CASE("path rerouting avoids branch points and fails loudly when trapped") {
  // branch point at 0.5 sits on the straight path from 0 to 1
  const std::vector<cplx> pts{cplx(0.5, 0.0)};
  const auto path = reroute_path(cplx(0.0), cplx(1.0), pts);
  CHECK(path.size() > 2);
  for (size_t s = 0; s + 1 < path.size(); ++s) {
    // sample along each leg: must clear the branch point
    for (int t = 1; t < 16; ++t) {
      const cplx z = path[s] + (path[s + 1] - path[s]) * (t / 16.0);
      CHECK(std::abs(z - pts[0]) > 0.9 * kBranchClearance);
    }
  }
  // a dense cage of branch points around the target is unreachable
  std::vector<cplx> cage;
  for (int k = 0; k < 200; ++k)
    cage.push_back(cplx(1.0) + std::polar(0.015, 2.0 * M_PI * k / 200.0));
  cage.push_back(cplx(1.0) + cplx(0.005, 0.0));
  CHECK_THROWS_AS(reroute_path(cplx(0.0), cplx(1.0), cage), std::runtime_error);
}

TEST_CASE("pole_growth_check matches the exceptional-value characterization") {
  SUBCASE("named cases") {
    const PoleGrowth g1 = pole_growth_check(1, 0, 1);
    CHECK(g1.growth);
    CHECK(g1.k_next_lower_bound == 4);
    const PoleGrowth g2 = pole_growth_check(2, -2, 0);  // k = -2(n_f+1) = 2
    CHECK_FALSE(g2.growth);
  }
  SUBCASE("random triples agree with the cubic coefficient polynomial") {
    Rng rng(5);
    std::uniform_int_distribution<int> dk(-8, 8), dn(-4, 4), dm(0, 3);
    for (int t = 0; t < 500; ++t) {
      const int k = dk(rng), nf = dn(rng), m = dm(rng);
      const PoleGrowth g = pole_growth_check(k, nf, m);
      CHECK(g.growth == (pole_growth_polynomial(k, nf) != 0));
      if (g.growth) CHECK(g.k_next_lower_bound == k + m + 2);
    }
  }
}

TEST_CASE("isotropy_verdict on the named potentials") {
  SUBCASE("E=z, f=1: trivial with monodromy -1 and square test false") {
    const MeromorphicPotential xi(RationalFunction::constant(1.0),
                                  RationalFunction::variable(), 0.5);
    const IsotropyReport rep = isotropy_verdict(xi);
    CHECK(rep.verdict == IsotropyReport::Verdict::trivial);
    CHECK_FALSE(rep.E_is_square);
    bool found = false;
    for (const auto& m : rep.monodromy_factors)
      if (std::abs(m.point) < 1e-8 && m.classification == -1) found = true;
    CHECK(found);
    CHECK(rep.m == 1);
    CHECK(rep.n_f == 0);
  }
  SUBCASE("E=z^2, f=1: trivial even though the square test passes") {
    const MeromorphicPotential xi(
        RationalFunction::constant(1.0),
        RationalFunction::variable() * RationalFunction::variable(), 0.5);
    const IsotropyReport rep = isotropy_verdict(xi);
    CHECK(rep.verdict == IsotropyReport::Verdict::trivial);
    CHECK(rep.E_is_square);
    CHECK(rep.m == 2);
  }
  SUBCASE("E=1, f=1: possibly nontrivial with nonzero candidates through 7") {
    const MeromorphicPotential xi(RationalFunction::constant(1.0),
                                  RationalFunction::constant(1.0), 0.5);
    const IsotropyReport rep = isotropy_verdict(xi, 7);
    CHECK(rep.verdict == IsotropyReport::Verdict::possibly_nontrivial);
    REQUIRE(rep.candidate_magnitudes.size() == 4);
    for (const auto& [n, mag] : rep.candidate_magnitudes) CHECK(mag > 0.5);
  }
  SUBCASE("report serializes") {
    const MeromorphicPotential xi(RationalFunction::constant(1.0),
                                  RationalFunction::variable(), 0.5);
    const auto j = isotropy_verdict(xi).to_json();
    CHECK(j.at("verdict") == "trivial");
    CHECK(j.contains("pole_table"));
    CHECK(j.contains("monodromy_factors"));
  }
}

TEST_CASE("randomized family with planted E-zeros is always trivial") {
  Rng rng(31);
  std::uniform_real_distribution<double> dz(-0.8, 0.8);
  std::uniform_int_distribution<int> dmult(1, 3);
  for (int t = 0; t < 8; ++t) {
    const cplx z0(dz(rng), dz(rng));
    const int mult = dmult(rng);
    poly::Poly num = poly::from_roots(std::vector<cplx>(static_cast<size_t>(mult), z0),
                                      cplx(1.0));
    const RationalFunction E(num, {cplx(1.0)});
    const RationalFunction f = RationalFunction::constant(
        cplx(1.0 + 0.2 * dz(rng), 0.3 * dz(rng)));
    const IsotropyReport rep = isotropy_verdict(MeromorphicPotential(f, E, 0.5));
    CHECK(rep.verdict == IsotropyReport::Verdict::trivial);
    // necessity chain: odd multiplicity forces monodromy -1 and square failure
    if (mult % 2 == 1) {
      CHECK_FALSE(rep.E_is_square);
      bool neg = false;
      for (const auto& m : rep.monodromy_factors)
        if (std::abs(m.point - z0) < 1e-6 && m.classification == -1) neg = true;
      CHECK(neg);
    } else {
      CHECK(rep.E_is_square);
    }
  }
}

TEST_CASE("case II record when f vanishes at an E-zero") {
  // f = z^2, E = z: f has a zero at the umbilic point
  const MeromorphicPotential xi(
      RationalFunction::variable() * RationalFunction::variable(),
      RationalFunction::variable(), 0.5);
  const IsotropyReport rep = isotropy_verdict(xi);
  CHECK(rep.verdict == IsotropyReport::Verdict::trivial);
  REQUIRE(rep.case_two.size() == 1);
  CHECK(rep.case_two[0].f_order == 2);
  CHECK_FALSE(rep.case_two[0].note.empty());
}

TEST_CASE("b == 0 collapses the system to the identity") {
  const CollapseCheck c1 = b_zero_collapse_check(RationalFunction::constant(1.0),
                                                 RationalFunction::constant(1.0));
  CHECK(c1.forces_identity);
  const CollapseCheck c2 = b_zero_collapse_check(
      RationalFunction({cplx(1.0), cplx(0.0), cplx(2.0)}, {cplx(1.0), cplx(1.0)}),
      RationalFunction::variable());
  CHECK(c2.forces_identity);
}

TEST_CASE("the swap f -> E/f maps the b system to the c system") {
  CHECK(sides_swap_consistent(RationalFunction::constant(2.0),
                              RationalFunction::constant(1.0)));
  CHECK(sides_swap_consistent(RationalFunction({cplx(1.0), cplx(0.5)}, {cplx(1.0)}),
                              RationalFunction({cplx(2.0), cplx(0.0), cplx(1.0)},
                                               {cplx(1.0)})));
}

TEST_CASE("isotropy data transports by conjugation with a dressing element") {
  // cylinder frame: h = exp(eps*lambda*K), K = antidiag(1,1) commutes with
  // g_- = exp(z*lambda^-1*K), so h fixes g_- under dressing
  const MeromorphicPotential xi(RationalFunction::constant(1.0),
                                RationalFunction::constant(1.0), 0.5);
  MatrixLoop k(1, 1);
  k.set_offdiag(1, 0.15, 0.15);
  const MatrixLoop h = exp_loop(k, 0, kDefaultTruncation);
  const MatrixLoop g = integrate_gminus_at(xi, cplx(0.4, 0.25));
  const DressResult fix = dress_loop(h, g);
  REQUIRE(fix.in_big_cell);
  CHECK((fix.g_hat.truncated(g.n_min(), 0) - g).norm_inf() < 1e-8);

  Rng rng(17);
  const MatrixLoop hhat = testing::random_plus_loop(rng, 3);
  const DressResult moved = dress_loop(hhat, g);
  REQUIRE(moved.in_big_cell);
  const MatrixLoop conj =
      multiply(multiply(hhat, h), inverse_plus(hhat.truncated(0, kDefaultTruncation)))
          .truncated(0, kDefaultTruncation);
  const DressResult fixed_hat = dress_loop(conj, moved.g_hat);
  REQUIRE(fixed_hat.in_big_cell);
  const int lo = std::max(fixed_hat.g_hat.n_min(), moved.g_hat.n_min()) / 2;
  CHECK((fixed_hat.g_hat.truncated(lo, 0) - moved.g_hat.truncated(lo, 0)).norm_inf() < 1e-6);
}
