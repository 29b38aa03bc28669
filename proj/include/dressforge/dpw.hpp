#pragma once

// The DPW pipeline: integrate g_- from a meromorphic potential, Iwasawa-split
// into extended frames, evaluate a Sym-type formula into immersions of the
// associated family, and measure CMC-ness of the result.

#include <fstream>
#include <functional>
#include <optional>
#include <vector>

#include "factorization.hpp"
#include "loop.hpp"
#include "rational.hpp"

namespace dressforge {

inline constexpr double kPoleExclusion = 1e-2;
inline constexpr double kCoeffNormCeiling = 1e3;
inline constexpr int kStepsPerUnit = 256;

enum class Domain { disk, plane };

struct MeromorphicPotential {
  RationalFunction f;  // nonvanishing requirement recorded via grid flags
  RationalFunction E;
  double H = 0.5;
  Domain domain = Domain::plane;

  MeromorphicPotential() = default;
  MeromorphicPotential(RationalFunction f_, RationalFunction E_, double H_ = 0.5,
                       Domain d = Domain::plane)
      : f(std::move(f_)), E(std::move(E_)), H(H_), domain(d) {
    if (f.is_zero()) throw std::invalid_argument("potential: f identically zero");
    if (E.is_zero()) throw std::invalid_argument("potential: E identically zero");
    if (H <= 0.0) throw std::invalid_argument("potential: H must be positive");
  }

  RationalFunction lower_entry() const { return E / f; }  // E/f

  // off-diagonal coefficient matrix of lambda^{-1} in xi
  Mat2 coefficient(cplx z) const {
    Mat2 m = Mat2::Zero();
    m(0, 1) = f(z);
    m(1, 0) = (E / f)(z);
    return m;
  }

  // Points where xi is singular: poles of f and of E/f.
  std::vector<cplx> singular_points() const {
    std::vector<cplx> out;
    for (const auto& c : poly::clustered_roots(f.den())) out.push_back(c.location);
    for (const auto& c : poly::clustered_roots((E / f).den())) out.push_back(c.location);
    return out;
  }

  nlohmann::json to_json() const {
    return {{"f", f.to_json()},
            {"E", E.to_json()},
            {"H", H},
            {"domain", domain == Domain::disk ? "disk" : "plane"}};
  }

  static MeromorphicPotential from_json(const nlohmann::json& j) {
    return MeromorphicPotential(
        RationalFunction::from_json(j.at("f")), RationalFunction::from_json(j.at("E")),
        j.value("H", 0.5),
        j.value("domain", std::string("plane")) == "disk" ? Domain::disk : Domain::plane);
  }
};

struct GridSpec {
  double extent = 1.0;  // grid spans [-extent, extent]^2
  int resolution = 33;  // points per side; forced odd so the origin is a node

  static GridSpec from_json(const nlohmann::json& j) {
    GridSpec g;
    g.extent = j.value("extent", 1.0);
    g.resolution = j.value("resolution", 33);
    return g;
  }
};

struct FrameField {
  int nx = 0, ny = 0;
  double extent = 1.0;
  std::vector<cplx> points;
  std::vector<MatrixLoop> g_minus;
  std::vector<MatrixLoop> frame;
  std::vector<MatrixLoop> plus_part;
  std::vector<bool> singular;
  bool frames_ready = false;

  int index(int i, int j) const { return i * nx + j; }
  cplx at(int i, int j) const { return points[static_cast<size_t>(index(i, j))]; }
  int origin_i() const { return ny / 2; }
  int origin_j() const { return nx / 2; }
  double spacing() const { return 2.0 * extent / (nx - 1); }
};

struct SurfaceMesh {
  int nx = 0, ny = 0;
  cplx lambda0{1.0, 0.0};
  std::vector<Eigen::Vector3d> vertices;
  std::vector<bool> valid;
  int index(int i, int j) const { return i * nx + j; }
};

namespace detail {

// Right multiplication dG = G * A(z) lambda^{-1}, truncated below -depth.
inline MatrixLoop xi_apply(const MatrixLoop& g, const Mat2& a, int depth) {
  MatrixLoop r(-depth, 0);
  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    if (n - 1 < -depth) continue;
    r.set(n - 1, g.at(n) * a);
  }
  return r;
}

// One RK4 step of dG/dz = G A(z) lambda^{-1} along the straight segment
// z -> z + dz.
inline void rk4_step(MatrixLoop& g, const MeromorphicPotential& xi, cplx z, cplx dz,
                     int depth) {
  const Mat2 a1 = xi.coefficient(z);
  const Mat2 a2 = xi.coefficient(z + 0.5 * dz);
  const Mat2 a3 = a2;
  const Mat2 a4 = xi.coefficient(z + dz);
  const MatrixLoop k1 = xi_apply(g, a1, depth) * dz;
  const MatrixLoop k2 = xi_apply(g + 0.5 * k1, a2, depth) * dz;
  const MatrixLoop k3 = xi_apply(g + 0.5 * k2, a3, depth) * dz;
  const MatrixLoop k4 = xi_apply(g + k3, a4, depth) * dz;
  g = (g + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (1.0 / 6.0)).truncated(-depth, 0);
}

// Integrates g_- along the straight segment from z0 (value g) to z1,
// choosing substeps from the local coefficient norm.
inline void integrate_segment(MatrixLoop& g, const MeromorphicPotential& xi, cplx z0,
                              cplx z1, int depth, int steps_per_unit = kStepsPerUnit) {
  const double len = std::abs(z1 - z0);
  if (len == 0.0) return;
  int steps = std::max(2, static_cast<int>(std::ceil(len * steps_per_unit)));
  const double norm0 = xi.coefficient(z0).cwiseAbs().maxCoeff();
  const double norm1 = xi.coefficient(z1).cwiseAbs().maxCoeff();
  const double big = std::max(norm0, norm1);
  if (big > kCoeffNormCeiling) steps *= 4;  // step halving near poles, twice
  const cplx dz = (z1 - z0) / static_cast<double>(steps);
  for (int s = 0; s < steps; ++s) rk4_step(g, xi, z0 + dz * static_cast<double>(s), dz, depth);
}

}  // namespace detail

// Integrates g_- at a single point: straight path from the origin.
inline MatrixLoop integrate_gminus_at(const MeromorphicPotential& xi, cplx z,
                                      int depth = kDefaultTruncation,
                                      cplx base = 0.0) {
  MatrixLoop g = MatrixLoop::identity().truncated(-depth, 0);
  detail::integrate_segment(g, xi, base, z, depth);
  return g;
}

// g_- over the grid: outward along the central row, then along columns.
inline FrameField integrate_potential(const MeromorphicPotential& xi, const GridSpec& grid,
                                      int depth = kDefaultTruncation) {
  FrameField ff;
  ff.nx = ff.ny = grid.resolution | 1;  // force odd so the origin is a node
  ff.extent = grid.extent;
  const int nx = ff.nx, ny = ff.ny;
  const double h = 2.0 * grid.extent / (nx - 1);
  ff.points.resize(static_cast<size_t>(nx * ny));
  ff.g_minus.assign(static_cast<size_t>(nx * ny), MatrixLoop());
  ff.singular.assign(static_cast<size_t>(nx * ny), false);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j)
      ff.points[static_cast<size_t>(ff.index(i, j))] =
          cplx(-grid.extent + h * j, -grid.extent + h * i);

  const auto poles = xi.singular_points();
  auto near_pole = [&](cplx z) {
    for (const cplx& p : poles)
      if (std::abs(z - p) < kPoleExclusion) return true;
    return false;
  };
  auto oversized = [&](cplx z) {
    return xi.coefficient(z).cwiseAbs().maxCoeff() > kCoeffNormCeiling;
  };
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) {
      const cplx z = ff.at(i, j);
      bool bad = near_pole(z) || oversized(z);
      if (xi.domain == Domain::disk && std::abs(z) > grid.extent + 1e-12) bad = true;
      ff.singular[static_cast<size_t>(ff.index(i, j))] = bad;
    }

  const int oi = ff.origin_i(), oj = ff.origin_j();
  if (ff.singular[static_cast<size_t>(ff.index(oi, oj))] || near_pole(0.0))
    throw std::invalid_argument("integrate_potential: grid origin on a pole of xi");

  // Central row, outward in both directions.
  ff.g_minus[static_cast<size_t>(ff.index(oi, oj))] =
      MatrixLoop::identity().truncated(-depth, 0);
  for (int dir : {+1, -1}) {
    MatrixLoop g = ff.g_minus[static_cast<size_t>(ff.index(oi, oj))];
    for (int j = oj + dir; j >= 0 && j < nx; j += dir) {
      const int prev = ff.index(oi, j - dir), cur = ff.index(oi, j);
      if (ff.singular[static_cast<size_t>(prev)] || ff.singular[static_cast<size_t>(cur)]) {
        // stop propagating through a singular cell; points beyond stay unset
        for (int jj = j; jj >= 0 && jj < nx; jj += dir)
          ff.singular[static_cast<size_t>(ff.index(oi, jj))] = true;
        break;
      }
      detail::integrate_segment(g, xi, ff.points[static_cast<size_t>(prev)],
                                ff.points[static_cast<size_t>(cur)], depth);
      ff.g_minus[static_cast<size_t>(cur)] = g;
    }
  }
  // Columns, from the central row outward.
  for (int j = 0; j < nx; ++j) {
    if (ff.singular[static_cast<size_t>(ff.index(oi, j))]) continue;
    for (int dir : {+1, -1}) {
      MatrixLoop g = ff.g_minus[static_cast<size_t>(ff.index(oi, j))];
      for (int i = oi + dir; i >= 0 && i < ny; i += dir) {
        const int prev = ff.index(i - dir, j), cur = ff.index(i, j);
        if (ff.singular[static_cast<size_t>(prev)] || ff.singular[static_cast<size_t>(cur)]) {
          for (int ii = i; ii >= 0 && ii < ny; ii += dir)
            ff.singular[static_cast<size_t>(ff.index(ii, j))] = true;
          break;
        }
        detail::integrate_segment(g, xi, ff.points[static_cast<size_t>(prev)],
                                  ff.points[static_cast<size_t>(cur)], depth);
        ff.g_minus[static_cast<size_t>(cur)] = g;
      }
    }
  }
  return ff;
}

// Per-point Iwasawa decomposition g_- = F g_+^{-1}; frame(origin) = I is
// automatic from g_-(origin) = I and re-asserted.
inline FrameField frames_from_gminus(FrameField ff) {
  const size_t n = ff.points.size();
  ff.frame.assign(n, MatrixLoop());
  ff.plus_part.assign(n, MatrixLoop());
  for (size_t k = 0; k < n; ++k) {
    if (ff.singular[k]) continue;
    try {
      const auto r = iwasawa(ff.g_minus[k]);
      ff.frame[k] = r.unitary_part;
      ff.plus_part[k] = r.plus_part;
    } catch (const std::runtime_error&) {
      ff.singular[k] = true;
    }
  }
  const int o = ff.index(ff.origin_i(), ff.origin_j());
  if (!ff.singular[static_cast<size_t>(o)]) {
    const double dev =
        (ff.frame[static_cast<size_t>(o)].trimmed(1e-12) - MatrixLoop::identity()).norm_inf();
    if (dev > 1e-8)
      throw std::runtime_error("frames_from_gminus: frame normalization at origin broken");
  }
  ff.frames_ready = true;
  return ff;
}

namespace detail {

inline Eigen::Vector3d su2_to_r3(const Mat2& m) {
  // clean to su(2): anti-Hermitian, traceless
  Mat2 x = 0.5 * (m - m.adjoint());
  x -= 0.5 * x.trace() * Mat2::Identity();
  Mat2 s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, cplx(0, -1), cplx(0, 1), 0;
  s3 << 1, 0, 0, -1;
  // x = (i/2)(x1 s1 + x2 s2 + x3 s3)  =>  xk = -i tr(x sk)
  auto comp = [&](const Mat2& s) { return (cplx(0, -1) * (x * s).trace()).real(); };
  return {comp(s1), comp(s2), comp(s3)};
}

}  // namespace detail

// Sym-type formula: Psi = -(1/2H) ( i lambda dF/dlambda F^{-1} + (i/2) F s3 F^{-1} )
// at lambda0, with the exact lambda-derivative of the Laurent truncation.
inline SurfaceMesh sym_immersion(const FrameField& ff, cplx lambda0, double H) {
  if (!ff.frames_ready) throw std::logic_error("sym_immersion: frames not populated");
  if (std::abs(std::abs(lambda0) - 1.0) > 1e-12)
    throw std::invalid_argument("sym_immersion: lambda0 must lie on the unit circle");
  SurfaceMesh mesh;
  mesh.nx = ff.nx;
  mesh.ny = ff.ny;
  mesh.lambda0 = lambda0;
  mesh.vertices.assign(ff.points.size(), Eigen::Vector3d::Zero());
  mesh.valid.assign(ff.points.size(), false);
  Mat2 s3;
  s3 << 1, 0, 0, -1;
  for (size_t k = 0; k < ff.points.size(); ++k) {
    if (ff.singular[k]) continue;
    const MatrixLoop& F = ff.frame[k];
    const Mat2 Fv = F.evaluate(lambda0);
    Mat2 dF = Mat2::Zero();  // lambda * dF/dlambda at lambda0
    for (int n = F.n_min(); n <= F.n_max(); ++n)
      dF += static_cast<double>(n) * F.at(n) * std::pow(lambda0, n);
    const Mat2 Finv = Fv.inverse();
    const Mat2 m = cplx(0, 1) * dF * Finv + cplx(0, 0.5) * Fv * s3 * Finv;
    const Eigen::Vector3d v = -(1.0 / (2.0 * H)) * detail::su2_to_r3(m);
    if (!v.allFinite()) continue;
    mesh.vertices[k] = v;
    mesh.valid[k] = true;
  }
  return mesh;
}

struct CmcReport {
  double h_target = 0.5;
  double max_h_deviation = 0.0;   // relative, over interior valid vertices
  double mean_h_deviation = 0.0;
  double max_conformal_residual = 0.0;
  int vertices_checked = 0;
  bool flagged = false;  // true when the mesh fails the deviation threshold
  double tolerance = 0.02;
  std::vector<double> per_vertex_deviation;  // aligned with mesh vertices

  nlohmann::json to_json() const {
    return {{"h_target", h_target},
            {"max_h_deviation", max_h_deviation},
            {"mean_h_deviation", mean_h_deviation},
            {"max_conformal_residual", max_conformal_residual},
            {"vertices_checked", vertices_checked},
            {"flagged", flagged},
            {"tolerance", tolerance}};
  }
};

// Discrete mean curvature via the cotangent-Laplacian mean-curvature normal
// on the triangulated grid, plus conformality of the pullback metric from
// central differences.
inline CmcReport verify_cmc(const SurfaceMesh& mesh, double H, double tolerance = 0.02) {
  CmcReport rep;
  rep.h_target = H;
  rep.tolerance = tolerance;
  rep.per_vertex_deviation.assign(mesh.vertices.size(), 0.0);
  const int nx = mesh.nx, ny = mesh.ny;

  auto ok = [&](int i, int j) {
    return i >= 0 && i < ny && j >= 0 && j < nx &&
           mesh.valid[static_cast<size_t>(mesh.index(i, j))];
  };
  auto vtx = [&](int i, int j) -> const Eigen::Vector3d& {
    return mesh.vertices[static_cast<size_t>(mesh.index(i, j))];
  };
  auto cot = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double cross = a.cross(b).norm();
    return (cross < 1e-300) ? 0.0 : a.dot(b) / cross;
  };

  double sum_dev = 0.0;
  for (int i = 1; i + 1 < ny; ++i) {
    for (int j = 1; j + 1 < nx; ++j) {
      bool all = true;
      for (int di = -1; di <= 1 && all; ++di)
        for (int dj = -1; dj <= 1 && all; ++dj) all = ok(i + di, j + dj);
      if (!all) continue;
      const Eigen::Vector3d c = vtx(i, j);
      // 1-ring of the grid triangulation (diagonals split i+1,j+1 quads)
      const std::array<std::pair<int, int>, 6> ring = {
          {{i, j + 1}, {i + 1, j + 1}, {i + 1, j}, {i, j - 1}, {i - 1, j - 1}, {i - 1, j}}};
      Eigen::Vector3d lap = Eigen::Vector3d::Zero();
      double area = 0.0;
      for (size_t e = 0; e < 6; ++e) {
        const auto [ia, ja] = ring[e];
        const auto [ip, jp] = ring[(e + 5) % 6];
        const auto [in_, jn] = ring[(e + 1) % 6];
        const Eigen::Vector3d pj = vtx(ia, ja);
        const Eigen::Vector3d pprev = vtx(ip, jp);
        const Eigen::Vector3d pnext = vtx(in_, jn);
        const double w = cot(c - pprev, pj - pprev) + cot(c - pnext, pj - pnext);
        lap += w * (c - pj);
        area += (pj - c).cross(pnext - c).norm() / 2.0;
      }
      area /= 3.0;  // barycentric vertex area
      if (area < 1e-300) continue;
      const double h_disc = lap.norm() / (4.0 * area);  // |mean curvature|
      const double dev = std::abs(h_disc - std::abs(H)) / std::abs(H);
      rep.per_vertex_deviation[static_cast<size_t>(mesh.index(i, j))] = dev;
      rep.max_h_deviation = std::max(rep.max_h_deviation, dev);
      sum_dev += dev;
      ++rep.vertices_checked;

      const Eigen::Vector3d du = (vtx(i, j + 1) - vtx(i, j - 1)) / 2.0;
      const Eigen::Vector3d dv = (vtx(i + 1, j) - vtx(i - 1, j)) / 2.0;
      const double nu = du.norm(), nv = dv.norm();
      if (nu > 1e-300 && nv > 1e-300) {
        const double res = std::max(std::abs(nu - nv) / std::max(nu, nv),
                                    std::abs(du.dot(dv)) / (nu * nv));
        rep.max_conformal_residual = std::max(rep.max_conformal_residual, res);
      }
    }
  }
  if (rep.vertices_checked > 0) sum_dev /= rep.vertices_checked;
  rep.mean_h_deviation = sum_dev;
  rep.flagged = (rep.vertices_checked == 0) || (rep.max_h_deviation > tolerance);
  return rep;
}

inline void write_obj(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_obj: cannot open " + path);
  std::vector<int> remap(mesh.vertices.size(), -1);
  int next = 1;
  for (size_t k = 0; k < mesh.vertices.size(); ++k) {
    if (!mesh.valid[k]) continue;
    remap[k] = next++;
    const auto& v = mesh.vertices[k];
    out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
  }
  for (int i = 0; i + 1 < mesh.ny; ++i)
    for (int j = 0; j + 1 < mesh.nx; ++j) {
      const int a = remap[static_cast<size_t>(mesh.index(i, j))];
      const int b = remap[static_cast<size_t>(mesh.index(i, j + 1))];
      const int c = remap[static_cast<size_t>(mesh.index(i + 1, j + 1))];
      const int d = remap[static_cast<size_t>(mesh.index(i + 1, j))];
      if (a > 0 && b > 0 && c > 0) out << "f " << a << " " << b << " " << c << "\n";
      if (a > 0 && c > 0 && d > 0) out << "f " << a << " " << c << " " << d << "\n";
    }
}

inline void write_cmc_csv(const SurfaceMesh& mesh, const CmcReport& rep,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_cmc_csv: cannot open " + path);
  out << "i,j,x,y,z,h_deviation\n";
  for (int i = 0; i < mesh.ny; ++i)
    for (int j = 0; j < mesh.nx; ++j) {
      const size_t k = static_cast<size_t>(mesh.index(i, j));
      if (!mesh.valid[k]) continue;
      const auto& v = mesh.vertices[k];
      out << i << "," << j << "," << v.x() << "," << v.y() << "," << v.z() << ","
          << rep.per_vertex_deviation[k] << "\n";
    }
}

}  // namespace dressforge
