#include "numrange/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "numrange/errors.hpp"

namespace numrange {

SeededSampler::SeededSampler(std::uint64_t seed) : seed_(seed), rng_(seed) {}

double SeededSampler::uniform() {
  ++draws_;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
}

double SeededSampler::normal() {
  ++draws_;
  return normal_(rng_);
}

cplx SeededSampler::complex_normal() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im) / std::sqrt(2.0);
}

CVector SeededSampler::haar_vector(int d) {
  CVector v(d);
  for (int i = 0; i < d; ++i) v(i) = complex_normal();
  return v / v.norm();
}

CMatrix SeededSampler::ginibre(int d) {
  CMatrix m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = complex_normal();
  }
  return m;
}

CMatrix SeededSampler::haar_unitary(int d) {
  const Eigen::HouseholderQR<CMatrix> qr(ginibre(d));
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const double m = std::abs(r(i, i));
    if (m > 0.0) q.col(i) *= r(i, i) / m;
  }
  return q;
}

CMatrix SeededSampler::random_density(int d, double lo, double hi) {
  RVector p(d);
  for (int i = 0; i < d; ++i) p(i) = lo + (hi - lo) * uniform();
  p /= p.sum();
  const CMatrix u = haar_unitary(d);
  CMatrix rho = u * p.cast<cplx>().asDiagonal() * u.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

SeededSampler SeededSampler::shard(std::uint64_t index) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint64_t derived = 0;
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  derived = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return SeededSampler(derived);
}

std::vector<cplx> sample_range(const SquareComplexMatrix& a, std::size_t n, SeededSampler& rng) {
  std::vector<cplx> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CVector x = rng.haar_vector(a.dim());
    out.push_back(x.dot(a.entries() * x));
  }
  return out;
}

std::vector<cplx> convex_hull(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx p, cplx q) {
    return p.real() < q.real() || (p.real() == q.real() && p.imag() < q.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](cplx o, cplx p, cplx q) {
    return (p - o).real() * (q - o).imag() - (p - o).imag() * (q - o).real();
  };
  std::vector<cplx> hull(2 * pts.size());
  std::size_t k = 0;
  for (const cplx& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double point_support(const std::vector<cplx>& points, double theta) {
  const cplx u = std::polar(1.0, theta);
  double best = dot(u, points.front());
  for (const cplx& p : points) best = std::min(best, dot(u, p));
  return best;
}

double support_violation(const EigenCurveTable& table, const std::vector<cplx>& points) {
  const std::vector<cplx> hull = convex_hull(points);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < table.grid().size(); ++j) {
    const double t = table.grid().angle(j);
    worst = std::max(worst, min_eigenvalue(table, t).value - point_support(hull, t));
  }
  return worst;
}

double hausdorff_to_range(const EigenCurveTable& table, const std::vector<cplx>& points) {
  const std::vector<cplx> hull = convex_hull(points);
  double worst = 0.0;
  for (std::size_t j = 0; j < table.grid().size(); ++j) {
    const double t = table.grid().angle(j);
    worst = std::max(worst, std::abs(min_eigenvalue(table, t).value - point_support(hull, t)));
  }
  return worst;
}

namespace {

double entropy_of_spectrum(const RVector& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) s -= p(i) * std::log(p(i));
  }
  return s;
}

// Orthonormal basis (real Frobenius product) of span{I, H0, H1}.
std::vector<CMatrix> constraint_basis(const SquareComplexMatrix& a) {
  const int d = a.dim();
  std::vector<CMatrix> basis;
  for (const CMatrix& m : {CMatrix(CMatrix::Identity(d, d)), a.real_part().entries(),
                           a.imag_part().entries()}) {
    CMatrix v = m;
    for (const CMatrix& b : basis) v -= (b.adjoint() * v).trace().real() * b;
    const double n = v.norm();
    if (n > 1e-12 * (1.0 + m.norm())) basis.push_back(v / n);
  }
  return basis;
}

CMatrix project_tangent(const std::vector<CMatrix>& basis, CMatrix g) {
  for (const CMatrix& b : basis) g -= (b.adjoint() * g).trace().real() * b;
  return 0.5 * (g + g.adjoint());
}

double residual_of(const SquareComplexMatrix& a, const CMatrix& rho, cplx z) {
  const cplx w = (rho * a.entries()).trace();
  return std::abs(w.real() - z.real()) + std::abs(w.imag() - z.imag());
}

// A strictly positive feasible state: t I/d mixed with a convex combination
// of three sampled pure states whose images surround the stretched target.
std::optional<CMatrix> feasible_start(const SquareComplexMatrix& a, cplx z, SeededSampler& rng) {
  const int d = a.dim();
  const cplx c = a.barycenter();
  std::vector<CVector> states;
  std::vector<cplx> images;
  for (int i = 0; i < 4000; ++i) {
    states.push_back(rng.haar_vector(d));
    images.push_back(states.back().dot(a.entries() * states.back()));
  }
  // Haar images thin out near the boundary, so add ground states of the
  // rotated real parts, which land on it.
  for (int i = 0; i < 4096; ++i) {
    const double theta = kTwoPi * i / 4096.0;
    const CMatrix h = 0.5 * (std::polar(1.0, -theta) * a.entries() + std::polar(1.0, theta) * a.entries().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    states.push_back(es.eigenvectors().col(0));
    images.push_back(states.back().dot(a.entries() * states.back()));
  }
  // Extreme images over a fan of directions; triangles of these at several
  // angular spreads cover targets from deep inside down to the boundary.
  constexpr int kDirs = 4096;
  std::vector<std::size_t> extreme(kDirs, 0);
  for (int r = 0; r < kDirs; ++r) {
    const cplx u = std::polar(1.0, kTwoPi * r / kDirs);
    for (std::size_t i = 1; i < images.size(); ++i) {
      if (dot(u, images[i]) > dot(u, images[extreme[static_cast<std::size_t>(r)]])) extreme[static_cast<std::size_t>(r)] = i;
    }
  }
  for (double t : {0.5, 0.2, 0.05, 0.01, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
    const cplx target = c + (z - c) / (1.0 - t);
    for (int spread : {1365, 1024, 682, 341, 128, 64, 32, 16, 8, 4, 2, 1}) {
      for (int r = 0; r < kDirs; ++r) {
        const std::array<std::size_t, 3> pick{extreme[static_cast<std::size_t>(r)],
                                              extreme[static_cast<std::size_t>((r + spread) % kDirs)],
                                              extreme[static_cast<std::size_t>((r + kDirs - spread) % kDirs)]};
        const cplx p0 = images[pick[0]], p1 = images[pick[1]], p2 = images[pick[2]];
        const double det = ((p1 - p0) * std::conj(p2 - p0)).imag();
        if (std::abs(det) < 1e-14) continue;
        // Barycentric coordinates of target in (p0, p1, p2).
        const double w1 = ((target - p0) * std::conj(p2 - p0)).imag() / det;
        const double w2 = ((p1 - p0) * std::conj(target - p0)).imag() / det;
        const double w0 = 1.0 - w1 - w2;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        CMatrix rho = t * CMatrix::Identity(d, d) / static_cast<double>(d);
        const std::array<double, 3> w{w0, w1, w2};
        for (int k = 0; k < 3; ++k) {
          const CVector& x = states[pick[static_cast<std::size_t>(k)]];
          rho += (1.0 - t) * w[static_cast<std::size_t>(k)] * (x * x.adjoint());
        }
        return CMatrix(0.5 * (rho + rho.adjoint()));
      }
    }
  }
  return std::nullopt;
}

}  // namespace

GridMaxEntResult primal_maxent(const SquareComplexMatrix& a, const CMatrix& start,
                               int iterations) {
  const std::vector<CMatrix> basis = constraint_basis(a);
  const int d = a.dim();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(start);
  CMatrix rho = start;
  double s = entropy_of_spectrum(es.eigenvalues());
  double step = 1e-2;
  for (int it = 0; it < iterations; ++it) {
    es.compute(rho);
    const RVector p = es.eigenvalues().cwiseMax(1e-300);
    const CMatrix log_rho = es.eigenvectors() * p.array().log().matrix().cast<cplx>().asDiagonal() *
                            es.eigenvectors().adjoint();
    const CMatrix g = project_tangent(basis, -log_rho - CMatrix::Identity(d, d));
    const double gn2 = g.squaredNorm();
    if (gn2 < 1e-26) break;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const CMatrix trial = rho + step * g;
      Eigen::SelfAdjointEigenSolver<CMatrix> ts(trial, Eigen::EigenvaluesOnly);
      if (ts.eigenvalues().minCoeff() > 0.0) {
        const double st = entropy_of_spectrum(ts.eigenvalues());
        if (st >= s + 1e-4 * step * gn2) {
          rho = trial;
          s = st;
          improved = true;
          step *= 2.0;
          break;
        }
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  GridMaxEntResult out;
  out.state = rho;
  out.entropy = s;
  return out;
}

GridMaxEntResult grid_maxent(const SquareComplexMatrix& a, cplx z, SeededSampler& rng,
                             GridMaxEntOptions opt) {
  const int d = a.dim();
  const int n = opt.simplex_divisions;
  const double scale = a.norm() > 0.0 ? a.norm() : 1.0;
  const double slack = opt.slack > 0.0 ? opt.slack : 2.0 * scale / n;

  // Compositions of n into d parts give the simplex mesh.
  std::vector<RVector> spectra;
  std::vector<int> parts(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == d - 1) {
      parts[static_cast<std::size_t>(i)] = left;
      RVector p(d);
      for (int k = 0; k < d; ++k) p(k) = static_cast<double>(parts[static_cast<std::size_t>(k)]) / n;
      spectra.push_back(p);
      return;
    }
    for (int m = 0; m <= left; ++m) {
      parts[static_cast<std::size_t>(i)] = m;
      rec(i + 1, left - m);
    }
  };
  rec(0, n);

  GridMaxEntResult out;
  out.mesh_step = 1.0 / n;
  out.slack = slack;
  out.mesh_entropy = -1.0;
  CMatrix mesh_best;
  for (std::size_t u = 0; u < opt.unitaries; ++u) {
    const CMatrix q = rng.haar_unitary(d);
    const CMatrix rotated = q.adjoint() * a.entries() * q;
    for (const RVector& p : spectra) {
      cplx w = 0.0;
      for (int k = 0; k < d; ++k) w += p(k) * rotated(k, k);
      if (std::abs(w - z) > slack) continue;
      ++out.feasible_mesh_points;
      const double s = entropy_of_spectrum(p);
      if (s > out.mesh_entropy) {
        out.mesh_entropy = s;
        mesh_best = q * p.cast<cplx>().asDiagonal() * q.adjoint();
      }
    }
  }
  if (out.feasible_mesh_points == 0) throw InfeasibleError("infeasible at this mesh");

  const std::optional<CMatrix> start = feasible_start(a, z, rng);
  if (!start) {
    out.state = mesh_best;
    out.entropy = out.mesh_entropy;
    out.residual = residual_of(a, mesh_best, z);
    return out;
  }
  const GridMaxEntResult refined = primal_maxent(a, *start, opt.ascent_iterations);
  out.state = refined.state;
  out.entropy = refined.entropy;
  out.residual = residual_of(a, refined.state, z);
  return out;
}

std::vector<CMatrix> perturbation_states(const SquareComplexMatrix& a, const CMatrix& rho,
                                         std::size_t count, SeededSampler& rng) {
  const std::vector<CMatrix> basis = constraint_basis(a);
  const int d = a.dim();
  std::vector<CMatrix> out;
  auto min_eig = [](const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  while (out.size() < count) {
    CMatrix delta = project_tangent(basis, rng.ginibre(d));
    const double norm = delta.norm();
    if (norm < 1e-12) continue;
    delta /= norm;
    // Largest s with rho + s delta positive semidefinite, by bisection.
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (min_eig(rho + mid * delta) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double s = lo * (0.01 + 0.99 * rng.uniform());
    const CMatrix sigma = rho + s * delta;
    out.push_back(0.5 * (sigma + sigma.adjoint()));
  }
  return out;
}

FiniteDifference finite_difference(const std::function<double(double)>& f, double theta,
                                   int order) {
  if (order != 1 && order != 2) throw InputError("finite_difference supports orders 1 and 2");
  FiniteDifference out;
  const double f0 = f(theta);
  if (order == 1) {
    const double h = 1e-5;
    auto central = [&](double s) { return (f(theta + s) - f(theta - s)) / (2.0 * s); };
    const double fwd = (-3.0 * f0 + 4.0 * f(theta + h) - f(theta + 2.0 * h)) / (2.0 * h);
    const double bwd = (3.0 * f0 - 4.0 * f(theta - h) + f(theta - 2.0 * h)) / (2.0 * h);
    if (std::abs(fwd - bwd) > 1e-3 * (1.0 + std::abs(fwd) + std::abs(bwd))) {
      out.one_sided = true;
      out.value = fwd;
      return out;
    }
    out.value = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    return out;
  }
  const double h = 1e-4;
  auto central = [&](double s) { return (f(theta + s) - 2.0 * f0 + f(theta - s)) / (s * s); };
  const double fwd = (2.0 * f0 - 5.0 * f(theta + h) + 4.0 * f(theta + 2.0 * h) - f(theta + 3.0 * h)) / (h * h);
  const double bwd = (2.0 * f0 - 5.0 * f(theta - h) + 4.0 * f(theta - 2.0 * h) - f(theta - 3.0 * h)) / (h * h);
  // The one-sided second differences carry O(h) error; a real jump in the
  // first derivative shows up at O(1/h).
  const double d1f = (f(theta + h) - f0) / h, d1b = (f0 - f(theta - h)) / h;
  if (std::abs(d1f - d1b) > 1e-2 * (1.0 + std::abs(fwd) + std::abs(bwd)) + 10.0 * h * (1.0 + std::abs(fwd))) {
    out.one_sided = true;
    out.value = fwd;
    return out;
  }
  out.value = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  return out;
}

std::array<double, 4> elliptic_support_jet(cplx a, cplx b, cplx e, double theta) {
  const cplx u = std::polar(1.0, -theta);
  const cplx s = 0.5 * (a + e), dl = 0.5 * (a - e);
  const double m = (u * s).real(), m1 = (u * s).imag();
  const double q = (u * dl).real(), q1 = (u * dl).imag();
  const double beta2 = 0.25 * std::norm(b);
  const double g = std::sqrt(q * q + beta2);
  const double g1 = q * q1 / g;
  const double n = q1 * q1 - q * q;
  const double g2 = n / g - q * q * q1 * q1 / (g * g * g);
  const double n1 = -4.0 * q * q1;
  const double g3 = n1 / g - n * g1 / (g * g) - (2.0 * q * q1 * q1 * q1 - 2.0 * q * q * q * q1) / (g * g * g) +
                    3.0 * q * q * q1 * q1 * g1 / (g * g * g * g);
  return {m - g, m1 - g1, -m - g2, -m1 - g3};
}

std::optional<double> tangency_exponent(const BoundaryGeometry& g, double theta_star) {
  std::optional<double> out;
  for (const CrossingRecord& c : g.crossings()) {
    if (!c.involves_minimum) continue;
    if (std::abs(wrap_angle(c.theta - theta_star + kPi) - kPi) > 1e-4) continue;
    out = c.exponent;
  }
  return out;
}

C2Witness search_c2_nonanalytic(int dim, std::uint64_t seed, int budget) {
  if (dim < 4) throw InputError("search_c2_nonanalytic needs dim >= 4");
  SeededSampler rng(seed);
  C2Witness w;
  for (int attempt = 1; attempt <= budget; ++attempt) {
    w.attempts = attempt;
    const cplx a = 0.6 * rng.complex_normal();
    const cplx e = 0.6 * rng.complex_normal();
    const cplx b = std::polar(0.8 + 0.8 * rng.uniform(), kTwoPi * rng.uniform());
    const double theta = kTwoPi * rng.uniform();
    const auto h = elliptic_support_jet(a, b, e, theta);
    // Osculating disk: matches h, h' and h'' at theta.
    const double uval = -h[2];
    const double vval = h[1];
    const double radius = -(h[0] + h[2]);
    if (radius <= 1e-3) continue;
    const double third = h[3] + vval;  // h_E''' - h_D'''
    const double scale = std::max({std::abs(a), std::abs(e), std::abs(b), radius, 1.0});
    if (std::abs(third) < 0.2 * scale) continue;
    const cplx c = std::polar(1.0, theta) * cplx(uval, vval);

    CMatrix m = CMatrix::Zero(dim, dim);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 1) = e;
    m(2, 2) = c;
    m(2, 3) = 2.0 * radius;
    m(3, 3) = c;
    for (int i = 4; i < dim; ++i) m(i, i) = 0.5 * (a + e);
    const SquareComplexMatrix candidate(m);
    const BoundaryGeometry geom(candidate);
    const std::optional<double> p = tangency_exponent(geom, theta);
    if (!p || std::abs(*p - 3.0) > 0.3) continue;
    w.found = true;
    w.matrix = candidate;
    w.theta_star = wrap_angle(theta);
    w.z_star = std::polar(1.0, theta) * cplx(h[0], h[1]);
    w.exponent = *p;
    w.note = "osculating disk block attached to an elliptic block";
    return w;
  }
  w.note = "search budget exhausted";
  return w;
}

}  // namespace numrange
