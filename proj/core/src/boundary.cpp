#include "numrange/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numrange/errors.hpp"

namespace numrange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAngleDup = 1e-9;

double periodic_distance(double x, double y) {
  const double d = std::abs(wrap_angle(x) - wrap_angle(y));
  return std::min(d, kTwoPi - d);
}

// Intersection of the supporting lines <e^{i a1}, z> = l1 and <e^{i a2}, z> = l2.
std::optional<cplx> line_intersection(double a1, double l1, double a2, double l2) {
  const double det = std::sin(a2 - a1);
  if (std::abs(det) < 1e-12) return std::nullopt;
  const double x = (l1 * std::sin(a2) - l2 * std::sin(a1)) / det;
  const double y = (l2 * std::cos(a1) - l1 * std::cos(a2)) / det;
  return cplx(x, y);
}

}  // namespace

std::string to_string(ExtremeKind kind) {
  switch (kind) {
    case ExtremeKind::regular_exposed:
      return "regular_exposed";
    case ExtremeKind::non_exposed:
      return "non_exposed";
    case ExtremeKind::corner:
      return "corner";
  }
  return "unknown";
}

std::optional<DegenerateRange> detect_degenerate(const SquareComplexMatrix& a) {
  const cplx c = a.barycenter();
  const int d = a.dim();
  const CMatrix b0 = a.real_part().entries() - c.real() * CMatrix::Identity(d, d);
  const CMatrix b1 = a.imag_part().entries() - c.imag() * CMatrix::Identity(d, d);
  // Singular values of [vec B0, vec B1]; the Gram matrix would square the
  // conditioning of the line test.
  const Eigen::Index m = b0.size();
  Eigen::MatrixX2d cols(2 * m, 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    cols(2 * i, 0) = b0.data()[i].real();
    cols(2 * i + 1, 0) = b0.data()[i].imag();
    cols(2 * i, 1) = b1.data()[i].real();
    cols(2 * i + 1, 1) = b1.data()[i].imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixX2d> svd(cols, Eigen::ComputeFullV);
  const double tol = 1e-9 * (a.norm() > 0.0 ? a.norm() : 1.0);
  const double small = svd.singularValues()(1);
  const double large = svd.singularValues()(0);
  if (small > tol) return std::nullopt;

  DegenerateRange out;
  if (large <= tol) {
    out.is_point = true;
    out.a = out.b = c;
    return out;
  }
  // Width vanishes along the normal (cos t, sin t); the segment runs along t + pi/2.
  const Eigen::Vector2d n = svd.matrixV().col(1);
  const double phi = std::atan2(n(1), n(0)) + 0.5 * kPi;
  auto endpoint = [&](double theta) {
    const EigenSystem s = eigh(rotated_real_part(a, theta));
    return numerical_range_map(a, s.vectors.col(0).normalized());
  };
  out.a = endpoint(phi);
  out.b = endpoint(phi + kPi);
  return out;
}

BoundaryGeometry::BoundaryGeometry(const SquareComplexMatrix& a, GeometryOptions opt)
    : table_(a, AngleGrid(opt.grid)), opt_(opt) {
  tol_facet_ = opt.tol_facet > 0.0 ? opt.tol_facet : 1e-7 * (1.0 + a.norm());
  degenerate_ = detect_degenerate(a);
  crossings_ = find_crossings(table_);
  find_singular_normals();
  build_partition();
}

BoundarySample BoundaryGeometry::support(double theta) const {
  const MinEigenvalue m = min_eigenvalue(table_, theta);
  BoundarySample s;
  s.theta = theta;
  s.lambda = m.value;
  s.left_deriv = m.left_deriv;
  s.right_deriv = m.right_deriv;
  const cplx u = std::polar(1.0, theta);
  s.x_plus = u * cplx(m.value, m.right_deriv);
  s.x_minus = u * cplx(m.value, m.left_deriv);
  s.is_regular_normal = std::abs(s.x_plus - s.x_minus) <= tol_facet_;
  if (std::abs(m.left_curvature - m.right_curvature) <= 1e-6 * scale()) {
    s.second_deriv = m.right_curvature;
  }
  return s;
}

void BoundaryGeometry::find_singular_normals() {
  const std::size_t n = table_.grid().size();
  const double tol = table_.cluster_tol();
  std::vector<double> found;

  std::vector<MinEigenvalue> at(n);
  for (std::size_t j = 0; j < n; ++j) {
    at[j] = min_eigenvalue(table_, table_.grid().angle(j));
    if (at[j].left_deriv - at[j].right_deriv > tol_facet_) found.push_back(table_.grid().angle(j));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const int k = at[j].right_branch;
    const int l = at[(j + 1) % n].left_branch;
    if (k == l || table_.identical(k, l)) continue;
    // The minimum hands over from branch k to branch l inside (theta_j, theta_j+1).
    const double t0 = table_.grid().angle(j);
    double lo = t0, hi = t0 + table_.grid().step();
    auto diff = [&](double t) {
      const BranchSample s = table_.sample(t);
      return s.values(k) - s.values(l);
    };
    if (diff(lo) > tol || diff(hi) < -tol) continue;
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (diff(mid) <= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double theta = 0.5 * (lo + hi);
    const MinEigenvalue m = min_eigenvalue(table_, theta);
    if (m.left_deriv - m.right_deriv > tol_facet_) found.push_back(wrap_angle(theta));
  }

  std::sort(found.begin(), found.end());
  std::vector<double> unique;
  for (double t : found) {
    bool dup = false;
    for (double u : unique) dup = dup || periodic_distance(u, t) < kAngleDup;
    if (!dup) unique.push_back(t);
  }
  partition_.singular_normals = unique;
}

void BoundaryGeometry::build_partition() {
  const auto& normals = partition_.singular_normals;
  partition_.arcs.clear();
  const std::size_t count = normals.size();
  if (count == 0) {
    NormalArc arc{0.0, kTwoPi, false, std::nullopt};
    if (degenerate_ && degenerate_->is_point) {
      arc.collapses = true;
      arc.corner = degenerate_->a;
    }
    partition_.arcs.push_back(arc);
    return;
  }
  for (std::size_t i = 0; i < count; ++i) {
    NormalArc arc;
    arc.begin = normals[i];
    arc.end = (i + 1 < count) ? normals[i + 1] : normals[0] + kTwoPi;
    const double len = arc.end - arc.begin;
    const cplx mid = support(arc.begin + 0.5 * len).x_plus;
    double spread = 0.0;
    for (int f = 1; f <= 7; ++f) {
      const BoundarySample s = support(arc.begin + len * f / 8.0);
      spread = std::max({spread, std::abs(s.x_plus - mid), std::abs(s.x_minus - mid)});
    }
    arc.collapses = spread <= 10.0 * tol_facet_;
    if (arc.collapses) {
      const double l1 = min_eigenvalue(table_, arc.begin).value;
      const double l2 = min_eigenvalue(table_, arc.end).value;
      arc.corner = line_intersection(arc.begin, l1, arc.end, l2).value_or(mid);
    }
    partition_.arcs.push_back(arc);
  }

  // Each corner arc must meet the facet endpoints on both sides, and no two
  // arcs may produce the same corner.
  const double tol = 1e-6 * (1.0 + scale());
  bool ok = true;
  std::vector<cplx> corners;
  for (const NormalArc& arc : partition_.arcs) {
    if (!arc.collapses) continue;
    const cplx z = *arc.corner;
    ok = ok && std::abs(support(arc.begin).x_plus - z) <= tol;
    ok = ok && std::abs(support(arc.end).x_minus - z) <= tol;
    for (const cplx& w : corners) ok = ok && std::abs(w - z) > tol;
    corners.push_back(z);
  }
  partition_.bijection_ok = ok;
}

int BoundaryGeometry::arc_index(double theta) const {
  const auto& normals = partition_.singular_normals;
  for (double a : normals) {
    if (periodic_distance(a, theta) < kAngleDup) return -1;
  }
  if (normals.empty()) return 0;
  const double t = wrap_angle(theta);
  for (std::size_t i = 0; i < partition_.arcs.size(); ++i) {
    const NormalArc& arc = partition_.arcs[i];
    if ((t > arc.begin && t < arc.end) || (t + kTwoPi > arc.begin && t + kTwoPi < arc.end)) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

bool BoundaryGeometry::on_regular_arc(double theta) const {
  const int i = arc_index(theta);
  return i >= 0 && !partition_.arcs[static_cast<std::size_t>(i)].collapses;
}

std::vector<CornerRecord> BoundaryGeometry::detect_corners() const {
  std::vector<CornerRecord> out;
  const SquareComplexMatrix& a = matrix();
  for (const NormalArc& arc : partition_.arcs) {
    if (!arc.collapses || partition_.singular_normals.empty()) continue;
    CornerRecord rec;
    rec.z = *arc.corner;
    rec.alpha_begin = wrap_angle(arc.begin);
    rec.alpha_end = wrap_angle(arc.end);
    // A corner is a normal splitting eigenvalue: Ax = zx and A*x = conj(z)x
    // for the ground vector of any normal inside the cone.
    const EigenSystem es = eigh(rotated_real_part(a, 0.5 * (arc.begin + arc.end)));
    const CVector x = es.vectors.col(0);
    const double r1 = (a.entries() * x - rec.z * x).norm();
    const double r2 = (a.entries().adjoint() * x - std::conj(rec.z) * x).norm();
    rec.splitting_residual = std::max(r1, r2);
    if (rec.splitting_residual > 1e-7 * scale()) {
      throw ToleranceBreakdown("corner candidate fails the normal splitting test");
    }
    out.push_back(rec);
  }
  return out;
}

double BoundaryGeometry::radius_limit(double theta, Side side) const {
  const MinEigenvalue m = min_eigenvalue(table_, theta);
  const double curvature = side == Side::ccw ? m.right_curvature : m.left_curvature;
  return -(m.value + curvature);
}

double BoundaryGeometry::radius_of_curvature(double theta, Side side) const {
  const int i = arc_index(theta);
  if (i < 0) return kInf;
  if (partition_.arcs[static_cast<std::size_t>(i)].collapses) {
    throw DomainError("normal cone interior: no curvature");
  }
  return radius_limit(theta, side);
}

Classification BoundaryGeometry::classify() const {
  Classification out;
  if (degenerate_) {
    out.degenerate = degenerate_;
    return out;
  }
  const auto& normals = partition_.singular_normals;
  for (double alpha : normals) {
    const BoundarySample s = support(alpha);
    out.facets.push_back({alpha, s.x_minus, s.x_plus, std::abs(s.x_plus - s.x_minus)});
  }
  out.corners = detect_corners();
  for (const CornerRecord& c : out.corners) {
    ExtremePointRecord rec;
    rec.z = c.z;
    rec.kind = ExtremeKind::corner;
    rec.theta_begin = c.alpha_begin;
    rec.theta_end = c.alpha_end;
    rec.incident_facets = 2;
    rec.rho_minus = rec.rho_plus = kInf;
    rec.order_minus = rec.order_plus = 0;
    out.points.push_back(rec);
  }

  if (!normals.empty()) {
    for (const NormalArc& arc : partition_.arcs) {
      if (arc.collapses) continue;
      // Facet endpoints next to a curved arc are non-exposed; the boundary is
      // C^1 but not C^2 there.
      ExtremePointRecord start;
      start.z = support(arc.begin).x_plus;
      start.kind = ExtremeKind::non_exposed;
      start.theta_begin = start.theta_end = wrap_angle(arc.begin);
      start.incident_facets = 1;
      start.rho_minus = kInf;
      start.rho_plus = radius_limit(arc.begin, Side::ccw);
      start.order_minus = start.order_plus = 1;
      out.points.push_back(start);

      ExtremePointRecord end;
      end.z = support(arc.end).x_minus;
      end.kind = ExtremeKind::non_exposed;
      end.theta_begin = end.theta_end = wrap_angle(arc.end);
      end.incident_facets = 1;
      end.rho_minus = radius_limit(arc.end, Side::cw);
      end.rho_plus = kInf;
      end.order_minus = end.order_plus = 1;
      out.points.push_back(end);
    }
  }

  // Crossings of the minimum that keep lambda differentiable.
  std::vector<double> special;
  std::vector<ExtremePointRecord> crossing_points;
  for (const CrossingRecord& c : crossings_) {
    if (!c.involves_minimum || !on_regular_arc(c.theta)) continue;
    bool dup = false;
    for (double t : special) dup = dup || periodic_distance(t, c.theta) < kAngleDup;
    if (dup) continue;
    special.push_back(c.theta);
    const BoundarySample s = support(c.theta);
    ExtremePointRecord rec;
    rec.z = s.x_plus;
    rec.kind = ExtremeKind::regular_exposed;
    rec.theta_begin = rec.theta_end = c.theta;
    rec.rho_minus = radius_limit(c.theta, Side::cw);
    rec.rho_plus = radius_limit(c.theta, Side::ccw);
    const int p = static_cast<int>(std::lround(c.exponent));
    if (c.order_resolved && p % 2 == 1) {
      // The minimum switches branches: lambda is C^{p-1} but not C^p.
      rec.order_minus = rec.order_plus = p - 1;
    }
    crossing_points.push_back(rec);
  }

  const std::size_t n = table_.grid().size();
  std::size_t regular_count = 0;
  for (std::size_t j = 0; j < n; ++j) regular_count += on_regular_arc(table_.grid().angle(j)) ? 1 : 0;
  const std::size_t stride =
      std::max<std::size_t>(1, (regular_count + opt_.max_regular_samples - 1) / opt_.max_regular_samples);
  std::size_t seen = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = table_.grid().angle(j);
    if (!on_regular_arc(theta)) continue;
    if (seen++ % stride != 0) continue;
    bool dup = false;
    for (double t : special) dup = dup || periodic_distance(t, theta) < kAngleDup;
    if (dup) continue;
    const BoundarySample s = support(theta);
    ExtremePointRecord rec;
    rec.z = s.x_plus;
    rec.kind = ExtremeKind::regular_exposed;
    rec.theta_begin = rec.theta_end = theta;
    rec.rho_minus = radius_limit(theta, Side::cw);
    rec.rho_plus = radius_limit(theta, Side::ccw);
    out.points.push_back(rec);
  }
  out.points.insert(out.points.end(), crossing_points.begin(), crossing_points.end());
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const ExtremePointRecord& x, const ExtremePointRecord& y) {
                     return x.theta_begin < y.theta_begin;
                   });
  return out;
}

std::vector<std::pair<double, double>> BoundaryGeometry::orientation_rates() const {
  std::vector<std::pair<double, double>> out;
  const cplx c = matrix().barycenter();
  for (std::size_t j = 0; j < table_.grid().size(); ++j) {
    const double theta = table_.grid().angle(j);
    if (!on_regular_arc(theta)) continue;
    const MinEigenvalue m = min_eigenvalue(table_, theta);
    const double h = m.value - dot(std::polar(1.0, theta), c);
    const double hp = m.right_deriv - dot(cplx(0.0, 1.0) * std::polar(1.0, theta), c);
    const double hh = m.value + m.right_curvature;
    out.emplace_back(theta, h / (h * h + hp * hp) * hh);
  }
  return out;
}

bool BoundaryGeometry::orientation_check() const {
  if (degenerate_) return true;
  for (const auto& [theta, rate] : orientation_rates()) {
    if (rate < -1e-9) return false;
  }
  return true;
}

BoundarySample support(const BoundaryGeometry& g, double theta) { return g.support(theta); }

std::vector<double> singular_normals(const SquareComplexMatrix& a, GeometryOptions opt) {
  return BoundaryGeometry(a, opt).singular_normals();
}

ArcPartition arc_partition(const SquareComplexMatrix& a, GeometryOptions opt) {
  return BoundaryGeometry(a, opt).arc_partition();
}

std::vector<CornerRecord> detect_corners(const SquareComplexMatrix& a, GeometryOptions opt) {
  return BoundaryGeometry(a, opt).detect_corners();
}

Classification classify_boundary(const SquareComplexMatrix& a, GeometryOptions opt) {
  return BoundaryGeometry(a, opt).classify();
}

bool orientation_check(const SquareComplexMatrix& a, GeometryOptions opt) {
  return BoundaryGeometry(a, opt).orientation_check();
}

}  // namespace numrange
