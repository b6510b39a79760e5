#include "numrange/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "numrange/errors.hpp"
#include "numrange/optimize.hpp"

namespace numrange {

namespace {

double index_tol(const EigenCurveTable& table) { return 1e-7 * (1.0 + table.matrix().norm()); }

struct Correspondence {
  std::vector<int> indices;
  CMatrix basis;  // d x |indices|, orthonormal columns
};

Correspondence corresponding(const EigenCurveTable& table, cplx z, double theta) {
  const BranchSample s = table.sample(theta);
  const cplx u = std::polar(1.0, theta);
  Correspondence out;
  for (int k = 0; k < table.branches(); ++k) {
    const cplx zk = u * cplx(s.values(k), s.slopes(k));
    if (std::abs(zk - z) <= index_tol(table)) out.indices.push_back(k);
  }
  if (out.indices.empty()) {
    throw ToleranceBreakdown("tolerance breakdown: no eigenfunction corresponds to the point");
  }
  out.basis.resize(s.vectors.rows(), static_cast<Eigen::Index>(out.indices.size()));
  for (std::size_t c = 0; c < out.indices.size(); ++c) {
    out.basis.col(static_cast<Eigen::Index>(c)) = s.vectors.col(out.indices[c]);
  }
  return out;
}

double constraint_residual(const SquareComplexMatrix& a, const CMatrix& rho, cplx z) {
  const double x = (rho * a.real_part().entries()).trace().real();
  const double y = (rho * a.imag_part().entries()).trace().real();
  return std::abs(x - z.real()) + std::abs(y - z.imag());
}

MaxEntResult normalized_projection(const SquareComplexMatrix& a, const CMatrix& basis, cplx z,
                                   MaxEntKind kind) {
  MaxEntResult r;
  r.kind = kind;
  r.state = basis * basis.adjoint() / static_cast<double>(basis.cols());
  r.entropy = std::log(static_cast<double>(basis.cols()));
  r.residual = constraint_residual(a, r.state, z);
  return r;
}

double support_margin(const EigenCurveTable& table, cplx z, std::size_t* argmin = nullptr) {
  double margin = 0.0;
  std::size_t best = 0;
  for (std::size_t j = 0; j < table.grid().size(); ++j) {
    const double t = table.grid().angle(j);
    const double v = dot(std::polar(1.0, t), z) - min_eigenvalue(table, t).value;
    if (j == 0 || v < margin) {
      margin = v;
      best = j;
    }
  }
  if (argmin) *argmin = best;
  // The gap is only piecewise smooth in t: refine between the neighbors of
  // the grid minimum, where a facet point reaches zero off the grid.
  const double t0 = table.grid().angle(best);
  const double step = table.grid().step();
  const ScalarMinimum m = golden_minimize(
      [&](double t) { return dot(std::polar(1.0, t), z) - support_value(table.matrix(), t); },
      t0 - step, t0 + step);
  return std::min(margin, m.value);
}

CMatrix exp_family_state(const HermitianMatrix& k, double* log_z, EigenSystem* es_out) {
  const EigenSystem es = eigh(k);
  const double top = es.values.maxCoeff();
  RVector w = (es.values.array() - top).exp();
  const double z = w.sum();
  if (log_z) *log_z = top + std::log(z);
  if (es_out) *es_out = es;
  return es.vectors * (w / z).asDiagonal() * es.vectors.adjoint();
}

double trace_real(const CMatrix& x, const CMatrix& y) { return (x * y).trace().real(); }

}  // namespace

std::string to_string(MaxEntKind kind) {
  switch (kind) {
    case MaxEntKind::interior:
      return "interior";
    case MaxEntKind::extreme:
      return "extreme";
    case MaxEntKind::facet_relative_interior:
      return "facet_relative_interior";
  }
  return "unknown";
}

ExpFamilySolution solve_exponential_family(const std::vector<HermitianMatrix>& ops,
                                           const std::vector<double>& targets, double tol,
                                           int max_iter) {
  const std::size_t n = ops.size();
  const int d = ops.front().dim();
  std::vector<double> mu(n, 0.0);

  auto combine = [&](const std::vector<double>& m) {
    CMatrix k = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) k += m[i] * ops[i].entries();
    return HermitianMatrix::trusted(k);
  };
  auto objective = [&](const std::vector<double>& m) {
    double log_z = 0.0;
    exp_family_state(combine(m), &log_z, nullptr);
    for (std::size_t i = 0; i < n; ++i) log_z -= m[i] * targets[i];
    return log_z;
  };

  ExpFamilySolution sol;
  for (int it = 0;; ++it) {
    EigenSystem es;
    double log_z = 0.0;
    const CMatrix rho = exp_family_state(combine(mu), &log_z, &es);
    Eigen::VectorXd grad(static_cast<Eigen::Index>(n));
    std::vector<double> moments(n);
    for (std::size_t i = 0; i < n; ++i) {
      moments[i] = trace_real(rho, ops[i].entries());
      grad(static_cast<Eigen::Index>(i)) = moments[i] - targets[i];
    }
    sol.state = rho;
    sol.mu = mu;
    sol.residual = grad.cwiseAbs().sum();
    sol.iterations = it;
    if (sol.residual <= tol || it >= max_iter) break;

    // Kubo-Mori covariance: divided differences of exp on the spectrum.
    const RVector& e = es.values;
    const double top = e.maxCoeff();
    Eigen::MatrixXd f(d, d);
    double z = 0.0;
    for (int i = 0; i < d; ++i) z += std::exp(e(i) - top);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const double wi = std::exp(e(i) - top), wj = std::exp(e(j) - top);
        const double gap = e(i) - e(j);
        // expm1 keeps close pairs accurate; wide gaps would overflow it.
        if (gap == 0.0) {
          f(i, j) = wi;
        } else if (std::abs(gap) < 1.0) {
          f(i, j) = wj * std::expm1(gap) / gap;
        } else {
          f(i, j) = (wi - wj) / gap;
        }
      }
    }
    std::vector<CMatrix> rotated(n);
    for (std::size_t i = 0; i < n; ++i) {
      rotated[i] = es.vectors.adjoint() * ops[i].entries() * es.vectors;
    }
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            acc += (rotated[p](i, j) * rotated[q](j, i)).real() * f(i, j);
          }
        }
        hess(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
            acc / z - moments[p] * moments[q];
      }
    }
    hess += 1e-12 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    const Eigen::VectorXd step = -hess.ldlt().solve(grad);

    const double f0 = log_z - [&] {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += mu[i] * targets[i];
      return s;
    }();
    const double slope = grad.dot(step);
    double alpha = 1.0;
    std::vector<double> trial(n);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = mu[i] + alpha * step(static_cast<Eigen::Index>(i));
      if (objective(trial) <= f0 + 1e-4 * alpha * slope) {
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) {
      // Rounding floor of the objective: accept a full step only if it
      // lowers the moment mismatch.
      for (std::size_t i = 0; i < n; ++i) trial[i] = mu[i] + step(static_cast<Eigen::Index>(i));
      const CMatrix r2 = exp_family_state(combine(trial), nullptr, nullptr);
      double res2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) res2 += std::abs(trace_real(r2, ops[i].entries()) - targets[i]);
      if (res2 >= sol.residual) break;
    }
    mu = trial;
  }
  return sol;
}

std::vector<int> index_set(const EigenCurveTable& table, cplx z, double theta) {
  return corresponding(table, z, theta).indices;
}

CMatrix ground_projection(const EigenCurveTable& table, cplx z, double theta) {
  const Correspondence c = corresponding(table, z, theta);
  return c.basis * c.basis.adjoint();
}

MaxEntResult maxent_extreme(const EigenCurveTable& table, cplx z, double theta) {
  const Correspondence c = corresponding(table, z, theta);
  return normalized_projection(table.matrix(), c.basis, z, MaxEntKind::extreme);
}

MaxEntResult maxent_interior(const EigenCurveTable& table, cplx z) {
  const SquareComplexMatrix& a = table.matrix();
  const double delta = 1e-6 * a.norm();
  const double margin = support_margin(table, z);
  if (margin < -1e-9 * table.scale()) {
    throw InfeasibleError("infeasible: target lies outside the numerical range");
  }
  if (margin < delta || a.norm() == 0.0) {
    std::ostringstream msg;
    msg << "boundary proximity: support margin " << margin << " is below " << delta
        << "; use maxent_extreme or refuse";
    throw DomainError(msg.str());
  }
  const ExpFamilySolution sol =
      solve_exponential_family({a.real_part(), a.imag_part()}, {z.real(), z.imag()});
  MaxEntResult r;
  r.kind = MaxEntKind::interior;
  r.state = sol.state;
  r.dual_params = {sol.mu[0], sol.mu[1]};
  r.entropy = von_neumann_entropy(HermitianMatrix::trusted(0.5 * (r.state + r.state.adjoint())));
  r.residual = constraint_residual(a, r.state, z);
  if (r.residual > 1e-8 * table.scale()) {
    throw ToleranceBreakdown("dual Newton iteration did not reach the constraint tolerance");
  }
  return r;
}

MaxEntResult maxent_interior(const SquareComplexMatrix& a, cplx z) {
  return maxent_interior(EigenCurveTable(a), z);
}

MaxEntResult maxent_facet(const BoundaryGeometry& g, cplx z, double alpha) {
  const SquareComplexMatrix& a = g.matrix();
  const EigenSystem es = eigh(rotated_real_part(a, alpha));
  int m = 1;
  while (m < a.dim() && es.values(m) - es.values(0) <= g.table().cluster_tol()) ++m;
  const CMatrix v = es.vectors.leftCols(m);
  // Along the facet the free coordinate is Im(e^{-i alpha} z).
  const CMatrix t = v.adjoint() * rotated_imag_part(a, alpha).entries() * v;
  const double s = (std::polar(1.0, -alpha) * z).imag();
  const ExpFamilySolution sol =
      solve_exponential_family({HermitianMatrix::trusted(0.5 * (t + t.adjoint()))}, {s});
  MaxEntResult r;
  r.kind = MaxEntKind::facet_relative_interior;
  r.state = v * sol.state * v.adjoint();
  r.dual_params = {0.0, 0.0};
  r.entropy = von_neumann_entropy(HermitianMatrix::trusted(0.5 * (r.state + r.state.adjoint())));
  r.residual = constraint_residual(a, r.state, z);
  return r;
}

TargetLocation locate_target(const BoundaryGeometry& g, cplx z) {
  const EigenCurveTable& table = g.table();
  TargetLocation loc;
  std::size_t j = 0;
  loc.margin = support_margin(table, z, &j);
  if (loc.margin >= 1e-6 * g.matrix().norm() && g.matrix().norm() > 0.0) {
    loc.kind = TargetLocation::Kind::interior;
    return loc;
  }
  const double step = table.grid().step();
  const double t0 = table.grid().angle(j);
  const ScalarMinimum m = golden_minimize(
      [&](double t) { return dot(std::polar(1.0, t), z) - support_value(g.matrix(), t); },
      t0 - step, t0 + step);
  loc.margin = std::min(loc.margin, m.value);
  loc.theta = wrap_angle(m.value <= loc.margin ? m.arg : t0);
  const double tol_b = 1e-8 * (1.0 + g.scale());
  if (loc.margin < -tol_b) {
    loc.kind = TargetLocation::Kind::outside;
    return loc;
  }
  if (loc.margin > tol_b) {
    loc.kind = TargetLocation::Kind::near_boundary;
    return loc;
  }
  loc.kind = TargetLocation::Kind::extreme;
  for (double alpha : g.singular_normals()) {
    if (std::abs(wrap_angle(alpha - loc.theta + kPi) - kPi) < 1e-6) {
      loc.theta = alpha;
      const BoundarySample s = g.support(alpha);
      const double tol = index_tol(table);
      if (std::abs(z - s.x_minus) > tol && std::abs(z - s.x_plus) > tol) {
        loc.kind = TargetLocation::Kind::facet_relative_interior;
      }
      break;
    }
  }
  return loc;
}

namespace {

MaxEntResult infer_on_line(const SquareComplexMatrix& a, const DegenerateRange& r, cplx z) {
  const int d = a.dim();
  const double scale = a.norm() > 0.0 ? a.norm() : 1.0;
  const double tol = 1e-8 * (1.0 + scale);
  if (r.is_point) {
    if (std::abs(z - r.a) > tol) throw InfeasibleError("infeasible: target differs from W(A) = {a}");
    MaxEntResult out;
    out.kind = MaxEntKind::extreme;
    out.state = CMatrix::Identity(d, d) / static_cast<double>(d);
    out.entropy = std::log(static_cast<double>(d));
    out.residual = constraint_residual(a, out.state, z);
    return out;
  }
  const cplx dir = (r.b - r.a) / std::abs(r.b - r.a);
  const cplx w = std::conj(dir) * (z - r.a);
  const double len = std::abs(r.b - r.a);
  if (std::abs(w.imag()) > tol || w.real() < -tol || w.real() > len + tol) {
    throw InfeasibleError("infeasible: target lies outside the segment W(A)");
  }
  const CMatrix shifted = std::conj(dir) * (a.entries() - r.a * CMatrix::Identity(d, d));
  const HermitianMatrix t = HermitianMatrix::trusted(0.5 * (shifted + shifted.adjoint()));
  if (w.real() <= tol || w.real() >= len - tol) {
    const EigenSystem es = eigh(t);
    const bool low = w.real() <= tol;
    const double edge = low ? es.values(0) : es.values(d - 1);
    std::vector<int> cols;
    for (int k = 0; k < d; ++k) {
      if (std::abs(es.values(k) - edge) <= 1e-8 * scale) cols.push_back(k);
    }
    CMatrix basis(d, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      basis.col(static_cast<Eigen::Index>(c)) = es.vectors.col(cols[c]);
    }
    return normalized_projection(a, basis, z, MaxEntKind::extreme);
  }
  const ExpFamilySolution sol = solve_exponential_family({t}, {w.real()});
  MaxEntResult out;
  out.kind = MaxEntKind::interior;
  out.state = sol.state;
  out.dual_params = {sol.mu[0], 0.0};
  out.entropy = von_neumann_entropy(HermitianMatrix::trusted(0.5 * (out.state + out.state.adjoint())));
  out.residual = constraint_residual(a, out.state, z);
  return out;
}

}  // namespace

MaxEntResult infer(const BoundaryGeometry& g, cplx z) {
  if (g.degeneracy()) return infer_on_line(g.matrix(), *g.degeneracy(), z);
  const TargetLocation loc = locate_target(g, z);
  switch (loc.kind) {
    case TargetLocation::Kind::interior:
    case TargetLocation::Kind::near_boundary:
      return maxent_interior(g.table(), z);
    case TargetLocation::Kind::extreme:
      return maxent_extreme(g.table(), z, loc.theta);
    case TargetLocation::Kind::facet_relative_interior:
      return maxent_facet(g, z, loc.theta);
    case TargetLocation::Kind::outside:
      break;
  }
  throw InfeasibleError("infeasible: target lies outside the numerical range");
}

CMatrix prior_inference(const EigenCurveTable& table, cplx z, double theta, const CMatrix& prior) {
  if (prior.rows() != table.branches() || prior.cols() != table.branches()) {
    throw InputError("prior dimension does not match the matrix");
  }
  const HermitianMatrix rho(prior);
  const EigenSystem es = eigh(rho);
  if (!(es.values(0) > 1e-12)) throw InputError("prior must be positive definite");
  const CMatrix log_rho = hermitian_log(rho);
  const Correspondence c = corresponding(table, z, theta);
  const CMatrix block = c.basis.adjoint() * log_rho * c.basis;
  const CMatrix e = hermitian_exp(HermitianMatrix::trusted(0.5 * (block + block.adjoint())));
  const CMatrix out = c.basis * e * c.basis.adjoint();
  return out / out.trace().real();
}

namespace {

bool all_identical(const EigenCurveTable& table, const std::vector<int>& idx,
                   std::optional<std::pair<int, int>>* witness) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (!table.identical(idx[i], idx[j])) {
        if (witness) *witness = std::make_pair(idx[i], idx[j]);
        return false;
      }
    }
  }
  return true;
}

// Branch of `idx` that is minimal just to one side of theta. The offset grows
// until the non-identical candidates separate.
int minimal_side_branch(const EigenCurveTable& table, const std::vector<int>& idx, double theta,
                        double side) {
  const double step = table.grid().step();
  int best = idx.front();
  for (double f : {1.0, 4.0, 16.0, 64.0, 256.0}) {
    const double eps = std::min(f * step, 0.5);
    const BranchSample s = table.sample(theta + side * eps);
    best = idx.front();
    for (int k : idx) {
      if (s.values(k) < s.values(best)) best = k;
    }
    double gap = 0.0;
    bool separated = true;
    for (int k : idx) {
      if (k == best || table.identical(k, best)) continue;
      gap = s.values(k) - s.values(best);
      separated = separated && gap > 100.0 * table.cluster_tol();
    }
    if (separated) break;
  }
  return best;
}

}  // namespace

ContinuityReport scan_discontinuities(const BoundaryGeometry& g) {
  ContinuityReport report;
  if (g.degeneracy()) return report;
  const EigenCurveTable& table = g.table();
  const Classification cls = g.classify();
  const double ztol = index_tol(table);

  for (const ExtremePointRecord& p : cls.points) {
    ContinuityRecord rec;
    rec.z = p.z;
    rec.kind = p.kind;
    if (p.kind == ExtremeKind::corner) {
      // Corners are locally polytope-like: continuity is asserted.
      double end = p.theta_end;
      if (end < p.theta_begin) end += kTwoPi;
      rec.theta = wrap_angle(0.5 * (p.theta_begin + end));
      rec.branches = index_set(table, p.z, rec.theta);
      rec.in_facet = true;
      report.points.push_back(rec);
      continue;
    }
    rec.theta = p.theta_begin;
    rec.branches = index_set(table, p.z, rec.theta);
    const bool same = all_identical(table, rec.branches, &rec.witness);
    rec.maxent_continuous = same;
    rec.f_inv_strong = same;
    rec.in_facet = p.kind == ExtremeKind::non_exposed;
    if (rec.in_facet || same) {
      rec.f_inv_weak = true;
    } else {
      const int left = minimal_side_branch(table, rec.branches, rec.theta, -1.0);
      const int right = minimal_side_branch(table, rec.branches, rec.theta, 1.0);
      rec.f_inv_weak = left == right || table.identical(left, right);
    }
    if (rec.witness) {
      const auto [k, l] = *rec.witness;
      for (const CrossingRecord& c : g.crossings()) {
        const bool pair = (c.k == k && c.l == l) || (c.k == l && c.l == k);
        if (pair && std::abs(wrap_angle(c.theta - rec.theta + kPi) - kPi) < 1e-6) {
          rec.witness_exponent = c.exponent;
        }
      }
    }
    report.points.push_back(rec);
    if (!rec.maxent_continuous) {
      bool dup = false;
      for (const ContinuityRecord& d : report.discontinuities) dup = dup || std::abs(d.z - rec.z) <= ztol;
      if (!dup) report.discontinuities.push_back(rec);
    }
  }
  return report;
}

std::vector<JumpRecord> scan_jumps(const BoundaryGeometry& g, const std::optional<CMatrix>& prior,
                                   double threshold) {
  std::vector<JumpRecord> out;
  if (g.degeneracy()) return out;
  const EigenCurveTable& table = g.table();
  auto state_at = [&](cplx z, double theta) -> CMatrix {
    if (prior) return prior_inference(table, z, theta, *prior);
    return maxent_extreme(table, z, theta).state;
  };
  const double eps = 1e-4;
  const Classification cls = g.classify();
  for (const ExtremePointRecord& p : cls.points) {
    if (p.kind == ExtremeKind::corner) continue;
    const double theta = p.theta_begin;
    const CMatrix here = state_at(p.z, theta);
    double jump = 0.0;
    for (double side : {-1.0, 1.0}) {
      const double t = theta + side * eps;
      if (!g.on_regular_arc(t)) continue;
      const BoundarySample s = g.support(t);
      jump = std::max(jump, trace_distance(here, state_at(s.x_plus, t)));
    }
    if (jump > threshold) {
      bool dup = false;
      for (const JumpRecord& r : out) dup = dup || std::abs(r.z - p.z) <= index_tol(table);
      if (!dup) out.push_back({p.z, theta, jump});
    }
  }
  return out;
}

}  // namespace numrange
