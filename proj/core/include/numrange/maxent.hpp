#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "numrange/boundary.hpp"

namespace numrange {

enum class MaxEntKind { interior, extreme, facet_relative_interior };
std::string to_string(MaxEntKind kind);

struct MaxEntResult {
  CMatrix state;
  MaxEntKind kind = MaxEntKind::interior;
  std::array<double, 2> dual_params{0.0, 0.0};  // interior only
  double entropy = 0.0;
  double residual = 0.0;  // |tr(rho H0) - Re z| + |tr(rho H1) - Im z|
};

// Branches k with |z_k(theta) - z| <= 1e-7 (1 + ||A||). ToleranceBreakdown
// when empty.
std::vector<int> index_set(const EigenCurveTable& table, cplx z, double theta);

// Orthogonal projection onto the span of the corresponding branch vectors.
CMatrix ground_projection(const EigenCurveTable& table, cplx z, double theta);

// p / tr p.
MaxEntResult maxent_extreme(const EigenCurveTable& table, cplx z, double theta);

// Dual Newton iteration for exp(mu0 H0 + mu1 H1)/Z. Requires the support
// margin 1e-6 ||A|| at every grid angle: InfeasibleError outside W,
// DomainError ("boundary proximity") inside the margin.
MaxEntResult maxent_interior(const EigenCurveTable& table, cplx z);
MaxEntResult maxent_interior(const SquareComplexMatrix& a, cplx z);

// MaxEnt state on the relative interior of the facet with normal alpha,
// solved on the compressed ground space of the facet normal.
MaxEntResult maxent_facet(const BoundaryGeometry& g, cplx z, double alpha);

/// Where a target sits relative to W(A).
struct TargetLocation {
  enum class Kind { interior, near_boundary, extreme, facet_relative_interior, outside };
  Kind kind = Kind::interior;
  double theta = 0.0;   // best normal angle for boundary targets
  double margin = 0.0;  // min over normals of <e^{i t}, z> - lambda(t)
};
TargetLocation locate_target(const BoundaryGeometry& g, cplx z);

// Dispatches between the interior, extreme and facet solvers. Handles ranges
// contained in a line. InfeasibleError outside W.
MaxEntResult infer(const BoundaryGeometry& g, cplx z);

// p e^{p log(rho) p} / tr(...) with matrix functions taken on the
// compressed block. InputError unless the prior is positive definite.
CMatrix prior_inference(const EigenCurveTable& table, cplx z, double theta, const CMatrix& prior);

struct ContinuityRecord {
  cplx z;
  ExtremeKind kind = ExtremeKind::regular_exposed;
  double theta = 0.0;
  std::vector<int> branches;  // index set at (z, theta)
  bool maxent_continuous = true;
  bool f_inv_strong = true;
  bool f_inv_weak = true;
  bool in_facet = false;
  // A corresponding branch pair that agrees to first order at theta without
  // being identical.
  std::optional<std::pair<int, int>> witness;
  std::optional<double> witness_exponent;
};

struct ContinuityReport {
  std::vector<ContinuityRecord> points;
  std::vector<ContinuityRecord> discontinuities;
};

ContinuityReport scan_discontinuities(const BoundaryGeometry& g);

// Boundary points where a state map jumps: the trace distance between the
// value at an extreme point and its along-boundary limits exceeds
// `threshold`. `prior` empty selects the MaxEnt map itself.
struct JumpRecord {
  cplx z;
  double theta = 0.0;
  double jump = 0.0;
};
std::vector<JumpRecord> scan_jumps(const BoundaryGeometry& g, const std::optional<CMatrix>& prior,
                                   double threshold = 1e-2);

// Generic exponential-family solver: rho = exp(sum mu_i O_i)/Z with
// tr(rho O_i) = targets_i. Used by the interior, facet and line cases.
struct ExpFamilySolution {
  CMatrix state;
  std::vector<double> mu;
  double residual = 0.0;
  int iterations = 0;
};
ExpFamilySolution solve_exponential_family(const std::vector<HermitianMatrix>& ops,
                                           const std::vector<double>& targets,
                                           double tol = 1e-12, int max_iter = 200);

}  // namespace numrange
