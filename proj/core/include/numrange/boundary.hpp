#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "numrange/eigencurves.hpp"

namespace numrange {

struct GeometryOptions {
  std::size_t grid = AngleGrid::kDefaultSize;
  // Facet threshold on |x_+ - x_-|; <= 0 selects 1e-7 (1 + ||A||).
  double tol_facet = 0.0;
  // Upper bound on regular exposed points sampled along the arcs.
  std::size_t max_regular_samples = 512;
};

/// Support data at one normal angle. x_plus and x_minus are the endpoints of
/// the exposed face with inner normal e^{i theta}.
struct BoundarySample {
  double theta = 0.0;
  double lambda = 0.0;
  double left_deriv = 0.0;
  double right_deriv = 0.0;
  std::optional<double> second_deriv;  // empty when the two sides disagree
  cplx x_plus;
  cplx x_minus;
  bool is_regular_normal = true;
};

struct FacetRecord {
  double alpha = 0.0;  // singular normal angle
  cplx x_minus;        // clockwise endpoint
  cplx x_plus;         // counterclockwise endpoint
  double length = 0.0;
};

struct CornerRecord {
  cplx z;
  double alpha_begin = 0.0;  // normals of the two incident facets
  double alpha_end = 0.0;
  double splitting_residual = 0.0;
};

enum class ExtremeKind { regular_exposed, non_exposed, corner };
std::string to_string(ExtremeKind kind);

enum class Side { cw, ccw };

/// One classified extreme point. Orders: std::nullopt means analytic.
struct ExtremePointRecord {
  cplx z;
  ExtremeKind kind = ExtremeKind::regular_exposed;
  double theta_begin = 0.0;  // normal angle, or the normal cone [begin, end] at a corner
  double theta_end = 0.0;
  int incident_facets = 0;
  double rho_minus = 0.0;  // clockwise one-sided radius of curvature
  double rho_plus = 0.0;   // counterclockwise one-sided radius of curvature
  std::optional<int> order_minus;
  std::optional<int> order_plus;
};

/// Open arc (begin, end) of the normal circle between consecutive singular
/// normals; end may exceed 2 pi.
struct NormalArc {
  double begin = 0.0;
  double end = 0.0;
  bool collapses = false;  // x_W constant on the arc: a corner
  std::optional<cplx> corner;
};

struct ArcPartition {
  std::vector<double> singular_normals;
  std::vector<NormalArc> arcs;
  bool bijection_ok = true;  // corners from arcs are distinct and match facet endpoints
};

/// W(A) contained in a line: a single point or a segment [a, b].
struct DegenerateRange {
  bool is_point = false;
  cplx a;
  cplx b;
};

struct Classification {
  std::optional<DegenerateRange> degenerate;
  std::vector<ExtremePointRecord> points;
  std::vector<FacetRecord> facets;
  std::vector<CornerRecord> corners;
};

/// Boundary geometry of the numerical range computed from its support
/// function lambda(theta). Immutable after construction.
class BoundaryGeometry {
 public:
  explicit BoundaryGeometry(const SquareComplexMatrix& a, GeometryOptions opt = {});

  const EigenCurveTable& table() const { return table_; }
  const SquareComplexMatrix& matrix() const { return table_.matrix(); }
  double tol_facet() const { return tol_facet_; }
  double scale() const { return table_.scale(); }

  BoundarySample support(double theta) const;
  const std::vector<double>& singular_normals() const { return partition_.singular_normals; }
  const ArcPartition& arc_partition() const { return partition_; }
  std::vector<CornerRecord> detect_corners() const;

  // -(lambda + lambda'') along the branch that is minimal on the given side.
  // +inf at a singular normal (the facet); DomainError inside a corner's cone.
  double radius_of_curvature(double theta, Side side) const;
  // One-sided limit of -(lambda + lambda'') at theta, with no facet shortcut.
  double radius_limit(double theta, Side side) const;

  Classification classify() const;
  std::optional<DegenerateRange> degeneracy() const { return degenerate_; }

  // alpha_K'(theta) on regular arcs after moving the barycenter to 0.
  std::vector<std::pair<double, double>> orientation_rates() const;
  bool orientation_check() const;

  // Index of the arc containing theta, or -1 at a singular normal.
  int arc_index(double theta) const;
  bool on_regular_arc(double theta) const;

  const std::vector<CrossingRecord>& crossings() const { return crossings_; }

 private:
  void find_singular_normals();
  void build_partition();

  EigenCurveTable table_;
  GeometryOptions opt_;
  double tol_facet_ = 0.0;
  std::optional<DegenerateRange> degenerate_;
  ArcPartition partition_;
  std::vector<CrossingRecord> crossings_;
};

// Free-function forms of the operations.
BoundarySample support(const BoundaryGeometry& g, double theta);
std::vector<double> singular_normals(const SquareComplexMatrix& a, GeometryOptions opt = {});
ArcPartition arc_partition(const SquareComplexMatrix& a, GeometryOptions opt = {});
std::vector<CornerRecord> detect_corners(const SquareComplexMatrix& a, GeometryOptions opt = {});
Classification classify_boundary(const SquareComplexMatrix& a, GeometryOptions opt = {});
bool orientation_check(const SquareComplexMatrix& a, GeometryOptions opt = {});

// Detects W(A) lying in a line from the linear dependence of Re(A - c) and
// Im(A - c), c = tr(A)/d.
std::optional<DegenerateRange> detect_degenerate(const SquareComplexMatrix& a);

}  // namespace numrange
