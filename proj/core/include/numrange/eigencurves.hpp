#pragma once

#include <cstddef>
#include <vector>

#include "numrange/linalg.hpp"

namespace numrange {

/// Uniform periodic grid theta_j = 2 pi j / n on [0, 2 pi).
class AngleGrid {
 public:
  static constexpr std::size_t kDefaultSize = 4096;
  static constexpr std::size_t kMinSize = 512;
  static constexpr std::size_t kMaxSize = std::size_t{1} << 20;

  // n must be a power of two in [512, 2^20].
  explicit AngleGrid(std::size_t n = kDefaultSize);

  std::size_t size() const { return n_; }
  double step() const { return kTwoPi / static_cast<double>(n_); }
  double angle(std::size_t j) const { return step() * static_cast<double>(j % n_); }
  std::size_t nearest(double theta) const;

 private:
  std::size_t n_;
};

/// Spectrum of Re(e^{-i theta} A) at a single angle. Inside degenerate
/// clusters the basis follows the analytic (Rellich) branches: it
/// diagonalizes the compressed derivative Im(e^{-i theta} A), then the
/// second-order effective operator, and finally aligns whatever is still
/// degenerate with a reference basis when one is supplied.
struct ResolvedSpectrum {
  double theta = 0.0;
  RVector values;     // lambda_k
  RVector slopes;     // lambda_k' = <psi_k| Im(e^{-i theta} A) |psi_k>
  RVector curvatures; // lambda_k''
  CMatrix vectors;    // columns psi_k
};

// Columns are ordered by value, then slope. `reference` (d x d, columns)
// disambiguates clusters that perturbation theory cannot split.
ResolvedSpectrum resolve_spectrum(const SquareComplexMatrix& a, double theta,
                                  const CMatrix* reference = nullptr);

/// All branches at one angle, indexed by branch label.
using BranchSample = ResolvedSpectrum;

/// Result of min_eigenvalue: lambda(theta) and its one-sided derivatives.
struct MinEigenvalue {
  double value = 0.0;
  double left_deriv = 0.0;   // max slope over the active set
  double right_deriv = 0.0;  // min slope over the active set
  int left_branch = 0;       // branch that is minimal just left of theta
  int right_branch = 0;      // branch that is minimal just right of theta
  std::vector<int> active;   // branches attaining lambda(theta)
  double left_curvature = 0.0;
  double right_curvature = 0.0;
};

/// Branch-tracked eigenvalues and eigenvectors of Re(e^{-i theta} A) over a
/// periodic grid. Immutable once built.
class EigenCurveTable {
 public:
  // Builds the table (track_branches). Refines the grid by doubling until the
  // labels close up around the circle; throws ToleranceBreakdown
  // ("unresolved branch monodromy") past 2^20 points.
  EigenCurveTable(SquareComplexMatrix a, AngleGrid grid = AngleGrid());

  const SquareComplexMatrix& matrix() const { return a_; }
  const AngleGrid& grid() const { return grid_; }
  int branches() const { return d_; }

  double value(int k, std::size_t j) const { return values_[idx(k, j)]; }
  double slope(int k, std::size_t j) const { return slopes_[idx(k, j)]; }
  double curvature(int k, std::size_t j) const { return curvatures_[idx(k, j)]; }
  CVector vector(int k, std::size_t j) const { return vectors_[j % grid_.size()].col(k); }
  const CMatrix& vectors_at(std::size_t j) const { return vectors_[j % grid_.size()]; }

  // Position of branch k in the ascending spectrum at grid point j.
  int sorted_position(int k, std::size_t j) const { return positions_[idx(k, j)]; }

  // All branches at an arbitrary angle via a local re-solve matched against
  // the nearest grid point.
  BranchSample sample(double theta) const;

  // Cluster threshold 1e-8 ||A||.
  double cluster_tol() const { return cluster_tol_; }
  // Branch equality threshold 1e-7 ||A|| over the whole grid.
  double identity_tol() const { return identity_tol_; }
  // Scale used in relative tolerances: ||A||, or 1 for the zero matrix.
  double scale() const { return scale_; }

  // Branches k and l coincide as functions over the period.
  bool identical(int k, int l) const;

 private:
  std::size_t idx(int k, std::size_t j) const {
    return (j % grid_.size()) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(k);
  }
  bool build(std::size_t start);

  SquareComplexMatrix a_;
  AngleGrid grid_;
  int d_ = 0;
  double scale_ = 1.0;
  double cluster_tol_ = 0.0;
  double identity_tol_ = 0.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::vector<double> curvatures_;
  std::vector<int> positions_;
  std::vector<CMatrix> vectors_;
  std::vector<std::vector<char>> identical_;
};

EigenCurveTable track_branches(const SquareComplexMatrix& a, AngleGrid grid = AngleGrid());

// Hellmann-Feynman derivative of branch k; grid angles use stored values,
// other angles a local re-solve. Throws InputError for a bad branch index.
double branch_derivative(const EigenCurveTable& table, int k, double theta);

// lambda(theta) = min_k lambda_k(theta) with one-sided derivatives.
MinEigenvalue min_eigenvalue(const EigenCurveTable& table, double theta);
MinEigenvalue min_eigenvalue(const BranchSample& sample, double active_tol);

// z_k(theta) = e^{i theta} (lambda_k + i lambda_k').
cplx boundary_generating_point(const EigenCurveTable& table, int k, double theta);

struct CrossingRecord {
  double theta = 0.0;
  int k = 0;
  int l = 0;
  // Order of the first differing derivative minus one (0 = transversal).
  int contact_order = 0;
  // Fitted exponent of |lambda_k - lambda_l| ~ |theta - theta*|^p.
  double exponent = 0.0;
  // False when the log-log fit residual exceeded 0.1.
  bool order_resolved = false;
  bool involves_minimum = false;
};

std::vector<CrossingRecord> find_crossings(const EigenCurveTable& table);

// Fits the leading exponent of |lambda_k - lambda_l| around theta_star using
// 8 geometric stencil points per side. Returns {exponent, rms residual}.
std::pair<double, double> fit_difference_exponent(const EigenCurveTable& table, int k, int l,
                                                   double theta_star);

}  // namespace numrange
