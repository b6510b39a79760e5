#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "numrange/boundary.hpp"

namespace numrange {

/// Reproducible random source. Identical seeds give identical streams.
class SeededSampler {
 public:
  explicit SeededSampler(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  double uniform();  // [0, 1)
  double normal();
  cplx complex_normal();  // E|w|^2 = 1

  CVector haar_vector(int d);
  CMatrix ginibre(int d);
  CMatrix haar_unitary(int d);
  // U diag(p) U* with p drawn uniformly from [lo, hi] and then normalized.
  CMatrix random_density(int d, double lo = 0.1, double hi = 1.0);

  // Independent stream for shard `index`, derived from the master seed.
  SeededSampler shard(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// f_A of n Haar-random unit vectors.
std::vector<cplx> sample_range(const SquareComplexMatrix& a, std::size_t n, SeededSampler& rng);

// Counterclockwise convex hull (monotone chain), collinear points dropped.
std::vector<cplx> convex_hull(std::vector<cplx> points);

// min over points of <e^{i theta}, p>.
double point_support(const std::vector<cplx>& points, double theta);

// max_theta (lambda(theta) - point_support(theta)) over the table grid.
double support_violation(const EigenCurveTable& table, const std::vector<cplx>& points);

// Hausdorff distance between conv(points) and W(A), evaluated as the sup-norm
// distance of the support functions on the table grid.
double hausdorff_to_range(const EigenCurveTable& table, const std::vector<cplx>& points);

struct GridMaxEntOptions {
  std::size_t unitaries = 400;
  int simplex_divisions = 24;  // spectra on the simplex mesh with step 1/n
  double slack = 0.0;          // <= 0 selects 2 ||A|| / n
  int ascent_iterations = 20000;
};

struct GridMaxEntResult {
  CMatrix state;
  double entropy = 0.0;
  double mesh_step = 0.0;
  double slack = 0.0;
  std::size_t feasible_mesh_points = 0;
  double mesh_entropy = 0.0;  // best entropy seen on the mesh itself
  double residual = 0.0;
};

// Brute-force MaxEnt: spectral mesh search, then projected primal gradient
// ascent on the affine slice alpha(rho) = z from a strictly positive feasible
// start. InfeasibleError("infeasible at this mesh") if nothing is found.
GridMaxEntResult grid_maxent(const SquareComplexMatrix& a, cplx z, SeededSampler& rng,
                             GridMaxEntOptions opt = {});

// Primal ascent alone, from a feasible positive definite start.
GridMaxEntResult primal_maxent(const SquareComplexMatrix& a, const CMatrix& start, int iterations);

// Feasible states sigma = rho + s Delta with tr(Delta) = tr(Delta H0) =
// tr(Delta H1) = 0 and sigma positive semidefinite.
std::vector<CMatrix> perturbation_states(const SquareComplexMatrix& a, const CMatrix& rho,
                                         std::size_t count, SeededSampler& rng);

struct FiniteDifference {
  double value = 0.0;
  bool one_sided = false;  // a kink was detected; value is the right derivative
};

// Richardson-extrapolated central differences, h = 1e-5 (order 1) or 1e-4
// (order 2).
FiniteDifference finite_difference(const std::function<double(double)>& f, double theta,
                                   int order);

struct C2Witness {
  bool found = false;
  SquareComplexMatrix matrix;
  double theta_star = 0.0;
  cplx z_star;
  double exponent = 0.0;
  int attempts = 0;
  std::string note;
};

// Direct sum of an elliptic 2x2 block and the disk block that osculates it
// at a random non-vertex normal, padded by interior points up to `dim`.
// The minimum switches between the two branches with third-order contact.
C2Witness search_c2_nonanalytic(int dim, std::uint64_t seed, int budget = 64);

// Exponent of the minimum-involving crossing within 1e-4 of theta_star.
std::optional<double> tangency_exponent(const BoundaryGeometry& g, double theta_star);

// Support function of the lower branch of [[a, b], [0, e]] and its first
// three derivatives.
std::array<double, 4> elliptic_support_jet(cplx a, cplx b, cplx e, double theta);

}  // namespace numrange
