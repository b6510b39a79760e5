#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace numrange {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Hermitian d x d matrix. Construction checks the symmetry within
/// 1e-10 relative to the largest entry and then symmetrizes exactly.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(CMatrix entries, double rel_tol = 1e-10);

  // Skips the symmetry check; the caller guarantees Hermiticity.
  static HermitianMatrix trusted(CMatrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }
  cplx operator()(int r, int c) const { return entries_(r, c); }

 private:
  CMatrix entries_;
};

/// The operator A. Caches its Hermitian parts H0 = Re A, H1 = Im A and its
/// spectral norm, all of which are used throughout the library.
class SquareComplexMatrix {
 public:
  SquareComplexMatrix() = default;
  explicit SquareComplexMatrix(CMatrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }
  const HermitianMatrix& real_part() const { return re_; }
  const HermitianMatrix& imag_part() const { return im_; }

  // Operator 2-norm ||A||.
  double norm() const { return norm_; }

  // tr(A)/d, always a point of the numerical range.
  cplx barycenter() const;

 private:
  CMatrix entries_;
  HermitianMatrix re_;
  HermitianMatrix im_;
  double norm_ = 0.0;
};

/// Spectral decomposition with ascending values and orthonormal columns.
struct EigenSystem {
  RVector values;
  CMatrix vectors;
};

// (H0, H1) with A = H0 + i H1.
std::pair<HermitianMatrix, HermitianMatrix> split(const SquareComplexMatrix& a);

// Re(e^{-i theta} A) = H0 cos(theta) + H1 sin(theta).
HermitianMatrix rotated_real_part(const SquareComplexMatrix& a, double theta);

// Im(e^{-i theta} A) = H1 cos(theta) - H0 sin(theta), the theta-derivative of
// rotated_real_part.
HermitianMatrix rotated_imag_part(const SquareComplexMatrix& a, double theta);

/// Cyclic complex Jacobi eigensolver. Ascending values; each eigenvector has
/// its first component of modulus > 1e-8 made real positive.
EigenSystem eigh(const HermitianMatrix& h);

// <x|A x> for a unit vector x (||x|| = 1 within 1e-10, else InputError).
cplx numerical_range_map(const SquareComplexMatrix& a, const CVector& x);

double spectral_norm(const CMatrix& m);

// Smallest eigenvalue of Re(e^{-i theta} A), i.e. the support function of W(A).
double support_value(const SquareComplexMatrix& a, double theta);

// Functions of Hermitian matrices through the spectral decomposition.
CMatrix hermitian_exp(const HermitianMatrix& h);
// Requires positive definite input (min eigenvalue > floor), else InputError.
CMatrix hermitian_log(const HermitianMatrix& h, double floor = 0.0);

// Von Neumann entropy -tr(rho log rho) in nats with 0 log 0 = 0.
double von_neumann_entropy(const HermitianMatrix& rho);

// Trace distance 1/2 ||rho - sigma||_1.
double trace_distance(const CMatrix& rho, const CMatrix& sigma);

// Maps an angle to [0, 2 pi).
double wrap_angle(double theta);

// Re(conj(u) z): the Euclidean scalar product of two points of the plane.
inline double dot(cplx u, cplx z) { return u.real() * z.real() + u.imag() * z.imag(); }

}  // namespace numrange
