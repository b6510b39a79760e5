#pragma once

#include <string>
#include <vector>

#include "numrange/boundary.hpp"

namespace numrange {

struct DualSample {
  double phi = 0.0;
  double r = 0.0;  // -1 / h(phi) > 0
  cplx point;      // e^{i phi} r
};

/// Boundary samples of the polar body K* of K = W(A) - origin_shift.
struct DualBodySamples {
  cplx origin_shift;
  std::vector<DualSample> samples;
};

/// Polar dual of the shifted numerical range. Keeps a reference to the
/// geometry, which must outlive it.
class DualBody {
 public:
  // Throws DomainError("dual undefined for dim < 2") for a range in a line.
  explicit DualBody(const BoundaryGeometry& g);

  const DualBodySamples& samples() const { return samples_; }
  cplx origin_shift() const { return samples_.origin_shift; }

  // Support function of K at angle phi (negative everywhere).
  double support(double phi) const;
  // Support function of K*, minimized over the samples and then refined
  // with the exact support of K.
  double dual_support(double psi) const;
  // Support function of (K*)*, computed from dual_support alone.
  double bidual_support(double theta) const;
  // max |h_{K**} - h_K| over `checks` equally spaced angles.
  double biduality_error(std::size_t checks = 64) const;

  // Dual regular exposed point u_K(z) r_{K*}(u_K(z)) for a regular exposed
  // point z of W(A) (unshifted coordinates). DomainError otherwise.
  cplx conjugate_face(cplx z) const;

 private:
  const BoundaryGeometry* g_;
  DualBodySamples samples_;
  std::vector<double> coarse_psi_;
  std::vector<double> coarse_dual_;
};

DualBodySamples dualize(const SquareComplexMatrix& a, GeometryOptions opt = {});
cplx conjugate_face(const SquareComplexMatrix& a, cplx z, GeometryOptions opt = {});

// phi,r,re_dual,im_dual
std::string dual_csv(const DualBodySamples& d);

}  // namespace numrange
