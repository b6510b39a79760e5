#include "numrange/linalg.hpp"

#include <cmath>
#include <string>

#include "numrange/errors.hpp"

namespace numrange {

HermitianMatrix::HermitianMatrix(CMatrix entries, double rel_tol) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw InputError("Hermitian matrix must be square and non-empty");
  }
  const double scale = 1.0 + entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= rel_tol * scale)) {
    throw InputError("matrix is not Hermitian: max |H - H*| = " + std::to_string(asym));
  }
  entries_ = 0.5 * (entries + entries.adjoint());
}

HermitianMatrix HermitianMatrix::trusted(CMatrix entries) {
  HermitianMatrix h;
  h.entries_ = std::move(entries);
  return h;
}

SquareComplexMatrix::SquareComplexMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw InputError("matrix must be square with dim >= 1");
  }
  if (!entries_.allFinite()) {
    throw InputError("matrix entries must be finite");
  }
  re_ = HermitianMatrix::trusted(0.5 * (entries_ + entries_.adjoint()));
  im_ = HermitianMatrix::trusted(cplx(0.0, -0.5) * (entries_ - entries_.adjoint()));
  norm_ = spectral_norm(entries_);
}

cplx SquareComplexMatrix::barycenter() const {
  return entries_.trace() / static_cast<double>(dim());
}

std::pair<HermitianMatrix, HermitianMatrix> split(const SquareComplexMatrix& a) {
  return {a.real_part(), a.imag_part()};
}

HermitianMatrix rotated_real_part(const SquareComplexMatrix& a, double theta) {
  return HermitianMatrix::trusted(a.real_part().entries() * std::cos(theta) +
                                  a.imag_part().entries() * std::sin(theta));
}

HermitianMatrix rotated_imag_part(const SquareComplexMatrix& a, double theta) {
  return HermitianMatrix::trusted(a.imag_part().entries() * std::cos(theta) -
                                  a.real_part().entries() * std::sin(theta));
}

cplx numerical_range_map(const SquareComplexMatrix& a, const CVector& x) {
  if (x.size() != a.dim()) {
    throw InputError("vector dimension does not match matrix");
  }
  if (std::abs(x.norm() - 1.0) > 1e-10) {
    throw InputError("numerical_range_map requires a unit vector");
  }
  return x.dot(a.entries() * x);  // Eigen's dot conjugates the first argument
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const CMatrix gram = m.adjoint() * m;
  const EigenSystem es = eigh(HermitianMatrix::trusted(0.5 * (gram + gram.adjoint())));
  return std::sqrt(std::max(0.0, es.values(es.values.size() - 1)));
}

double support_value(const SquareComplexMatrix& a, double theta) {
  return eigh(rotated_real_part(a, theta)).values(0);
}

CMatrix hermitian_exp(const HermitianMatrix& h) {
  const EigenSystem es = eigh(h);
  const RVector e = es.values.array().exp();
  return es.vectors * e.asDiagonal() * es.vectors.adjoint();
}

CMatrix hermitian_log(const HermitianMatrix& h, double floor) {
  const EigenSystem es = eigh(h);
  if (!(es.values(0) > floor)) {
    throw InputError("matrix logarithm requires a positive definite argument");
  }
  const RVector l = es.values.array().log();
  return es.vectors * l.asDiagonal() * es.vectors.adjoint();
}

double von_neumann_entropy(const HermitianMatrix& rho) {
  const EigenSystem es = eigh(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double p = es.values(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
  const CMatrix diff = rho - sigma;
  const EigenSystem es = eigh(HermitianMatrix::trusted(0.5 * (diff + diff.adjoint())));
  return 0.5 * es.values.cwiseAbs().sum();
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

}  // namespace numrange
