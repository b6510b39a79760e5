// Cyclic Jacobi diagonalization of complex Hermitian matrices.
//
// Each rotation U acts on the (p, q) plane. It first removes the phase of
// a_pq with D = diag(1, e^{-i phi}) and then applies the real symmetric
// rotation [[c, s], [-s, c]], so U = D R and U^* A U has a zero (p, q) entry.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "numrange/errors.hpp"
#include "numrange/linalg.hpp"

namespace numrange {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kRelOffTol = 1e-13;
constexpr double kPhaseThreshold = 1e-8;

double off_diagonal_norm(const CMatrix& a) {
  double sum = 0.0;
  const auto n = a.rows();
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      sum += std::norm(a(p, q));
    }
  }
  return std::sqrt(2.0 * sum);
}

void rotate(CMatrix& a, CMatrix& v, Eigen::Index p, Eigen::Index q) {
  const cplx apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;

  const cplx phase = apq / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on rows/cols (p, q).
  const cplx u_pp = c;
  const cplx u_pq = s;
  const cplx u_qp = -s * std::conj(phase);
  const cplx u_qq = c * std::conj(phase);

  const auto n = a.rows();
  // A <- A U (columns p, q)
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = akp * u_pp + akq * u_qp;
    a(k, q) = akp * u_pq + akq * u_qq;
  }
  // A <- U^* A (rows p, q)
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
    a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;

  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = vkp * u_pp + vkq * u_qp;
    v(k, q) = vkp * u_pq + vkq * u_qq;
  }
}

void fix_phase(CVector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x(i));
    if (m > kPhaseThreshold) {
      x *= std::conj(x(i)) / m;
      x(i) = m;
      return;
    }
  }
}

}  // namespace

EigenSystem eigh(const HermitianMatrix& h) {
  const int n = h.dim();
  CMatrix a = h.entries();
  CMatrix v = CMatrix::Identity(n, n);

  const double scale = a.norm();
  if (scale > 0.0) {
    int sweep = 0;
    while (off_diagonal_norm(a) > kRelOffTol * scale) {
      if (++sweep > kMaxSweeps) {
        throw ToleranceBreakdown("eigh: Jacobi sweeps did not converge");
      }
      for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          rotate(a, v, p, q);
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    CVector col = v.col(order[k]);
    fix_phase(col);
    out.vectors.col(k) = col;
  }
  return out;
}

}  // namespace numrange
