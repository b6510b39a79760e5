#pragma once

#include <cstdint>

#include "numrange/linalg.hpp"
#include "numrange/oracle.hpp"

namespace fixtures {

using numrange::cplx;
using numrange::CMatrix;
using numrange::SquareComplexMatrix;

inline const cplx I{0.0, 1.0};

// W = unit disk.
inline SquareComplexMatrix disk() {
  CMatrix m(2, 2);
  m << 0.0, 2.0, 0.0, 0.0;
  return SquareComplexMatrix(m);
}

inline SquareComplexMatrix diagonal(std::initializer_list<cplx> entries) {
  const int d = static_cast<int>(entries.size());
  CMatrix m = CMatrix::Zero(d, d);
  int i = 0;
  for (const cplx& e : entries) {
    m(i, i) = e;
    ++i;
  }
  return SquareComplexMatrix(m);
}

// W = square with vertices 1, i, -1, -i.
inline SquareComplexMatrix square() { return diagonal({1.0, I, -1.0, -I}); }

// W = conv(disk(0, 1/2), {1}).
inline SquareComplexMatrix disk_plus_point() {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 1) = 1.0;
  m(2, 2) = 1.0;
  return SquareComplexMatrix(m);
}

// diag(1, -1) + [[0, 2], [0, 0]]: W = unit disk with two tangent eigenvalue branches.
inline SquareComplexMatrix segment_plus_disk() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  m(2, 3) = 2.0;
  return SquareComplexMatrix(m);
}

// Complex Ginibre matrix scaled to unit spectral norm.
inline SquareComplexMatrix random_matrix(int d, std::uint64_t seed) {
  numrange::SeededSampler rng(seed);
  CMatrix m = rng.ginibre(d);
  return SquareComplexMatrix(m / numrange::spectral_norm(m));
}

inline CMatrix random_hermitian(int d, std::uint64_t seed) {
  numrange::SeededSampler rng(seed);
  const CMatrix g = rng.ginibre(d);
  return 0.5 * (g + g.adjoint());
}

}  // namespace fixtures
