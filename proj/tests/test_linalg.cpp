#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "numrange/errors.hpp"
#include "numrange/linalg.hpp"
#include "numrange/matrix_io.hpp"

using namespace numrange;
using fixtures::I;

TEST_CASE("split recombines and matches the closed forms") {
  const SquareComplexMatrix a = fixtures::disk();
  const auto [h0, h1] = split(a);
  CMatrix e0(2, 2), e1(2, 2);
  e0 << 0.0, 1.0, 1.0, 0.0;
  e1 << 0.0, -I, I, 0.0;
  CHECK((h0.entries() - e0).norm() < 1e-15);
  CHECK((h1.entries() - e1).norm() < 1e-15);
  CHECK((h0.entries() + I * h1.entries() - a.entries()).norm() < 1e-15);

  const CMatrix herm = fixtures::random_hermitian(4, 3);
  const auto [p, q] = split(SquareComplexMatrix(herm));
  CHECK((p.entries() - herm).norm() < 1e-15);
  CHECK(q.entries().norm() < 1e-15);
  const auto [r, s] = split(SquareComplexMatrix(I * herm));
  CHECK(r.entries().norm() < 1e-15);
  CHECK((s.entries() - herm).norm() < 1e-15);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SquareComplexMatrix m = fixtures::random_matrix(5, seed);
    const auto [x, y] = split(m);
    CHECK((x.entries() + I * y.entries() - m.entries()).norm() < 1e-14);
  }
}

TEST_CASE("input validation") {
  CMatrix ns(2, 3);
  ns.setZero();
  CHECK_THROWS_AS(SquareComplexMatrix{ns}, InputError);
  CMatrix nan = CMatrix::Zero(2, 2);
  nan(0, 1) = std::nan("");
  CHECK_THROWS_AS(SquareComplexMatrix{nan}, InputError);
  CMatrix nh(2, 2);
  nh << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(HermitianMatrix{nh}, InputError);
}

TEST_CASE("rotated parts") {
  const SquareComplexMatrix a = fixtures::random_matrix(4, 9);
  CHECK((rotated_real_part(a, 0.0).entries() - a.real_part().entries()).norm() < 1e-15);
  CHECK((rotated_real_part(a, kPi / 2).entries() - a.imag_part().entries()).norm() < 1e-15);
  for (double t : {0.3, 1.7, 4.0}) {
    const CMatrix rot = std::polar(1.0, -t) * a.entries();
    const CMatrix direct = 0.5 * (rot + rot.adjoint());
    CHECK((rotated_real_part(a, t).entries() - direct).norm() < 1e-14);
    CHECK((rotated_real_part(a, t + kTwoPi).entries() - direct).norm() < 1e-13);
    // Im(e^{-it}A) is the derivative of Re(e^{-it}A).
    const double h = 1e-6;
    const CMatrix fd = (rotated_real_part(a, t + h).entries() - rotated_real_part(a, t - h).entries()) / (2 * h);
    CHECK((fd - rotated_imag_part(a, t).entries()).norm() < 1e-8);
  }
  for (double t : {0.0, 1.0, 2.5, 5.0}) {
    const EigenSystem es = eigh(rotated_real_part(fixtures::disk(), t));
    CHECK(es.values(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(es.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("eigh examples") {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const EigenSystem a = eigh(HermitianMatrix(d));
  CHECK(a.values(0) == 1.0);
  CHECK(a.values(1) == 2.0);
  CHECK(a.values(2) == 3.0);
  CHECK(std::abs(a.vectors(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(a.vectors(2, 1) - 1.0) < 1e-15);
  CHECK(std::abs(a.vectors(0, 2) - 1.0) < 1e-15);

  CMatrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  const EigenSystem b = eigh(HermitianMatrix(x));
  CHECK(b.values(0) == doctest::Approx(-1.0));
  CHECK(b.values(1) == doctest::Approx(1.0));
  CHECK(std::abs(b.vectors(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(b.vectors(1, 0) + 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(b.vectors(1, 1) - 1.0 / std::sqrt(2.0)) < 1e-14);

  const EigenSystem c = eigh(HermitianMatrix(CMatrix::Identity(4, 4)));
  CHECK((c.values.array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK((c.vectors.adjoint() * c.vectors - CMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("eigh properties against an independent solver") {
  for (int d = 1; d <= 9; ++d) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const CMatrix h = fixtures::random_hermitian(d, 100 * d + seed);
      const EigenSystem es = eigh(HermitianMatrix(h));
      const double norm = spectral_norm(h);
      CHECK((es.vectors.adjoint() * es.vectors - CMatrix::Identity(d, d)).norm() < 1e-12);
      for (int i = 0; i < d; ++i) {
        CHECK((h * es.vectors.col(i) - es.values(i) * es.vectors.col(i)).norm() <= 1e-10 * norm);
        if (i > 0) CHECK(es.values(i - 1) <= es.values(i));
        // Phase convention.
        for (int r = 0; r < d; ++r) {
          if (std::abs(es.vectors(r, i)) > 1e-8) {
            CHECK(std::abs(es.vectors(r, i).imag()) < 1e-14);
            CHECK(es.vectors(r, i).real() > 0.0);
            break;
          }
        }
      }
      Eigen::SelfAdjointEigenSolver<CMatrix> ref(h);
      CHECK((ref.eigenvalues() - es.values).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + norm));

      // Unitary invariance.
      numrange::SeededSampler rng(seed);
      const CMatrix u = rng.haar_unitary(d);
      const CMatrix conj = u * h * u.adjoint();
      const EigenSystem es2 = eigh(HermitianMatrix(0.5 * (conj + conj.adjoint())));
      CHECK((es2.values - es.values).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + norm));

      // Determinism.
      const EigenSystem again = eigh(HermitianMatrix(h));
      CHECK((again.vectors - es.vectors).norm() == 0.0);
    }
  }
}

TEST_CASE("numerical range map") {
  const SquareComplexMatrix a = fixtures::diagonal({1.0, I});
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  CHECK(std::abs(numerical_range_map(a, e1) - cplx(1.0, 0.0)) < 1e-15);
  CVector x(2);
  x << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(std::abs(numerical_range_map(a, x) - cplx(0.5, 0.5)) < 1e-15);
  CHECK(std::abs(numerical_range_map(fixtures::disk(), x) - cplx(1.0, 0.0)) < 1e-15);
  CHECK_THROWS_AS(numerical_range_map(a, 2.0 * x), InputError);

  // Projection bounds on the real and imaginary parts.
  const SquareComplexMatrix r = fixtures::random_matrix(5, 4);
  const EigenSystem e0 = eigh(r.real_part());
  const EigenSystem e1s = eigh(r.imag_part());
  numrange::SeededSampler rng(5);
  for (int i = 0; i < 200; ++i) {
    const cplx z = numerical_range_map(r, rng.haar_vector(5));
    CHECK(z.real() >= e0.values(0) - 1e-14);
    CHECK(z.real() <= e0.values(4) + 1e-14);
    CHECK(z.imag() >= e1s.values(0) - 1e-14);
    CHECK(z.imag() <= e1s.values(4) + 1e-14);
  }
}

TEST_CASE("support value and ground-energy rescaling") {
  for (double t : {0.0, 1.0, 3.0}) CHECK(support_value(fixtures::disk(), t) == doctest::Approx(-1.0));
  // sqrt(1 + g^2) lambda(arctan g) is the ground energy of H0 + g H1.
  const SquareComplexMatrix a = fixtures::random_matrix(4, 12);
  for (double g : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
    const double lhs = std::sqrt(1.0 + g * g) * support_value(a, std::atan(g));
    const CMatrix h = a.real_part().entries() + g * a.imag_part().entries();
    Eigen::SelfAdjointEigenSolver<CMatrix> ref(h);
    CHECK(lhs == doctest::Approx(ref.eigenvalues()(0)).epsilon(1e-12));
  }
}

TEST_CASE("spectral norm and matrix functions") {
  const SquareComplexMatrix a = fixtures::random_matrix(6, 8);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const CMatrix m = 3.0 * a.entries();
  Eigen::JacobiSVD<CMatrix> svd(m);
  CHECK(spectral_norm(m) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));

  const CMatrix h = fixtures::random_hermitian(4, 2);
  const CMatrix e = hermitian_exp(HermitianMatrix(h));
  const CMatrix back = hermitian_log(HermitianMatrix(0.5 * (e + e.adjoint())));
  CHECK((back - h).norm() < 1e-12);
  CHECK_THROWS_AS(hermitian_log(HermitianMatrix(-CMatrix::Identity(2, 2))), InputError);

  CHECK(von_neumann_entropy(HermitianMatrix(CMatrix::Identity(3, 3) / 3.0)) == doctest::Approx(std::log(3.0)));
  CMatrix pure = CMatrix::Zero(3, 3);
  pure(1, 1) = 1.0;
  CHECK(std::abs(von_neumann_entropy(HermitianMatrix(pure))) < 1e-15);
  CMatrix other = CMatrix::Zero(3, 3);
  other(2, 2) = 1.0;
  CHECK(trace_distance(pure, other) == doctest::Approx(1.0));
  CHECK(trace_distance(pure, pure) < 1e-15);
  CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_angle(kTwoPi + 0.25) == doctest::Approx(0.25));
}

TEST_CASE("matrix JSON") {
  const std::string text =
      R"({"dim": 2, "entries": [[{"re": 0, "im": 0}, {"re": 2, "im": 0}], [{"re": 0, "im": 0}, {"re": 0, "im": 0.5}]]})";
  const SquareComplexMatrix a = parse_matrix_json(text);
  CHECK(a.dim() == 2);
  CHECK(a.entries()(0, 1) == cplx(2.0, 0.0));
  CHECK(a.entries()(1, 1) == cplx(0.0, 0.5));
  const SquareComplexMatrix round = parse_matrix_json(matrix_to_json(a.entries()));
  CHECK((round.entries() - a.entries()).norm() == 0.0);

  CHECK_THROWS_AS(parse_matrix_json("{"), InputError);
  CHECK_THROWS_AS(parse_matrix_json(R"({"dim": 2, "entries": []})"), InputError);
  CHECK_THROWS_AS(parse_matrix_json(R"({"dim": 1, "entries": [[{"re": 1}]]})"), InputError);
  CHECK_THROWS_AS(parse_matrix_json(R"({"dim": 0, "entries": []})"), InputError);
  CHECK_THROWS_AS(parse_matrix_json(R"({"entries": [[{"re": 1, "im": 0}]]})"), InputError);

  const std::string rho =
      R"({"dim": 2, "entries": [[{"re": 0.5, "im": 0}, {"re": 0, "im": 0}], [{"re": 0, "im": 0}, {"re": 0.5, "im": 0}]]})";
  CHECK(parse_density_json(rho).trace().real() == doctest::Approx(1.0));
  const std::string bad =
      R"({"dim": 2, "entries": [[{"re": 0.5, "im": 0}, {"re": 0, "im": 0}], [{"re": 0, "im": 0}, {"re": 0.6, "im": 0}]]})";
  CHECK_THROWS_AS(parse_density_json(bad), InputError);
}
