#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "numrange/errors.hpp"
#include "numrange/maxent.hpp"
#include "numrange/oracle.hpp"

using namespace numrange;
using fixtures::I;

namespace {

cplx expectation(const SquareComplexMatrix& a, const CMatrix& rho) { return (rho * a.entries()).trace(); }

void check_density(const CMatrix& rho) {
  CHECK(std::abs(rho.trace() - cplx(1.0, 0.0)) <= 1e-10);
  CHECK((rho - rho.adjoint()).norm() <= 1e-10);
  CHECK(eigh(HermitianMatrix(0.5 * (rho + rho.adjoint()))).values.minCoeff() >= -1e-10);
}

CMatrix projector(const CVector& v) { return v * v.adjoint(); }

GeometryOptions small_grid() { return GeometryOptions{1024}; }

}  // namespace

TEST_CASE("index sets and ground projections") {
  const EigenCurveTable t(fixtures::segment_plus_disk());
  CHECK(index_set(t, 1.0, kPi).size() == 2);
  const CMatrix p = ground_projection(t, 1.0, kPi);
  CHECK(std::abs(p.trace() - cplx(2.0, 0.0)) < 1e-9);
  CHECK((p * p - p).norm() < 1e-9);

  const EigenCurveTable disk(fixtures::disk());
  CHECK(index_set(disk, -1.0, 0.0).size() == 1);
  CVector g(2);
  g << 1.0, -1.0;
  g /= std::sqrt(2.0);
  CHECK((ground_projection(disk, -1.0, 0.0) - projector(g)).norm() < 1e-9);

  const EigenCurveTable seg(fixtures::diagonal({1.0, I}));
  const auto idx = index_set(seg, 1.0, 5 * kPi / 4);
  REQUIRE(idx.size() == 1);
  CHECK(std::abs(seg.vector(idx[0], 0)(0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(index_set(disk, 5.0, 0.0), ToleranceBreakdown);
}

TEST_CASE("maxent at extreme points") {
  const EigenCurveTable disk(fixtures::disk());
  const MaxEntResult pure = maxent_extreme(disk, -1.0, 0.0);
  CHECK(pure.kind == MaxEntKind::extreme);
  CHECK(pure.entropy == doctest::Approx(0.0));
  check_density(pure.state);

  const SquareComplexMatrix a = fixtures::segment_plus_disk();
  const MaxEntResult half = maxent_extreme(EigenCurveTable(a), 1.0, kPi);
  CHECK(half.entropy == doctest::Approx(std::log(2.0)));
  CHECK(std::abs(expectation(a, half.state) - 1.0) < 1e-8);
  CVector v = CVector::Zero(4);
  v(2) = v(3) = 1.0 / std::sqrt(2.0);
  CVector e1 = CVector::Zero(4);
  e1(0) = 1.0;
  CHECK((half.state - 0.5 * (projector(e1) + projector(v))).norm() < 1e-9);

  const MaxEntResult corner = maxent_extreme(EigenCurveTable(fixtures::square()), 1.0, kPi);
  CHECK(corner.entropy == doctest::Approx(0.0));
  CHECK(std::abs(corner.state(0, 0) - 1.0) < 1e-9);
}

TEST_CASE("interior maxent: barycenter and errors") {
  for (int d = 2; d <= 5; ++d) {
    const SquareComplexMatrix a = fixtures::random_matrix(d, 300 + d);
    const MaxEntResult r = maxent_interior(a, a.barycenter());
    CHECK(std::abs(r.dual_params[0]) <= 1e-10);
    CHECK(std::abs(r.dual_params[1]) <= 1e-10);
    CHECK((r.state - CMatrix::Identity(d, d) / d).norm() <= 1e-12);
    CHECK(r.entropy == doctest::Approx(std::log(d)));
  }
  const SquareComplexMatrix disk = fixtures::disk();
  CHECK_THROWS_AS(maxent_interior(disk, 1.5), InfeasibleError);
  CHECK_THROWS_WITH_AS(maxent_interior(disk, cplx(1.0 - 1e-9, 0.0)), doctest::Contains("boundary proximity"),
                       DomainError);
}

TEST_CASE("interior maxent: constraints and optimality against perturbations") {
  SeededSampler rng(17);
  for (int d = 2; d <= 5; ++d) {
    const SquareComplexMatrix a = fixtures::random_matrix(d, 400 + d);
    const EigenCurveTable t(a, AngleGrid(1024));
    for (int i = 0; i < 4; ++i) {
      const CMatrix sigma = rng.random_density(d);
      const cplx z = expectation(a, sigma);
      const MaxEntResult r = maxent_interior(t, z);
      check_density(r.state);
      CHECK(std::abs(expectation(a, r.state) - z) <= 1e-10);
      CHECK(r.entropy >= von_neumann_entropy(HermitianMatrix(0.5 * (sigma + sigma.adjoint()))) - 1e-12);
      for (const CMatrix& s : perturbation_states(a, r.state, 30, rng)) {
        CHECK(std::abs(expectation(a, s) - z) <= 1e-10);
        CHECK(von_neumann_entropy(HermitianMatrix(0.5 * (s + s.adjoint()))) <= r.entropy + 1e-9);
      }
    }
  }
}

TEST_CASE("interior maxent agrees with the grid oracle") {
  const SquareComplexMatrix a = fixtures::random_matrix(2, 9);
  SeededSampler rng(5);
  const cplx z = expectation(a, rng.random_density(2));
  const MaxEntResult r = maxent_interior(a, z);
  const GridMaxEntResult g = grid_maxent(a, z, rng);
  CHECK(g.entropy <= r.entropy + 1e-9);
  CHECK(trace_distance(g.state, r.state) < 1e-3);
}

TEST_CASE("commuting cases match the classical closed form") {
  // Triangle: the barycentric coordinates are the only feasible weights.
  const SquareComplexMatrix tri = fixtures::diagonal({0.0, 1.0, I});
  for (cplx z : {cplx(0.2, 0.3), cplx(0.5, 0.1), cplx(0.1, 0.8)}) {
    const MaxEntResult r = maxent_interior(tri, z);
    CHECK(std::abs(r.state(1, 1) - z.real()) <= 1e-8);
    CHECK(std::abs(r.state(2, 2) - z.imag()) <= 1e-8);
    CHECK(std::abs(r.state(0, 0) - (1.0 - z.real() - z.imag())) <= 1e-8);
    CHECK(std::abs(r.state(0, 1)) <= 1e-10);
  }
  // Square: the exponential family forces p1 p3 = p2 p4.
  const SquareComplexMatrix sq = fixtures::square();
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.3, 0.25), cplx(0.4, -0.4)}) {
    const double x = z.real(), y = z.imag();
    const double s = (1.0 - x - y) / 2.0;
    const double p3 = s * (s + y);
    const double p1 = p3 + x;
    const double p4 = s - p3;
    const double p2 = p4 + y;
    const MaxEntResult r = maxent_interior(sq, z);
    CHECK(std::abs(r.state(0, 0) - p1) <= 1e-8);
    CHECK(std::abs(r.state(1, 1) - p2) <= 1e-8);
    CHECK(std::abs(r.state(2, 2) - p3) <= 1e-8);
    CHECK(std::abs(r.state(3, 3) - p4) <= 1e-8);
  }
}

TEST_CASE("facet relative interior") {
  const BoundaryGeometry g(fixtures::square(), small_grid());
  const MaxEntResult r = infer(g, cplx(0.5, 0.5));
  CHECK(r.kind == MaxEntKind::facet_relative_interior);
  CHECK(std::abs(r.state(0, 0) - 0.5) < 1e-8);
  CHECK(std::abs(r.state(1, 1) - 0.5) < 1e-8);
  CHECK(r.entropy == doctest::Approx(std::log(2.0)));

  const BoundaryGeometry dp(fixtures::disk_plus_point(), small_grid());
  const cplx mid = 0.5 * (1.0 + cplx(0.25, std::sqrt(3.0) / 4));
  const MaxEntResult f = infer(dp, mid);
  CHECK(f.kind == MaxEntKind::facet_relative_interior);
  check_density(f.state);
  CHECK(std::abs(expectation(dp.matrix(), f.state) - mid) < 1e-8);
}

TEST_CASE("target location and dispatch") {
  const BoundaryGeometry g(fixtures::disk(), small_grid());
  CHECK(locate_target(g, 0.2).kind == TargetLocation::Kind::interior);
  CHECK(locate_target(g, cplx(1.0 - 1e-7, 0.0)).kind == TargetLocation::Kind::near_boundary);
  CHECK(locate_target(g, I).kind == TargetLocation::Kind::extreme);
  CHECK(locate_target(g, 2.0).kind == TargetLocation::Kind::outside);
  CHECK(infer(g, I).kind == MaxEntKind::extreme);
  CHECK(infer(g, 0.2).kind == MaxEntKind::interior);
  CHECK_THROWS_AS(infer(g, 2.0), InfeasibleError);

  // Range on a line: W = [-1, 1].
  const BoundaryGeometry line(fixtures::diagonal({1.0, -1.0, 0.0}), small_grid());
  const MaxEntResult r = infer(line, 0.5);
  check_density(r.state);
  CHECK(std::abs(expectation(line.matrix(), r.state) - 0.5) < 1e-8);
  CHECK_THROWS_AS(infer(line, cplx(0.0, 0.5)), InfeasibleError);
}

TEST_CASE("inward limits") {
  // Continuity point: the inward limit on the disk is the pure ground state.
  const EigenCurveTable disk(fixtures::disk());
  const MaxEntResult ext = maxent_extreme(disk, -1.0, 0.0);
  const MaxEntResult in = maxent_interior(disk, cplx(-1.0 + 1e-4, 0.0));
  CHECK(trace_distance(ext.state, in.state) < 1e-3);

  // Discontinuity point: the inward limit misses the along-boundary limit.
  const SquareComplexMatrix a = fixtures::segment_plus_disk();
  const EigenCurveTable t(a);
  const MaxEntResult inward = maxent_interior(t, cplx(1.0 - 1e-4, 0.0));
  const double phi = 1e-3;
  const MaxEntResult along = maxent_extreme(t, std::polar(1.0, phi), kPi + phi);
  CHECK(trace_distance(inward.state, along.state) >= 1e-2);
}

TEST_CASE("prior inference") {
  const SquareComplexMatrix a = fixtures::segment_plus_disk();
  const EigenCurveTable t(a);
  const CMatrix uniform = CMatrix::Identity(4, 4) / 4.0;
  CHECK((prior_inference(t, 1.0, kPi, uniform) - maxent_extreme(t, 1.0, kPi).state).norm() < 1e-10);

  // Rank-2 face: the compressed log prior is diag(log q1, (log q3 + log q4)/2).
  CMatrix prior = CMatrix::Zero(4, 4);
  const double q[4] = {0.1, 0.2, 0.3, 0.4};
  for (int i = 0; i < 4; ++i) prior(i, i) = q[i];
  CVector e1 = CVector::Zero(4);
  e1(0) = 1.0;
  CVector v = CVector::Zero(4);
  v(2) = v(3) = 1.0 / std::sqrt(2.0);
  const double w1 = q[0], w2 = std::sqrt(q[2] * q[3]);
  const CMatrix expected = (w1 * projector(e1) + w2 * projector(v)) / (w1 + w2);
  CHECK((prior_inference(t, 1.0, kPi, prior) - expected).norm() < 1e-9);

  // Rank one ignores the prior.
  const EigenCurveTable disk(fixtures::disk());
  SeededSampler rng(1);
  const CMatrix rho = rng.random_density(2);
  CHECK((prior_inference(disk, -1.0, 0.0, rho) - maxent_extreme(disk, -1.0, 0.0).state).norm() < 1e-10);

  CMatrix singular = CMatrix::Zero(4, 4);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(prior_inference(t, 1.0, kPi, singular), InputError);
  CHECK_THROWS_AS(prior_inference(t, 1.0, kPi, CMatrix::Identity(3, 3) / 3.0), InputError);
}

TEST_CASE("discontinuity scans") {
  SUBCASE("disk") {
    const ContinuityReport r = scan_discontinuities(BoundaryGeometry(fixtures::disk(), small_grid()));
    CHECK(r.discontinuities.empty());
    CHECK(!r.points.empty());
    for (const auto& p : r.points) CHECK(p.f_inv_weak);
  }
  SUBCASE("square") {
    const ContinuityReport r = scan_discontinuities(BoundaryGeometry(fixtures::square(), small_grid()));
    CHECK(r.discontinuities.empty());
  }
  SUBCASE("tangent branches") {
    const BoundaryGeometry g(fixtures::segment_plus_disk());
    const ContinuityReport r = scan_discontinuities(g);
    bool at_one = false;
    for (const auto& p : r.discontinuities) {
      if (std::abs(p.z - 1.0) < 1e-6) {
        at_one = true;
        CHECK(!p.maxent_continuous);
        CHECK(!p.f_inv_strong);
        REQUIRE(p.witness.has_value());
        REQUIRE(p.witness_exponent.has_value());
        CHECK(*p.witness_exponent == doctest::Approx(2.0).epsilon(0.05));
      }
    }
    CHECK(at_one);
    for (const auto& p : r.points) {
      CHECK(p.maxent_continuous == p.f_inv_strong);
      if (p.f_inv_strong) CHECK(p.f_inv_weak);
      // C1-crossing correspondence, straight from the table.
      bool c1_pair = false;
      const BranchSample s = g.table().sample(p.theta);
      for (std::size_t i = 0; i < p.branches.size(); ++i) {
        for (std::size_t j = i + 1; j < p.branches.size(); ++j) {
          const int k = p.branches[i], l = p.branches[j];
          if (!g.table().identical(k, l) && std::abs(s.slopes(k) - s.slopes(l)) < 1e-6) c1_pair = true;
        }
      }
      if (p.kind != ExtremeKind::corner) CHECK(c1_pair == !p.maxent_continuous);
    }
  }
}

TEST_CASE("jump scan and prior independence") {
  const BoundaryGeometry g(fixtures::segment_plus_disk());
  const auto base = scan_jumps(g, std::nullopt);
  REQUIRE(!base.empty());
  bool at_one = false;
  for (const auto& j : base) {
    if (std::abs(j.z - 1.0) < 1e-6) {
      at_one = true;
      CHECK(j.jump >= 0.4);
    }
  }
  CHECK(at_one);
  SeededSampler rng(99);
  for (int i = 0; i < 3; ++i) {
    const auto with_prior = scan_jumps(g, rng.random_density(4));
    REQUIRE(with_prior.size() == base.size());
    for (std::size_t k = 0; k < base.size(); ++k) CHECK(std::abs(with_prior[k].z - base[k].z) < 1e-9);
  }
}

TEST_CASE("exponential family solver") {
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const ExpFamilySolution s = solve_exponential_family({HermitianMatrix(z)}, {0.6});
  CHECK(std::abs(s.state(0, 0) - 0.8) < 1e-12);
  CHECK(s.mu[0] == doctest::Approx(std::atanh(0.6)));
  CHECK(s.residual < 1e-12);
}

TEST_CASE("interior maxent with a widely spread spectrum") {
  // Close to the arc the dual parameters are large; the covariance must not
  // overflow.
  const SquareComplexMatrix a = fixtures::segment_plus_disk();
  SeededSampler rng(55);
  for (double phi : {0.3, 0.1, 0.03}) {
    const cplx z = std::polar(1.0 - 1e-2 * phi * phi, phi);
    const MaxEntResult r = maxent_interior(a, z);
    check_density(r.state);
    CHECK(std::abs(expectation(a, r.state) - z) <= 1e-10);
    GridMaxEntOptions opt;
    opt.simplex_divisions = 16;
    const GridMaxEntResult g = grid_maxent(a, z, rng, opt);
    CHECK(g.residual <= 1e-8);
    CHECK(g.entropy <= r.entropy + 1e-9);
    CHECK(trace_distance(g.state, r.state) < 1e-3);
  }
}
