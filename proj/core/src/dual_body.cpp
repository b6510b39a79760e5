#include "numrange/dual_body.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "numrange/errors.hpp"
#include "numrange/export.hpp"
#include "numrange/optimize.hpp"

namespace numrange {

namespace {

constexpr std::size_t kCoarseDual = 256;

}  // namespace

DualBody::DualBody(const BoundaryGeometry& g) : g_(&g) {
  if (g.degeneracy()) throw DomainError("dual undefined for dim < 2");
  samples_.origin_shift = g.matrix().barycenter();
  const EigenCurveTable& table = g.table();
  for (std::size_t j = 0; j < table.grid().size(); ++j) {
    const double phi = table.grid().angle(j);
    const double h = min_eigenvalue(table, phi).value - dot(std::polar(1.0, phi), origin_shift());
    if (!(h < 0.0)) throw ToleranceBreakdown("shifted support function is not negative");
    const double r = -1.0 / h;
    samples_.samples.push_back({phi, r, std::polar(r, phi)});
  }
  for (std::size_t i = 0; i < kCoarseDual; ++i) {
    const double psi = kTwoPi * static_cast<double>(i) / kCoarseDual;
    coarse_psi_.push_back(psi);
    coarse_dual_.push_back(dual_support(psi));
  }
}

double DualBody::support(double phi) const {
  return support_value(g_->matrix(), phi) - dot(std::polar(1.0, phi), origin_shift());
}

double DualBody::dual_support(double psi) const {
  const auto& s = samples_.samples;
  std::size_t best = 0;
  double best_value = s[0].r * std::cos(s[0].phi - psi);
  for (std::size_t j = 1; j < s.size(); ++j) {
    const double v = s[j].r * std::cos(s[j].phi - psi);
    if (v < best_value) {
      best_value = v;
      best = j;
    }
  }
  const double step = g_->table().grid().step();
  const double phi = s[best].phi;
  const ScalarMinimum m = golden_minimize(
      [&](double t) { return -std::cos(t - psi) / support(t); }, phi - step, phi + step, 1e-11);
  return std::min(m.value, best_value);
}

double DualBody::bidual_support(double theta) const {
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < coarse_psi_.size(); ++i) {
    const double v = -std::cos(coarse_psi_[i] - theta) / coarse_dual_[i];
    if (i == 0 || v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double step = kTwoPi / static_cast<double>(coarse_psi_.size());
  const double psi = coarse_psi_[best];
  const ScalarMinimum m = golden_minimize(
      [&](double t) { return -std::cos(t - theta) / dual_support(t); }, psi - step, psi + step,
      1e-8);
  return std::min(m.value, best_value);
}

double DualBody::biduality_error(std::size_t checks) const {
  double err = 0.0;
  for (std::size_t i = 0; i < checks; ++i) {
    const double theta = kTwoPi * (static_cast<double>(i) + 0.37) / static_cast<double>(checks);
    err = std::max(err, std::abs(bidual_support(theta) - support(theta)));
  }
  return err;
}

cplx DualBody::conjugate_face(cplx z) const {
  const EigenCurveTable& table = g_->table();
  const double tol = 1e-7 * (1.0 + g_->scale());
  auto gap = [&](double t) { return dot(std::polar(1.0, t), z) - support_value(g_->matrix(), t); };

  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t j = 0; j < table.grid().size(); ++j) {
    const double t = table.grid().angle(j);
    const double v = dot(std::polar(1.0, t), z) - min_eigenvalue(table, t).value;
    if (j == 0 || v < best_value) {
      best_value = v;
      best = j;
    }
  }
  const double step = table.grid().step();
  const double t0 = table.grid().angle(best);
  const ScalarMinimum m = golden_minimize(gap, t0 - step, t0 + step);
  const double theta = wrap_angle(m.arg);
  if (std::abs(m.value) > tol) throw DomainError("not a regular exposed point");
  for (double a : g_->singular_normals()) {
    const double d = std::abs(wrap_angle(a - theta + kPi) - kPi);
    if (d < 1e-6) throw DomainError("not a regular exposed point");
  }
  if (!g_->on_regular_arc(theta)) throw DomainError("not a regular exposed point");
  if (std::abs(g_->support(theta).x_plus - z) > 1e-6 * (1.0 + g_->scale())) {
    throw DomainError("not a regular exposed point");
  }
  return std::polar(-1.0 / support(theta), theta);
}

DualBodySamples dualize(const SquareComplexMatrix& a, GeometryOptions opt) {
  const BoundaryGeometry g(a, opt);
  return DualBody(g).samples();
}

cplx conjugate_face(const SquareComplexMatrix& a, cplx z, GeometryOptions opt) {
  const BoundaryGeometry g(a, opt);
  return DualBody(g).conjugate_face(z);
}

std::string dual_csv(const DualBodySamples& d) {
  std::ostringstream out;
  out << "phi,r,re_dual,im_dual\n";
  for (const DualSample& s : d.samples) {
    out << format_number(s.phi) << ',' << format_number(s.r) << ','
        << format_number(s.point.real()) << ',' << format_number(s.point.imag()) << '\n';
  }
  return out.str();
}

}  // namespace numrange
