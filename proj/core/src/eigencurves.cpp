#include "numrange/eigencurves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "numrange/errors.hpp"

namespace numrange {

namespace {

constexpr double kClusterRel = 1e-8;
constexpr double kIdentityRel = 1e-7;

double scale_of(const SquareComplexMatrix& a) { return a.norm() > 0.0 ? a.norm() : 1.0; }

// Half-open index ranges [first, last) of runs whose consecutive gaps are below tol.
std::vector<std::pair<int, int>> runs(const RVector& sorted_values, double tol) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(sorted_values.size());
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && sorted_values(j) - sorted_values(j - 1) < tol) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

// Rotates the columns of `block` (an orthonormal basis of a degenerate
// subspace) towards the reference columns that project most strongly onto it.
void align_with_reference(Eigen::Ref<CMatrix> block, const CMatrix& reference) {
  const Eigen::Index s = block.cols();
  const CMatrix proj = block.adjoint() * reference;  // s x d
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(reference.cols()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index x, Eigen::Index y) {
    return proj.col(x).squaredNorm() > proj.col(y).squaredNorm();
  });
  CMatrix t(s, s);
  for (Eigen::Index c = 0; c < s; ++c) t.col(c) = proj.col(idx[static_cast<std::size_t>(c)]);
  Eigen::JacobiSVD<CMatrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix q = svd.matrixU() * svd.matrixV().adjoint();
  block = (block * q).eval();
}

HermitianMatrix hermitian_part(const CMatrix& m) {
  return HermitianMatrix::trusted(0.5 * (m + m.adjoint()));
}

// Greedy assignment on |<prev_k|cur_c>|: returns column for each label k.
std::vector<int> greedy_match(const CMatrix& prev, const CMatrix& cur) {
  const int d = static_cast<int>(prev.cols());
  const Eigen::MatrixXd overlap = (prev.adjoint() * cur).cwiseAbs();
  std::vector<std::tuple<double, int, int>> entries;
  entries.reserve(static_cast<std::size_t>(d * d));
  for (int k = 0; k < d; ++k) {
    for (int c = 0; c < d; ++c) entries.emplace_back(overlap(k, c), k, c);
  }
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    return std::get<0>(x) > std::get<0>(y);
  });
  std::vector<int> col(static_cast<std::size_t>(d), -1);
  std::vector<char> used(static_cast<std::size_t>(d), 0);
  int left = d;
  for (const auto& [ov, k, c] : entries) {
    if (left == 0) break;
    if (col[static_cast<std::size_t>(k)] >= 0 || used[static_cast<std::size_t>(c)]) continue;
    col[static_cast<std::size_t>(k)] = c;
    used[static_cast<std::size_t>(c)] = 1;
    --left;
  }
  return col;
}

ResolvedSpectrum reorder(const ResolvedSpectrum& rs, const std::vector<int>& col) {
  ResolvedSpectrum out;
  const int d = static_cast<int>(col.size());
  out.theta = rs.theta;
  out.values.resize(d);
  out.slopes.resize(d);
  out.curvatures.resize(d);
  out.vectors.resize(rs.vectors.rows(), d);
  for (int k = 0; k < d; ++k) {
    const int c = col[static_cast<std::size_t>(k)];
    out.values(k) = rs.values(c);
    out.slopes(k) = rs.slopes(c);
    out.curvatures(k) = rs.curvatures(c);
    out.vectors.col(k) = rs.vectors.col(c);
  }
  return out;
}

double periodic_distance(double x, double y) {
  const double d = std::abs(wrap_angle(x) - wrap_angle(y));
  return std::min(d, kTwoPi - d);
}

}  // namespace

AngleGrid::AngleGrid(std::size_t n) : n_(n) {
  const bool pow2 = n != 0 && (n & (n - 1)) == 0;
  if (!pow2 || n < kMinSize || n > kMaxSize) {
    throw InputError("grid size must be a power of two in [512, 2^20]");
  }
}

std::size_t AngleGrid::nearest(double theta) const {
  const double t = wrap_angle(theta) / step();
  return static_cast<std::size_t>(std::llround(t)) % n_;
}

ResolvedSpectrum resolve_spectrum(const SquareComplexMatrix& a, double theta,
                                  const CMatrix* reference) {
  const double tol = kClusterRel * scale_of(a);
  const CMatrix h = rotated_real_part(a, theta).entries();
  const CMatrix hp = rotated_imag_part(a, theta).entries();
  const EigenSystem es = eigh(HermitianMatrix::trusted(h));
  const int d = a.dim();

  CMatrix v = es.vectors;
  const auto clusters = runs(es.values, tol);
  std::vector<int> cluster_of(static_cast<std::size_t>(d));
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    for (int i = clusters[ci].first; i < clusters[ci].second; ++i) {
      cluster_of[static_cast<std::size_t>(i)] = static_cast<int>(ci);
    }
  }

  for (const auto& [first, last] : clusters) {
    const int m = last - first;
    if (m < 2) continue;
    CMatrix c = v.middleCols(first, m);
    const EigenSystem first_order = eigh(hermitian_part(c.adjoint() * hp * c));
    c = c * first_order.vectors;

    for (const auto& [s0, s1] : runs(first_order.values, tol)) {
      const int ms = s1 - s0;
      if (ms < 2) continue;
      // Second-order effective operator S* H' R H' S with the reduced resolvent
      // R = sum over the rest of the spectrum of |m><m| / (lambda - lambda_m).
      const double lam = es.values.segment(first, m).mean();
      CMatrix resolvent = CMatrix::Zero(d, d);
      for (int q = 0; q < d; ++q) {
        if (q >= first && q < last) continue;
        resolvent += v.col(q) * v.col(q).adjoint() / (lam - es.values(q));
      }
      CMatrix s = c.middleCols(s0, ms);
      const EigenSystem second_order = eigh(hermitian_part(s.adjoint() * hp * resolvent * hp * s));
      s = s * second_order.vectors;
      if (reference != nullptr) {
        for (const auto& [u0, u1] : runs(second_order.values, tol)) {
          if (u1 - u0 < 2) continue;
          align_with_reference(s.middleCols(u0, u1 - u0), *reference);
        }
      }
      c.middleCols(s0, ms) = s;
    }
    v.middleCols(first, m) = c;
  }

  ResolvedSpectrum out;
  out.theta = theta;
  out.vectors = v;
  out.values.resize(d);
  out.slopes.resize(d);
  out.curvatures.resize(d);
  const CMatrix hp_v = hp * v;
  const CMatrix coupling = v.adjoint() * hp_v;  // <psi_m| H' |psi_k>
  for (int k = 0; k < d; ++k) {
    out.values(k) = es.values(k);
    out.slopes(k) = coupling(k, k).real();
    double sum = 0.0;
    for (int q = 0; q < d; ++q) {
      if (cluster_of[static_cast<std::size_t>(q)] == cluster_of[static_cast<std::size_t>(k)]) {
        continue;
      }
      sum += std::norm(coupling(q, k)) / (es.values(k) - es.values(q));
    }
    out.curvatures(k) = -es.values(k) + 2.0 * sum;
  }
  // Within a value cluster keep the Rayleigh quotients of the resolved vectors.
  for (const auto& [first, last] : clusters) {
    if (last - first < 2) continue;
    for (int k = first; k < last; ++k) {
      out.values(k) = v.col(k).dot(h * v.col(k)).real();
    }
  }
  return out;
}

EigenCurveTable::EigenCurveTable(SquareComplexMatrix a, AngleGrid grid)
    : a_(std::move(a)), grid_(grid), d_(a_.dim()) {
  scale_ = scale_of(a_);
  cluster_tol_ = kClusterRel * scale_;
  identity_tol_ = kIdentityRel * scale_;

  for (;;) {
    // Start where the spectrum is best separated.
    const std::size_t n = grid_.size();
    const std::size_t stride = n / 64;
    std::size_t start = 0;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n; j += stride) {
      const RVector vals = eigh(rotated_real_part(a_, grid_.angle(j))).values;
      double gap = std::numeric_limits<double>::infinity();
      for (int k = 1; k < d_; ++k) gap = std::min(gap, vals(k) - vals(k - 1));
      if (gap > best_gap) {
        best_gap = gap;
        start = j;
      }
    }
    if (build(start)) break;
    if (grid_.size() * 2 > AngleGrid::kMaxSize) {
      throw ToleranceBreakdown("unresolved branch monodromy");
    }
    grid_ = AngleGrid(grid_.size() * 2);
  }

  identical_.assign(static_cast<std::size_t>(d_), std::vector<char>(static_cast<std::size_t>(d_), 0));
  for (int k = 0; k < d_; ++k) {
    identical_[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1;
    for (int l = k + 1; l < d_; ++l) {
      double diff = 0.0;
      for (std::size_t j = 0; j < grid_.size(); ++j) {
        diff = std::max(diff, std::abs(value(k, j) - value(l, j)));
      }
      const char same = diff <= identity_tol_ ? 1 : 0;
      identical_[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = same;
      identical_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = same;
    }
  }
}

bool EigenCurveTable::build(std::size_t start) {
  const std::size_t n = grid_.size();
  const auto d = static_cast<std::size_t>(d_);
  values_.assign(n * d, 0.0);
  slopes_.assign(n * d, 0.0);
  curvatures_.assign(n * d, 0.0);
  positions_.assign(n * d, 0);
  vectors_.assign(n, CMatrix());

  auto store = [&](std::size_t j, const ResolvedSpectrum& rs) {
    for (int k = 0; k < d_; ++k) {
      values_[idx(k, j)] = rs.values(k);
      slopes_[idx(k, j)] = rs.slopes(k);
      curvatures_[idx(k, j)] = rs.curvatures(k);
    }
    vectors_[j] = rs.vectors;
  };

  store(start, resolve_spectrum(a_, grid_.angle(start)));
  for (std::size_t step = 1; step < n; ++step) {
    const std::size_t prev = (start + step - 1) % n;
    const std::size_t j = (start + step) % n;
    const ResolvedSpectrum rs = resolve_spectrum(a_, grid_.angle(j), &vectors_[prev]);
    store(j, reorder(rs, greedy_match(vectors_[prev], rs.vectors)));
  }
  // Around the circle the labels must return to themselves.
  const std::size_t last = (start + n - 1) % n;
  const std::vector<int> closing = greedy_match(vectors_[last], vectors_[start]);
  for (int k = 0; k < d_; ++k) {
    if (closing[static_cast<std::size_t>(k)] != k) return false;
  }

  // Relabel so that labels ascend at theta = 0 (value, then slope).
  std::vector<int> order;
  for (int k = 0; k < d_; ++k) {
    auto before = [&](int x, int y) {
      const double dv = value(x, 0) - value(y, 0);
      if (std::abs(dv) > cluster_tol_) return dv < 0.0;
      const double ds = slope(x, 0) - slope(y, 0);
      if (std::abs(ds) > cluster_tol_) return ds < 0.0;
      return x < y;
    };
    auto pos = order.begin();
    while (pos != order.end() && before(*pos, k)) ++pos;
    order.insert(pos, k);
  }
  std::vector<double> v2(values_.size()), s2(values_.size()), c2(values_.size());
  std::vector<CMatrix> vec2(n);
  for (std::size_t j = 0; j < n; ++j) {
    vec2[j].resize(d_, d_);
    for (int k = 0; k < d_; ++k) {
      const int old = order[static_cast<std::size_t>(k)];
      v2[idx(k, j)] = values_[idx(old, j)];
      s2[idx(k, j)] = slopes_[idx(old, j)];
      c2[idx(k, j)] = curvatures_[idx(old, j)];
      vec2[j].col(k) = vectors_[j].col(old);
    }
  }
  values_ = std::move(v2);
  slopes_ = std::move(s2);
  curvatures_ = std::move(c2);
  vectors_ = std::move(vec2);

  std::vector<int> labels(d);
  for (std::size_t j = 0; j < n; ++j) {
    std::iota(labels.begin(), labels.end(), 0);
    std::sort(labels.begin(), labels.end(), [&](int x, int y) {
      return std::make_pair(value(x, j), x) < std::make_pair(value(y, j), y);
    });
    for (int r = 0; r < d_; ++r) positions_[idx(labels[static_cast<std::size_t>(r)], j)] = r;
  }
  return true;
}

BranchSample EigenCurveTable::sample(double theta) const {
  const std::size_t j = grid_.nearest(theta);
  if (periodic_distance(theta, grid_.angle(j)) <= 1e-14) {
    BranchSample s;
    s.theta = theta;
    s.values.resize(d_);
    s.slopes.resize(d_);
    s.curvatures.resize(d_);
    for (int k = 0; k < d_; ++k) {
      s.values(k) = value(k, j);
      s.slopes(k) = slope(k, j);
      s.curvatures(k) = curvature(k, j);
    }
    s.vectors = vectors_[j];
    return s;
  }
  const ResolvedSpectrum rs = resolve_spectrum(a_, theta, &vectors_[j]);
  return reorder(rs, greedy_match(vectors_[j], rs.vectors));
}

bool EigenCurveTable::identical(int k, int l) const {
  return identical_[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] != 0;
}

EigenCurveTable track_branches(const SquareComplexMatrix& a, AngleGrid grid) {
  return EigenCurveTable(a, grid);
}

double branch_derivative(const EigenCurveTable& table, int k, double theta) {
  if (k < 0 || k >= table.branches()) throw InputError("branch index out of range");
  return table.sample(theta).slopes(k);
}

MinEigenvalue min_eigenvalue(const BranchSample& s, double active_tol) {
  MinEigenvalue out;
  const int d = static_cast<int>(s.values.size());
  out.value = s.values.minCoeff();
  for (int k = 0; k < d; ++k) {
    if (s.values(k) - out.value <= active_tol) out.active.push_back(k);
  }
  // The branch that is minimal just right (left) of theta minimizes the local
  // quadratic model at +eps (-eps). Values that differ by less than the
  // cluster tolerance still decide when the slopes are nearly equal.
  constexpr double eps = 1e-6;
  auto pick = [&](double side) {
    int best = out.active.front();
    double best_model = 0.0;
    for (std::size_t i = 0; i < out.active.size(); ++i) {
      const int k = out.active[i];
      const double m = s.values(k) - out.value + side * eps * s.slopes(k) +
                       0.5 * eps * eps * s.curvatures(k);
      if (i == 0 || m < best_model) {
        best = k;
        best_model = m;
      }
    }
    return best;
  };
  out.right_branch = pick(1.0);
  out.left_branch = pick(-1.0);
  out.right_deriv = s.slopes(out.right_branch);
  out.left_deriv = s.slopes(out.left_branch);
  out.right_curvature = s.curvatures(out.right_branch);
  out.left_curvature = s.curvatures(out.left_branch);
  return out;
}

MinEigenvalue min_eigenvalue(const EigenCurveTable& table, double theta) {
  return min_eigenvalue(table.sample(theta), table.cluster_tol());
}

cplx boundary_generating_point(const EigenCurveTable& table, int k, double theta) {
  if (k < 0 || k >= table.branches()) throw InputError("branch index out of range");
  const BranchSample s = table.sample(theta);
  return std::polar(1.0, theta) * cplx(s.values(k), s.slopes(k));
}

std::pair<double, double> fit_difference_exponent(const EigenCurveTable& table, int k, int l,
                                                   double theta_star) {
  const double noise = 1e-12 * table.scale();
  std::vector<double> xs, ys;
  for (double lo = 1e-3; lo <= 1e-2 + 1e-15 && xs.size() < 8; lo *= 10.0) {
    xs.clear();
    ys.clear();
    for (int i = 0; i < 8; ++i) {
      const double delta = lo * std::pow(10.0, i / 7.0);
      for (double side : {-1.0, 1.0}) {
        const BranchSample s = table.sample(theta_star + side * delta);
        const double diff = std::abs(s.values(k) - s.values(l));
        if (diff > noise) {
          xs.push_back(std::log(delta));
          ys.push_back(std::log(diff));
        }
      }
    }
  }
  if (xs.size() < 2) return {std::numeric_limits<double>::infinity(), 0.0};
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss += r * r;
  }
  return {slope, std::sqrt(ss / n)};
}

std::vector<CrossingRecord> find_crossings(const EigenCurveTable& table) {
  const std::size_t n = table.grid().size();
  const double h = table.grid().step();
  const double tol = table.cluster_tol();
  const double tangent_threshold = 10.0 * table.scale() * h * h;
  // A genuine root reaches rounding level; near misses stay well above it.
  const double root_tol = 1e-12 * table.scale();
  std::vector<CrossingRecord> out;

  auto diff_at = [&](int k, int l, double theta) {
    const BranchSample s = table.sample(theta);
    return s.values(k) - s.values(l);
  };

  for (int k = 0; k < table.branches(); ++k) {
    for (int l = k + 1; l < table.branches(); ++l) {
      if (table.identical(k, l)) continue;
      auto grid_diff = [&](std::size_t j) { return table.value(k, j) - table.value(l, j); };
      std::vector<double> roots;

      for (std::size_t j = 0; j < n; ++j) {
        const double dj = grid_diff(j);
        const double dnext = grid_diff(j + 1);
        const double dprev = grid_diff(j + n - 1);
        const double tj = table.grid().angle(j);

        if (std::abs(dj) > tol && std::abs(dnext) > tol && dj * dnext < 0.0) {
          // Strict sign change: bisection on the matched branch difference.
          double lo = tj, hi = tj + h, flo = dj;
          for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = diff_at(k, l, mid);
            if (fm == 0.0) {
              lo = hi = mid;
              break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          roots.push_back(0.5 * (lo + hi));
          continue;
        }
        const bool near_zero = std::abs(dj) <= tol;
        const bool tangent = !near_zero && std::abs(dj) <= tangent_threshold &&
                             std::abs(dj) < std::abs(dprev) && std::abs(dj) <= std::abs(dnext) &&
                             dj * dprev > 0.0 && dj * dnext > 0.0;
        if (!near_zero && !tangent) continue;
        // Golden-section minimization of |difference| on [theta_{j-1}, theta_{j+1}].
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = tj - h, b = tj + h;
        double c = b - g * (b - a), dd = a + g * (b - a);
        double fc = std::abs(diff_at(k, l, c)), fd = std::abs(diff_at(k, l, dd));
        for (int it = 0; it < 120 && b - a > 1e-15; ++it) {
          if (fc < fd) {
            b = dd;
            dd = c;
            fd = fc;
            c = b - g * (b - a);
            fc = std::abs(diff_at(k, l, c));
          } else {
            a = c;
            c = dd;
            fc = fd;
            dd = a + g * (b - a);
            fd = std::abs(diff_at(k, l, dd));
          }
        }
        double best = 0.5 * (a + b);
        // Exact grid zeros are kept as they are.
        if (near_zero && std::abs(dj) <= std::abs(diff_at(k, l, best))) best = tj;
        // A minimum on the bracket edge means the approach continues outside.
        if (best != tj && (best - (tj - h) < 1e-3 * h || (tj + h) - best < 1e-3 * h)) continue;
        if (std::abs(diff_at(k, l, best)) > root_tol) continue;
        // Odd contact: polish the flat golden-section minimum by bisection.
        for (double s = 1e-7; s <= 0.5 * h; s *= 4.0) {
          double lo = best - s, hi = best + s;
          double flo = diff_at(k, l, lo);
          const double fhi = diff_at(k, l, hi);
          if (flo == 0.0 || fhi == 0.0 || (flo < 0.0) == (fhi < 0.0)) continue;
          for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = diff_at(k, l, mid);
            if ((fm < 0.0) == (flo < 0.0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          best = 0.5 * (lo + hi);
          break;
        }
        roots.push_back(best);
      }

      std::vector<double> unique;
      for (double r : roots) {
        const double w = wrap_angle(r);
        bool dup = false;
        for (double u : unique) dup = dup || periodic_distance(u, w) < 0.125 * h;
        if (!dup) unique.push_back(w);
      }
      std::sort(unique.begin(), unique.end());

      for (double theta : unique) {
        CrossingRecord rec;
        rec.theta = theta;
        rec.k = k;
        rec.l = l;
        const auto [p, residual] = fit_difference_exponent(table, k, l, theta);
        rec.exponent = p;
        rec.order_resolved = std::isfinite(p) && residual <= 0.1;
        rec.contact_order = rec.order_resolved ? std::max(0, static_cast<int>(std::lround(p)) - 1) : 0;
        const BranchSample s = table.sample(theta);
        const double lam = s.values.minCoeff();
        rec.involves_minimum = s.values(k) - lam <= tol && s.values(l) - lam <= tol;
        out.push_back(rec);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const CrossingRecord& x, const CrossingRecord& y) {
    return std::tie(x.theta, x.k, x.l) < std::tie(y.theta, y.k, y.l);
  });
  return out;
}

}  // namespace numrange
