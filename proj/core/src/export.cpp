#include "numrange/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "numrange/errors.hpp"

namespace numrange {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string row_kind(const BoundaryGeometry& g, double theta) {
  const int i = g.arc_index(theta);
  if (i < 0) return "singular";
  return g.arc_partition().arcs[static_cast<std::size_t>(i)].collapses ? "corner_cone" : "regular";
}

struct Viewport {
  double x0, y0, s;
  std::string x(double v) const { return format_number(std::round((v - x0) * s * 100.0) / 100.0); }
  std::string y(double v) const { return format_number(std::round((y0 - v) * s * 100.0) / 100.0); }
};

Viewport fit(const std::vector<cplx>& pts) {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  if (!pts.empty()) {
    xmin = xmax = pts[0].real();
    ymin = ymax = pts[0].imag();
  }
  for (const cplx& p : pts) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double pad = 0.05 * span;
  return {xmin - pad - 0.5 * (span - (xmax - xmin)), ymax + pad + 0.5 * (span - (ymax - ymin)),
          480.0 / (span + 2.0 * pad)};
}

const char* kSvgHead =
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
    "viewBox=\"0 0 480 480\">\n";

}  // namespace

std::string boundary_csv(const BoundaryGeometry& g) {
  std::vector<double> angles;
  const AngleGrid& grid = g.table().grid();
  for (std::size_t j = 0; j < grid.size(); ++j) angles.push_back(grid.angle(j));
  for (double a : g.singular_normals()) angles.push_back(a);
  std::stable_sort(angles.begin(), angles.end());

  std::ostringstream out;
  out << "theta,lambda,dl_left,dl_right,re_x_plus,im_x_plus,re_x_minus,im_x_minus,kind\n";
  for (double t : angles) {
    const BoundarySample s = g.support(t);
    out << format_number(t) << ',' << format_number(s.lambda) << ','
        << format_number(s.left_deriv) << ',' << format_number(s.right_deriv) << ','
        << format_number(s.x_plus.real()) << ',' << format_number(s.x_plus.imag()) << ','
        << format_number(s.x_minus.real()) << ',' << format_number(s.x_minus.imag()) << ','
        << row_kind(g, t) << '\n';
  }
  return out.str();
}

std::string branch_csv(const EigenCurveTable& table) {
  std::ostringstream out;
  out << "theta,k,lambda_k,dlambda_k,re_z,im_z\n";
  for (std::size_t j = 0; j < table.grid().size(); ++j) {
    const double t = table.grid().angle(j);
    for (int k = 0; k < table.branches(); ++k) {
      const double v = table.value(k, j);
      const double s = table.slope(k, j);
      const cplx z = std::polar(1.0, t) * cplx(v, s);
      out << format_number(t) << ',' << k << ',' << format_number(v) << ',' << format_number(s)
          << ',' << format_number(z.real()) << ',' << format_number(z.imag()) << '\n';
    }
  }
  return out.str();
}

std::string boundary_svg(const BoundaryGeometry& g) {
  const AngleGrid& grid = g.table().grid();
  std::vector<cplx> pts;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const BoundarySample s = g.support(grid.angle(j));
    pts.push_back(s.x_minus);
    pts.push_back(s.x_plus);
  }
  const Viewport vp = fit(pts);
  std::ostringstream out;
  out << kSvgHead;
  out << "<path fill=\"#dde7f3\" stroke=\"#1f4e79\" stroke-width=\"1.5\" d=\"";
  cplx last(std::nan(""), std::nan(""));
  bool first = true;
  for (const cplx& p : pts) {
    if (std::abs(p - last) < 1e-9 * (1.0 + g.scale())) continue;
    out << (first ? "M" : " L") << vp.x(p.real()) << ' ' << vp.y(p.imag());
    first = false;
    last = p;
  }
  out << " Z\"/>\n";
  const Classification c = g.classify();
  for (const FacetRecord& f : c.facets) {
    out << "<line stroke=\"#c0392b\" stroke-width=\"2.5\" x1=\"" << vp.x(f.x_minus.real())
        << "\" y1=\"" << vp.y(f.x_minus.imag()) << "\" x2=\"" << vp.x(f.x_plus.real())
        << "\" y2=\"" << vp.y(f.x_plus.imag()) << "\"/>\n";
  }
  for (const ExtremePointRecord& p : c.points) {
    if (p.kind == ExtremeKind::regular_exposed) continue;
    const char* colour = p.kind == ExtremeKind::corner ? "#27ae60" : "#8e44ad";
    out << "<circle r=\"4\" fill=\"" << colour << "\" cx=\"" << vp.x(p.z.real()) << "\" cy=\""
        << vp.y(p.z.imag()) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string degenerate_svg(const DegenerateRange& r) {
  const Viewport vp = fit({r.a, r.b, r.a + cplx(1e-3, 1e-3), r.a - cplx(1e-3, 1e-3)});
  std::ostringstream out;
  out << kSvgHead;
  if (r.is_point) {
    out << "<circle r=\"4\" fill=\"#1f4e79\" cx=\"" << vp.x(r.a.real()) << "\" cy=\""
        << vp.y(r.a.imag()) << "\"/>\n";
  } else {
    out << "<line stroke=\"#1f4e79\" stroke-width=\"2.5\" x1=\"" << vp.x(r.a.real()) << "\" y1=\""
        << vp.y(r.a.imag()) << "\" x2=\"" << vp.x(r.b.real()) << "\" y2=\"" << vp.y(r.b.imag())
        << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

}  // namespace numrange
