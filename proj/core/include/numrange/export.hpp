#pragma once

#include <string>
#include <vector>

#include "numrange/boundary.hpp"

namespace numrange {

// Shortest round-trip-safe decimal form used by every text writer.
std::string format_number(double x);

// One row per grid angle plus one per singular normal:
// theta,lambda,dl_left,dl_right,re_x_plus,im_x_plus,re_x_minus,im_x_minus,kind
// where kind is regular, singular or corner_cone.
std::string boundary_csv(const BoundaryGeometry& g);

// theta,k,lambda_k,dlambda_k,re_z,im_z for every branch at every grid angle.
std::string branch_csv(const EigenCurveTable& table);

// Static drawing of the boundary with facets and corners highlighted.
std::string boundary_svg(const BoundaryGeometry& g);

// Segment or point picture for a range contained in a line.
std::string degenerate_svg(const DegenerateRange& r);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace numrange
