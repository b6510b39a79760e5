#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "numrange/boundary.hpp"
#include "numrange/dual_body.hpp"
#include "numrange/errors.hpp"
#include "numrange/export.hpp"
#include "numrange/matrix_io.hpp"
#include "numrange/maxent.hpp"
#include "numrange/oracle.hpp"

namespace numrange::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string input;
  std::string out_dir = ".";
  std::size_t grid = AngleGrid::kDefaultSize;
  std::uint64_t seed = 0;
  std::string prior;
  bool dual = false;
  double tol_facet = 0.0;
  bool svg = false;
  std::string target;
};

json number(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

json point(cplx z) { return {{"re", number(z.real())}, {"im", number(z.imag())}}; }

json matrix(const CMatrix& m) { return json::parse(matrix_to_json(m)); }

json optional_order(const std::optional<int>& o) {
  if (o) return *o;
  return "analytic";
}

cplx parse_target(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("--target must be \"re,im\"");
  try {
    std::size_t used_re = 0, used_im = 0;
    const std::string re = text.substr(0, comma), im = text.substr(comma + 1);
    const double x = std::stod(re, &used_re);
    const double y = std::stod(im, &used_im);
    if (used_re != re.size() || used_im != im.size() || !std::isfinite(x) || !std::isfinite(y)) {
      throw InputError("--target must be \"re,im\"");
    }
    return {x, y};
  } catch (const std::logic_error&) {
    throw InputError("--target must be \"re,im\"");
  }
}

GeometryOptions geometry_options(const RunConfig& cfg) {
  GeometryOptions opt;
  opt.grid = cfg.grid;
  opt.tol_facet = cfg.tol_facet;
  return opt;
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_json(const RunConfig& cfg, const std::string& name, const json& doc) {
  write_text_file(path_in(cfg, name), doc.dump(2) + "\n");
}

json header(const RunConfig& cfg, const SquareComplexMatrix& a) {
  return {{"schema_version", 1},
          {"command", cfg.command},
          {"dim", a.dim()},
          {"grid", cfg.grid},
          {"norm", a.norm()}};
}

json degenerate_json(const DegenerateRange& r) {
  return {{"kind", r.is_point ? "point" : "segment"}, {"a", point(r.a)}, {"b", point(r.b)}};
}

json classification_json(const Classification& c) {
  json doc = json::object();
  json facets = json::array();
  for (const FacetRecord& f : c.facets) {
    facets.push_back({{"alpha", f.alpha},
                      {"x_minus", point(f.x_minus)},
                      {"x_plus", point(f.x_plus)},
                      {"length", f.length}});
  }
  json corners = json::array();
  for (const CornerRecord& k : c.corners) {
    corners.push_back({{"z", point(k.z)},
                       {"alpha_begin", k.alpha_begin},
                       {"alpha_end", k.alpha_end},
                       {"splitting_residual", k.splitting_residual}});
  }
  json points = json::array();
  for (const ExtremePointRecord& p : c.points) {
    points.push_back({{"z", point(p.z)},
                      {"kind", to_string(p.kind)},
                      {"theta_begin", p.theta_begin},
                      {"theta_end", p.theta_end},
                      {"incident_facets", p.incident_facets},
                      {"rho_minus", number(p.rho_minus)},
                      {"rho_plus", number(p.rho_plus)},
                      {"order_minus", optional_order(p.order_minus)},
                      {"order_plus", optional_order(p.order_plus)}});
  }
  doc["facets"] = facets;
  doc["corners"] = corners;
  doc["points"] = points;
  return doc;
}

json continuity_json(const ContinuityRecord& r) {
  json doc = {{"z", point(r.z)},
              {"kind", to_string(r.kind)},
              {"theta", r.theta},
              {"branches", r.branches},
              {"maxent_continuous", r.maxent_continuous},
              {"f_inv_strong", r.f_inv_strong},
              {"f_inv_weak", r.f_inv_weak},
              {"in_facet", r.in_facet}};
  if (r.witness) {
    doc["witness"] = {{"k", r.witness->first}, {"l", r.witness->second}};
    if (r.witness_exponent) doc["witness"]["exponent"] = *r.witness_exponent;
  }
  return doc;
}

json scan_json(const BoundaryGeometry& g, const std::optional<CMatrix>& prior) {
  json doc = json::object();
  const ContinuityReport rep = scan_discontinuities(g);
  json pts = json::array();
  for (const ContinuityRecord& r : rep.points) {
    const bool notable = r.kind != ExtremeKind::regular_exposed || r.branches.size() > 1;
    if (notable) pts.push_back(continuity_json(r));
  }
  json disc = json::array();
  for (const ContinuityRecord& r : rep.discontinuities) disc.push_back(continuity_json(r));
  json crossings = json::array();
  for (const CrossingRecord& c : g.crossings()) {
    crossings.push_back({{"theta", c.theta},
                         {"k", c.k},
                         {"l", c.l},
                         {"exponent", number(c.exponent)},
                         {"contact_order", c.contact_order},
                         {"order_resolved", c.order_resolved},
                         {"involves_minimum", c.involves_minimum}});
  }
  doc["points"] = pts;
  doc["discontinuities"] = disc;
  doc["crossings"] = crossings;
  if (prior) {
    json jumps = json::array();
    for (const JumpRecord& j : scan_jumps(g, prior)) {
      jumps.push_back({{"z", point(j.z)}, {"theta", j.theta}, {"jump", j.jump}});
    }
    doc["prior_jumps"] = jumps;
  }
  return doc;
}

json maxent_json(const BoundaryGeometry& g, cplx z, const std::optional<CMatrix>& prior) {
  const MaxEntResult r = infer(g, z);
  json doc = {{"target", point(z)},
              {"kind", to_string(r.kind)},
              {"entropy", r.entropy},
              {"residual", r.residual},
              {"dual_params", {r.dual_params[0], r.dual_params[1]}},
              {"state", matrix(r.state)}};
  if (prior && r.kind == MaxEntKind::extreme && !g.degeneracy()) {
    const TargetLocation loc = locate_target(g, z);
    doc["prior_state"] = matrix(prior_inference(g.table(), z, loc.theta, *prior));
  }
  return doc;
}

std::optional<CMatrix> load_prior(const RunConfig& cfg, const SquareComplexMatrix& a) {
  if (cfg.prior.empty()) return std::nullopt;
  CMatrix p = read_density_file(cfg.prior);
  if (p.rows() != a.dim()) throw InputError("prior dimension does not match the matrix");
  return p;
}

int execute(const RunConfig& cfg, std::ostream& out) {
  if (cfg.tol_facet < 0.0) throw InputError("--tol-facet must be positive");
  const AngleGrid grid_check(cfg.grid);
  (void)grid_check;
  const SquareComplexMatrix a = read_matrix_file(cfg.input);
  std::filesystem::create_directories(cfg.out_dir);
  const std::optional<CMatrix> prior = load_prior(cfg, a);
  const BoundaryGeometry g(a, geometry_options(cfg));
  const auto degenerate = g.degeneracy();

  if (degenerate && cfg.command != "maxent") {
    json doc = header(cfg, a);
    doc["degenerate"] = degenerate_json(*degenerate);
    write_json(cfg, "degenerate.json", doc);
    if (cfg.svg || cfg.command == "boundary") {
      write_text_file(path_in(cfg, "boundary.svg"), degenerate_svg(*degenerate));
    }
    out << "numerical range is contained in a line; wrote degenerate.json\n";
    return kOk;
  }

  if (cfg.command == "boundary") {
    write_text_file(path_in(cfg, "boundary.csv"), boundary_csv(g));
    write_text_file(path_in(cfg, "boundary.svg"), boundary_svg(g));
    out << "wrote boundary.csv, boundary.svg\n";
    return kOk;
  }
  if (cfg.command == "classify") {
    json doc = header(cfg, a);
    doc.update(classification_json(g.classify()));
    write_json(cfg, "classify.json", doc);
    if (cfg.svg) write_text_file(path_in(cfg, "boundary.svg"), boundary_svg(g));
    out << "wrote classify.json\n";
    return kOk;
  }
  if (cfg.command == "maxent") {
    if (cfg.target.empty()) throw InputError("maxent needs --target re,im");
    json doc = header(cfg, a);
    doc.update(maxent_json(g, parse_target(cfg.target), prior));
    write_json(cfg, "maxent.json", doc);
    out << "wrote maxent.json\n";
    return kOk;
  }
  if (cfg.command == "scan") {
    json doc = header(cfg, a);
    doc.update(scan_json(g, prior));
    write_json(cfg, "scan.json", doc);
    write_text_file(path_in(cfg, "branches.csv"), branch_csv(g.table()));
    if (cfg.dual) write_text_file(path_in(cfg, "dual.csv"), dual_csv(DualBody(g).samples()));
    if (cfg.svg) write_text_file(path_in(cfg, "boundary.svg"), boundary_svg(g));
    out << "wrote scan.json, branches.csv\n";
    return kOk;
  }
  // report: everything in one bundle.
  json doc = header(cfg, a);
  doc["classification"] = classification_json(g.classify());
  doc["scan"] = scan_json(g, prior);
  if (!cfg.target.empty()) doc["maxent"] = maxent_json(g, parse_target(cfg.target), prior);
  SeededSampler rng(cfg.seed);
  const std::vector<cplx> cloud = sample_range(a, 20000, rng);
  doc["oracle"] = {{"seed", cfg.seed},
                   {"samples", cloud.size()},
                   {"support_violation", support_violation(g.table(), cloud)},
                   {"hausdorff", hausdorff_to_range(g.table(), cloud)}};
  if (cfg.dual) {
    const DualBody dual(g);
    doc["dual"] = {{"origin_shift", point(dual.origin_shift())},
                   {"biduality_error", dual.biduality_error(16)}};
    write_text_file(path_in(cfg, "dual.csv"), dual_csv(dual.samples()));
  }
  write_json(cfg, "report.json", doc);
  write_text_file(path_in(cfg, "boundary.csv"), boundary_csv(g));
  write_text_file(path_in(cfg, "branches.csv"), branch_csv(g.table()));
  if (cfg.svg) write_text_file(path_in(cfg, "boundary.svg"), boundary_svg(g));
  out << "wrote report.json\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Numerical range boundary geometry and maximum-entropy inference"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Matrix JSON file")->required();
    sub->add_option("--out-dir", cfg.out_dir, "Directory for output files");
    sub->add_option("--grid", cfg.grid, "Angle grid size (power of two in [512, 2^20])");
    sub->add_option("--seed", cfg.seed, "Seed for oracle sampling");
    sub->add_option("--prior", cfg.prior, "Prior density matrix JSON");
    sub->add_flag("--dual", cfg.dual, "Also emit the dual body");
    sub->add_option("--tol-facet", cfg.tol_facet, "Facet length threshold");
    sub->add_flag("--svg", cfg.svg, "Also emit an SVG drawing");
  };
  for (const char* name : {"boundary", "classify", "scan", "report"}) {
    add_common(app.add_subcommand(name, std::string("Run ") + name));
  }
  CLI::App* maxent = app.add_subcommand("maxent", "MaxEnt state for a target point");
  add_common(maxent);
  maxent->add_option("--target", cfg.target, "Target point \"re,im\"")->required();
  app.get_subcommand("report")->add_option("--target", cfg.target, "Optional MaxEnt target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    return execute(cfg, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kInputError;
  } catch (const InfeasibleError& e) {
    err << e.what() << "\n";
    return kInfeasible;
  } catch (const ToleranceBreakdown& e) {
    err << "tolerance breakdown: " << e.what() << "\n";
    return kBreakdown;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kBreakdown;
  }
}

}  // namespace numrange::cli
