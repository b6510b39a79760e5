#include <doctest.h>

#include <json.hpp>

#include "cli_harness.hpp"
#include "fixtures.hpp"

using harness::run;
using harness::slurp;
using json = nlohmann::json;

TEST_CASE("boundary command writes csv and svg") {
  const auto dir = harness::scratch("cli_boundary");
  const auto in = harness::write_matrix(dir, fixtures::square().entries());
  const auto r = run({"boundary", "--input", in.string(), "--out-dir", (dir / "out").string(), "--grid", "1024"});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir / "out" / "boundary.csv");
  CHECK(csv.rfind("theta,lambda,dl_left,dl_right,re_x_plus,im_x_plus,re_x_minus,im_x_minus,kind\n", 0) == 0);
  const std::string svg = slurp(dir / "out" / "boundary.svg");
  CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("classify command") {
  const auto dir = harness::scratch("cli_classify");
  const auto in = harness::write_matrix(dir, fixtures::disk_plus_point().entries());
  REQUIRE(run({"classify", "--input", in.string(), "--out-dir", dir.string(), "--grid", "1024"}).code == 0);
  const json doc = json::parse(slurp(dir / "classify.json"));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["facets"].size() == 2);
  CHECK(doc["corners"].size() == 1);
  int non_exposed = 0;
  for (const auto& p : doc["points"]) non_exposed += p["kind"] == "non_exposed";
  CHECK(non_exposed == 2);
}

TEST_CASE("maxent command") {
  const auto dir = harness::scratch("cli_maxent");
  const auto in = harness::write_matrix(dir, fixtures::disk().entries());
  auto r = run({"maxent", "--input", in.string(), "--out-dir", dir.string(), "--grid", "1024", "--target", "0,0"});
  REQUIRE(r.code == 0);
  json doc = json::parse(slurp(dir / "maxent.json"));
  CHECK(doc["kind"] == "interior");
  CHECK(doc["entropy"].get<double>() == doctest::Approx(std::log(2.0)));

  r = run({"maxent", "--input", in.string(), "--out-dir", dir.string(), "--grid", "1024", "--target", "-1,0"});
  REQUIRE(r.code == 0);
  doc = json::parse(slurp(dir / "maxent.json"));
  CHECK(doc["kind"] == "extreme");

  r = run({"maxent", "--input", in.string(), "--out-dir", dir.string(), "--grid", "1024", "--target", "3,0"});
  CHECK(r.code == 3);
  CHECK(r.err.find("infeasible") != std::string::npos);
}

TEST_CASE("scan command") {
  const auto dir = harness::scratch("cli_scan");
  const auto in = harness::write_matrix(dir, fixtures::segment_plus_disk().entries());
  REQUIRE(run({"scan", "--input", in.string(), "--out-dir", dir.string(), "--dual"}).code == 0);
  const json doc = json::parse(slurp(dir / "scan.json"));
  bool at_one = false;
  for (const auto& d : doc["discontinuities"]) {
    at_one |= std::abs(d["z"]["re"].get<double>() - 1.0) < 1e-6 && std::abs(d["z"]["im"].get<double>()) < 1e-6;
  }
  CHECK(at_one);
  CHECK(slurp(dir / "dual.csv").rfind("phi,r,re_dual,im_dual", 0) == 0);
  CHECK(!slurp(dir / "branches.csv").empty());

  const auto sq_dir = harness::scratch("cli_scan_square");
  const auto sq = harness::write_matrix(sq_dir, fixtures::square().entries());
  REQUIRE(run({"scan", "--input", sq.string(), "--out-dir", sq_dir.string(), "--grid", "1024"}).code == 0);
  CHECK(json::parse(slurp(sq_dir / "scan.json"))["discontinuities"].empty());
}

TEST_CASE("degenerate input") {
  const auto dir = harness::scratch("cli_degenerate");
  numrange::CMatrix m(1, 1);
  m(0, 0) = 2.0;
  const auto in = harness::write_matrix(dir, m);
  REQUIRE(run({"boundary", "--input", in.string(), "--out-dir", dir.string()}).code == 0);
  const json doc = json::parse(slurp(dir / "degenerate.json"));
  CHECK(doc.at("degenerate").at("kind") == "point");
}

TEST_CASE("exit codes for bad input") {
  const auto dir = harness::scratch("cli_errors");
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run({"boundary", "--input", bad.string(), "--out-dir", dir.string()}).code == 2);
  CHECK(run({"boundary", "--input", (dir / "missing.json").string()}).code == 2);
  const auto in = harness::write_matrix(dir, fixtures::disk().entries());
  CHECK(run({"boundary", "--input", in.string(), "--grid", "1000"}).code == 2);
  CHECK(run({"maxent", "--input", in.string()}).code == 2);  // --target missing
  CHECK(run({"maxent", "--input", in.string(), "--target", "abc"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("report is deterministic") {
  const auto a = harness::scratch("cli_det_a");
  const auto b = harness::scratch("cli_det_b");
  const auto in = harness::write_matrix(a, fixtures::random_matrix(3, 12).entries());
  for (const auto& dir : {a, b}) {
    REQUIRE(run({"report", "--input", in.string(), "--out-dir", (dir / "out").string(), "--grid", "1024",
                 "--seed", "7", "--dual", "--svg"})
                .code == 0);
  }
  for (const char* f : {"report.json", "boundary.csv", "branches.csv", "dual.csv", "boundary.svg"}) {
    CHECK(slurp(a / "out" / f) == slurp(b / "out" / f));
    CHECK(!slurp(a / "out" / f).empty());
  }
}
