#include "numrange/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "numrange/errors.hpp"

namespace numrange {

namespace {

using json = nlohmann::json;

CMatrix parse_entries(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed matrix JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("entries")) {
    throw InputError("matrix JSON needs \"dim\" and \"entries\"");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1) {
    throw InputError("\"dim\" must be a positive integer");
  }
  const auto d = static_cast<Eigen::Index>(doc["dim"].get<long long>());
  const json& rows = doc["entries"];
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != d) {
    throw InputError("\"entries\" must be an array of dim rows");
  }
  CMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw InputError("row " + std::to_string(r) + " must have dim entries");
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_object() || !e.contains("re") || !e.contains("im") || !e["re"].is_number() ||
          !e["im"].is_number()) {
        throw InputError("entry (" + std::to_string(r) + "," + std::to_string(c) +
                         ") must be {\"re\": number, \"im\": number}");
      }
      m(r, c) = cplx(e["re"].get<double>(), e["im"].get<double>());
    }
  }
  return m;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SquareComplexMatrix parse_matrix_json(const std::string& text) {
  return SquareComplexMatrix(parse_entries(text));
}

SquareComplexMatrix read_matrix_file(const std::string& path) {
  return parse_matrix_json(slurp(path));
}

std::string matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({{"re", m(r, c).real()}, {"im", m(r, c).imag()}});
    }
    rows.push_back(std::move(row));
  }
  json doc = {{"dim", m.rows()}, {"entries", std::move(rows)}};
  return doc.dump();
}

CMatrix parse_density_json(const std::string& text) {
  CMatrix m = parse_entries(text);
  const HermitianMatrix h(m);  // throws when not Hermitian
  if (std::abs(m.trace() - cplx(1.0, 0.0)) > 1e-10) {
    throw InputError("density matrix must have unit trace");
  }
  return h.entries();
}

CMatrix read_density_file(const std::string& path) { return parse_density_json(slurp(path)); }

}  // namespace numrange
