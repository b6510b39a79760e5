#pragma once

#include <string>

#include "numrange/linalg.hpp"

namespace numrange {

// Matrix JSON: {"dim": d, "entries": [[{"re": x, "im": y}, ...], ...]}, row-major.
// Malformed documents raise InputError.
SquareComplexMatrix parse_matrix_json(const std::string& text);
SquareComplexMatrix read_matrix_file(const std::string& path);

// Serializes with the same schema; shortest round-trip decimal representation.
std::string matrix_to_json(const CMatrix& m);

// Density matrix JSON uses the matrix schema; the result must be Hermitian
// with unit trace (1e-10), otherwise InputError.
CMatrix parse_density_json(const std::string& text);
CMatrix read_density_file(const std::string& path);

}  // namespace numrange
