#pragma once

#include <string>

#include "csifb/numerics.hpp"

namespace csifb {

/// Text matrix format used to exchange covariance matrices with other
/// implementations: first line is the dimension N, followed by N rows of
/// N whitespace-separated `re,im` pairs. Values are written with 17
/// significant digits so doubles round-trip exactly.
void save_matrix_text(const Matrix& m, const std::string& path);
Matrix load_matrix_text(const std::string& path);

}  // namespace csifb
