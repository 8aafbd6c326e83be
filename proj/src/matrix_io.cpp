#include "csifb/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace csifb {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_matrix_text(const Matrix& m, const std::string& path) {
  if (m.rows() != m.cols()) {
    raise(ErrorCode::DimensionMismatch, "save_matrix_text: matrix not square");
  }
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::IoError, "save_matrix_text: cannot open " + path);
  }
  out << m.rows() << "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j).real()) << ','
          << format_double(m(i, j).imag());
    }
    out << "\n";
  }
  if (!out) {
    raise(ErrorCode::IoError, "save_matrix_text: write failed for " + path);
  }
}

Matrix load_matrix_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoError, "load_matrix_text: cannot open " + path);
  }
  Index n = 0;
  if (!(in >> n) || n < 1) {
    raise(ErrorCode::ParseError,
          "load_matrix_text: " + path + ": expected a positive dimension");
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      std::string token;
      if (!(in >> token)) {
        std::ostringstream oss;
        oss << "load_matrix_text: " << path << ": missing entry (" << i << ", "
            << j << ")";
        raise(ErrorCode::ParseError, oss.str());
      }
      const std::size_t comma = token.find(',');
      if (comma == std::string::npos) {
        raise(ErrorCode::ParseError, "load_matrix_text: " + path +
                                         ": entry is not a re,im pair: " +
                                         token);
      }
      try {
        std::size_t used_re = 0;
        std::size_t used_im = 0;
        const std::string re_s = token.substr(0, comma);
        const std::string im_s = token.substr(comma + 1);
        const double re = std::stod(re_s, &used_re);
        const double im = std::stod(im_s, &used_im);
        if (used_re != re_s.size() || used_im != im_s.size()) {
          throw std::invalid_argument(token);
        }
        m(i, j) = Complex(re, im);
      } catch (const std::exception&) {
        raise(ErrorCode::ParseError,
              "load_matrix_text: " + path + ": bad number in entry " + token);
      }
    }
  }
  std::string trailing;
  if (in >> trailing) {
    raise(ErrorCode::ParseError,
          "load_matrix_text: " + path + ": trailing content: " + trailing);
  }
  return m;
}

}  // namespace csifb
