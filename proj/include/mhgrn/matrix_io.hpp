#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mhgrn/error.hpp"
#include "mhgrn/matrix.hpp"

namespace mhgrn {

// FMAT is the library's binary matrix format:
//   bytes 0..3   magic "FMAT"
//   bytes 4..7   u32 rows, little endian
//   bytes 8..11  u32 cols, little endian
//   then rows*cols little-endian f64 values, row-major.
// CSV (one row per line, comma-separated reals) is accepted as a fallback
// interchange format; load_matrix() sniffs the magic to pick the reader.

inline void write_fmat(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_fmat: cannot open " + path);
  out.write("FMAT", 4);
  std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  if (!out) throw IoError("write_fmat: write failed for " + path);
}

inline DenseMatrix read_fmat(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_fmat: cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FMAT", 4) != 0)
    throw ParseError("read_fmat: bad magic in " + path);
  std::uint32_t rows = 0, cols = 0;
  if (!in.read(reinterpret_cast<char*>(&rows), 4) ||
      !in.read(reinterpret_cast<char*>(&cols), 4))
    throw ParseError("read_fmat: truncated header in " + path);
  DenseMatrix m(rows, cols);
  if (!m.data().empty() &&
      !in.read(reinterpret_cast<char*>(m.data().data()),
               static_cast<std::streamsize>(m.data().size() * sizeof(double))))
    throw ParseError("read_fmat: truncated payload in " + path);
  if (!is_finite(m)) throw NonFinite("read_fmat: non-finite entry in " + path);
  return m;
}

inline void write_csv(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("write_csv: cannot open " + path);
  out.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write_csv: write failed for " + path);
}

inline DenseMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      // Trim surrounding whitespace before parsing.
      std::size_t b = cell.find_first_not_of(" \t\r");
      std::size_t e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos)
        throw ParseError("read_csv: empty cell at " + path + ":" +
                         std::to_string(lineno));
      cell = cell.substr(b, e - b + 1);
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("read_csv: bad number '" + cell + "' at " + path +
                         ":" + std::to_string(lineno));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("read_csv: ragged row at " + path + ":" +
                       std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("read_csv: no rows in " + path);
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  if (!is_finite(m)) throw NonFinite("read_csv: non-finite entry in " + path);
  return m;
}

/// Reads either format, dispatching on the FMAT magic bytes.
inline DenseMatrix load_matrix(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("load_matrix: cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  probe.read(magic, 4);
  probe.close();
  if (std::memcmp(magic, "FMAT", 4) == 0) return read_fmat(path);
  return read_csv(path);
}

/// Convenience: a 1 x n matrix row as a vector (statement vectors and other
/// single-row CSV/FMAT files).
inline std::vector<double> load_vector(const std::string& path) {
  DenseMatrix m = load_matrix(path);
  if (m.rows() != 1)
    throw ParseError("load_vector: expected a single row in " + path);
  return m.data();
}

}  // namespace mhgrn
