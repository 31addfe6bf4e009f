#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lel/matcore.hpp"

namespace lel {

// 17 significant digits, '.' decimal separator, locale independent.
std::string format_double(double x);

struct NamedMatrix {
  std::string name;
  Matrix value;
};

// Block layout: "matrix,<name>,<n>" then n rows of 2n reals (re, im interleaved).
void write_matrix_csv(std::ostream& os, const std::string& name, const Matrix& a);
std::vector<NamedMatrix> read_matrix_csv(std::istream& is);
std::vector<NamedMatrix> read_matrix_csv_file(const std::string& path);
Matrix find_matrix(const std::vector<NamedMatrix>& blocks, const std::string& name);

// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace lel
