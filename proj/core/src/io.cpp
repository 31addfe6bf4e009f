#include "lel/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace lel {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_matrix_csv(std::ostream& os, const std::string& name, const Matrix& a) {
  if (a.rows() != a.cols()) throw StructuralError("write_matrix_csv: matrix must be square");
  os << "matrix," << name << "," << a.rows() << "\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) os << ",";
      os << format_double(a(i, j).real()) << "," << format_double(a(i, j).imag());
    }
    os << "\n";
  }
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw StructuralError("matrix csv: empty field");
  const std::string t = s.substr(b, e - b + 1);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw StructuralError("matrix csv: bad number '" + t + "'");
  }
  return v;
}

}  // namespace

std::vector<NamedMatrix> read_matrix_csv(std::istream& is) {
  std::vector<NamedMatrix> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    auto head = split(line, ',');
    if (head.size() != 3 || head[0] != "matrix") {
      throw StructuralError("matrix csv: expected header 'matrix,<name>,<n>', got '" + line + "'");
    }
    const int n = static_cast<int>(parse_real(head[2]));
    if (n < 1) throw StructuralError("matrix csv: bad dimension in '" + line + "'");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      if (!std::getline(is, line)) throw StructuralError("matrix csv: truncated block " + head[1]);
      auto f = split(line, ',');
      if (static_cast<int>(f.size()) != 2 * n) {
        throw StructuralError("matrix csv: row " + std::to_string(i) + " of " + head[1] +
                              " must have " + std::to_string(2 * n) + " fields");
      }
      for (int j = 0; j < n; ++j) m(i, j) = Complex(parse_real(f[2 * j]), parse_real(f[2 * j + 1]));
    }
    out.push_back({head[1], std::move(m)});
  }
  return out;
}

std::vector<NamedMatrix> read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  return read_matrix_csv(in);
}

Matrix find_matrix(const std::vector<NamedMatrix>& blocks, const std::string& name) {
  if (name.empty()) {
    if (blocks.size() == 1) return blocks.front().value;
    throw StructuralError("matrix csv: block name required when the file has several blocks");
  }
  for (const auto& b : blocks)
    if (b.name == name) return b.value;
  throw StructuralError("matrix csv: no block named " + name);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StructuralError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw StructuralError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw StructuralError("cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace lel
