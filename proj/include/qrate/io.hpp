#pragma once

#include <string>
#include <vector>

#include "qrate/linalg.hpp"

namespace qrate {

// Matrix JSON schema used repo-wide:
//   {"dim": m, "re": [[... m rows ...]], "im": [[...]]}
// "im" is optional and defaults to zero. Parse errors name the offending
// field.
HermitianMatrix read_matrix_json(const std::string& path);
HermitianMatrix parse_matrix_json(const std::string& text,
                                  const std::string& origin);
std::string matrix_to_json(const HermitianMatrix& A);

// Formats a double with 17 significant digits, '.' decimal, no locale.
std::string format_double(double v);

// Two-dimensional CSV table with a fixed header; numeric cells are rendered
// through format_double.
class csv_table {
 public:
  explicit csv_table(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  std::string str() const;

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(long long v);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes content to path atomically (temp file in the same directory, then
// rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qrate
