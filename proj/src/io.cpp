#include "qrate/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qrate {

namespace {

using nlohmann::json;

std::vector<std::vector<double>> parse_grid(const json& j, int m,
                                            const std::string& field,
                                            const std::string& origin) {
  if (!j.is_array() || static_cast<int>(j.size()) != m) {
    throw usage_error(origin + ": field \"" + field + "\" must be an array of " +
                      std::to_string(m) + " rows");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(m);
  for (const auto& r : j) {
    if (!r.is_array() || static_cast<int>(r.size()) != m) {
      throw usage_error(origin + ": field \"" + field + "\" has a row of wrong length");
    }
    std::vector<double> row;
    row.reserve(m);
    for (const auto& v : r) {
      if (!v.is_number()) {
        throw usage_error(origin + ": field \"" + field + "\" has a non-numeric cell");
      }
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

HermitianMatrix parse_matrix_json(const std::string& text,
                                  const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw usage_error(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw usage_error(origin + ": expected a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    throw usage_error(origin + ": field \"dim\" missing or not an integer");
  }
  const int m = j["dim"].get<int>();
  if (m < 1) throw usage_error(origin + ": field \"dim\" must be >= 1");
  if (!j.contains("re")) throw usage_error(origin + ": field \"re\" missing");
  auto re = parse_grid(j["re"], m, "re", origin);
  std::vector<std::vector<double>> im;
  if (j.contains("im")) {
    im = parse_grid(j["im"], m, "im", origin);
  } else {
    im.assign(m, std::vector<double>(m, 0.0));
  }
  cmat M(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) M(i, k) = {re[i][k], im[i][k]};
  }
  return HermitianMatrix(std::move(M));
}

HermitianMatrix read_matrix_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_json(buf.str(), path);
}

std::string matrix_to_json(const HermitianMatrix& A) {
  const int m = A.dim();
  json re = json::array(), im = json::array();
  bool any_im = false;
  for (int i = 0; i < m; ++i) {
    json rrow = json::array(), irow = json::array();
    for (int k = 0; k < m; ++k) {
      rrow.push_back(A.entries()(i, k).real());
      irow.push_back(A.entries()(i, k).imag());
      if (A.entries()(i, k).imag() != 0.0) any_im = true;
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  json j;
  j["dim"] = m;
  j["re"] = std::move(re);
  if (any_im) j["im"] = std::move(im);
  return j.dump(2) + "\n";
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

csv_table::csv_table(std::vector<std::string> header)
    : header_(std::move(header)) {}

void csv_table::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) {
    throw error("CSV row width does not match header");
  }
  rows_.push_back(cells);
}

std::string csv_table::cell(long long v) { return std::to_string(v); }

std::string csv_table::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) os << ',';
    os << header_[i];
  }
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  fs::path tmp = dir / (target.filename().string() + ".tmp." +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw usage_error("cannot write to " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw error("atomic rename to " + path + " failed: " + ec.message());
  }
}

}  // namespace qrate
