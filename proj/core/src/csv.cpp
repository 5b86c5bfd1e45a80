#include "accel/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "accel/errors.hpp"

namespace accel::csv {

namespace {

std::ifstream open_for_read(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot open '" + path.string() + "' for reading");
  return in;
}

double parse_double(const std::string &cell, const std::filesystem::path &path, std::size_t line) {
  std::size_t first = cell.find_first_not_of(" \t\r");
  std::size_t last = cell.find_last_not_of(" \t\r");
  if (first == std::string::npos) {
    throw Error(ErrorKind::ConfigInvalid,
                path.string() + ":" + std::to_string(line) + ": empty numeric cell");
  }
  const std::string trimmed = cell.substr(first, last - first + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
  if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ":" + std::to_string(line) +
                                              ": not a number: '" + trimmed + "'");
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<std::string> split_line(const std::string &line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

void write_text(const std::filesystem::path &path, const std::string &content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error(ErrorKind::IOFailure, "write to '" + path.string() + "' failed");
}

void write_trace(const std::filesystem::path &path, const std::vector<TraceRecord> &trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRecord &r : trace) {
    out += std::to_string(r.k);
    out += ',' + format_number(r.t);
    out += ',' + format_number(r.f_value);
    out += ',';
    if (r.error) out += format_number(*r.error);
    out += ',' + format_number(r.constraint_violation);
    out += ',' + format_number(r.grad_norm);
    out += '\n';
  }
  write_text(path, out);
}

std::vector<TraceRecord> read_trace(const std::filesystem::path &path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": missing trace header");
  }
  std::vector<TraceRecord> trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 6) {
      throw Error(ErrorKind::ConfigInvalid,
                  path.string() + ":" + std::to_string(lineno) + ": expected 6 columns");
    }
    TraceRecord r;
    r.k = static_cast<long>(parse_double(cells[0], path, lineno));
    r.t = parse_double(cells[1], path, lineno);
    r.f_value = parse_double(cells[2], path, lineno);
    if (!cells[3].empty()) r.error = parse_double(cells[3], path, lineno);
    r.constraint_violation = parse_double(cells[4], path, lineno);
    r.grad_norm = parse_double(cells[5], path, lineno);
    trace.push_back(r);
  }
  return trace;
}

Matrix read_matrix(const std::filesystem::path &path) {
  std::ifstream in = open_for_read(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const std::string &cell : split_line(line)) row.push_back(parse_double(cell, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::ConfigInvalid,
                  path.string() + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::ConfigInvalid, path.string() + ": empty matrix file");
  Matrix M(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  }
  return M;
}

void write_matrix(const std::filesystem::path &path, const Matrix &M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(M(i, j));
    }
    out += '\n';
  }
  write_text(path, out);
}

}  // namespace accel::csv
