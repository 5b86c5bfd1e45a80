#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "accel/integrators.hpp"
#include "accel/matops.hpp"

namespace accel::csv {

/// Shortest form that round-trips a double ("%.17g").
std::string format_number(double value);

/// Header line of every trace file.
inline constexpr const char *kTraceHeader = "k,t,f,error,constraint_violation,grad_norm";

/// Writes a trace with kTraceHeader; a missing error is an empty cell.
void write_trace(const std::filesystem::path &path, const std::vector<TraceRecord> &trace);
std::vector<TraceRecord> read_trace(const std::filesystem::path &path);

/// Plain CSV of decimals, one matrix row per line. Throws IOFailure naming the
/// path when it cannot be opened, ConfigInvalid on malformed content.
Matrix read_matrix(const std::filesystem::path &path);
void write_matrix(const std::filesystem::path &path, const Matrix &M);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_line(const std::string &line);

/// Creates parent directories and overwrites path with content.
void write_text(const std::filesystem::path &path, const std::string &content);

}  // namespace accel::csv
