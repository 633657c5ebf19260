#pragma once

// Result files. CSV has one row per (record, check); JSON holds the full
// nested records. Reals carry 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "freqlab/harness/scenario.hpp"

namespace freqlab::harness {

inline constexpr const char* kCsvHeader = "scenario_id,check,status,margin,fitted_constant,grid,dt,M,T,lambda,gamma";

void write_csv(std::ostream& out, std::span<const ResultRecord> records);
void write_json(std::ostream& out, std::span<const ResultRecord> records, bool include_timing = true);

/// Writes <dir>/<stem>.csv or <dir>/<stem>.json, creating dir. Throws IoError.
std::filesystem::path emit_results(std::span<const ResultRecord> records, const std::string& format,
                                   const std::filesystem::path& dir, const std::string& stem = "results");

/// Reads a JSON array of records or a JSON-lines file (one record per line).
std::vector<ResultRecord> read_results(const std::filesystem::path& path);

/// Real formatted with 17 significant digits; empty for non-finite values.
std::string format_real(double v);

}  // namespace freqlab::harness
