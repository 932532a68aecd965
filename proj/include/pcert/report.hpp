#pragma once

#include <pcert/bench.hpp>

#include <string>
#include <string_view>

namespace pcert::harness {

enum class ReportFormat { Table, Csv };

/// Table: strengths as rows, experiments as columns, "mean (sd)" cells in
/// microseconds, then a keys/second block. Csv: one row per cell.
std::string emit_report(const BenchReport& report, ReportFormat format);

/// Parses emit_report(..., Csv) output. Throws MalformedEncoding.
std::vector<BenchCell> parse_csv(std::string_view text);

} // namespace pcert::harness
