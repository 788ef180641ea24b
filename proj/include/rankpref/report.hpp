#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rankpref/harness.hpp"

namespace rankpref {

inline constexpr const char* report_csv_header =
    "dataset,method,r_hi,r_lo,n_pairs,discordant,concordant,ties,skipped,kendall_tau,rmse_withheld";

void write_report_csv(std::span<const DiscordanceReport> table, std::ostream& out);

/// Grouped bar chart of discordant counts: one panel per gap, one bar per method.
void write_report_svg(std::span<const DiscordanceReport> table, std::ostream& out);

enum class ReportFormat { csv, svg };

/// Throws std::invalid_argument on an empty table and DataError if the path
/// cannot be written.
void emit_report(std::span<const DiscordanceReport> table, ReportFormat format,
                 const std::filesystem::path& path);

/// Parses a file produced by write_report_csv.
std::vector<DiscordanceReport> read_report_csv(std::istream& in);

}  // namespace rankpref
