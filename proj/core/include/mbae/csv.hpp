#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mbae/run_record.hpp"

namespace mbae {

// Per-run CSV: header row with the RunRecord fields in declaration order,
// '\n' newlines, locale-independent shortest round-trip number formatting.
std::string run_records_to_csv(std::span<const RunRecord> records);
std::vector<RunRecord> run_records_from_csv(const std::string& text);

// Per-episode aggregation of one variant across seeds.
struct AggregateRow {
  std::int64_t episode = 0;
  double env_steps = 0.0;     // mean across seeds
  double return_center = 0.0; // mean (or median) of per-seed mean returns
  double return_spread = 0.0; // std across seeds
  std::int64_t seeds = 0;

  bool operator==(const AggregateRow&) const = default;
};

std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs,
                                         bool use_median);
std::string aggregate_to_csv(std::span<const AggregateRow> rows);
std::vector<AggregateRow> aggregate_from_csv(const std::string& text);

// Small file helpers shared by the experiment runner.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Shortest round-trip decimal encoding of a double (std::to_chars).
std::string format_double(double v);

}  // namespace mbae
