#include "mbae/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mbae/errors.hpp"

namespace mbae {

namespace {

constexpr const char* kRunHeader =
    "episode,env_steps,mean_return,std_return,value_loss,policy_loss,gen_loss,disc_loss,"
    "reward_loss,mbae_steps,mean_delta_norm";

constexpr const char* kAggregateHeader = "episode,env_steps,return_mean,return_std,seeds";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw IoError("csv line " + std::to_string(line_no) + ": bad number '" + field + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& field, std::size_t line_no) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw IoError("csv line " + std::to_string(line_no) + ": bad integer '" + field + "'");
  }
  return value;
}

std::vector<std::string> non_empty_lines(const std::string& text, std::size_t& last_line) {
  std::vector<std::string> lines;
  std::string current;
  std::size_t line_no = 0;
  std::istringstream in(text);
  while (std::getline(in, current)) {
    ++line_no;
    if (!current.empty() && current.back() == '\r') current.pop_back();
    if (current.empty()) continue;
    lines.push_back(current);
  }
  last_line = line_no;
  return lines;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw NumericError("double formatting failed");
  return std::string(buf, ptr);
}

std::string run_records_to_csv(std::span<const RunRecord> records) {
  std::string out = kRunHeader;
  out += '\n';
  for (const RunRecord& r : records) {
    out += std::to_string(r.episode);
    out += ',';
    out += std::to_string(r.env_steps);
    out += ',';
    out += format_double(r.mean_return);
    out += ',';
    out += format_double(r.std_return);
    out += ',';
    out += format_double(r.value_loss);
    out += ',';
    out += format_double(r.policy_loss);
    out += ',';
    out += format_double(r.gen_loss);
    out += ',';
    out += format_double(r.disc_loss);
    out += ',';
    out += format_double(r.reward_loss);
    out += ',';
    out += std::to_string(r.mbae_steps);
    out += ',';
    out += format_double(r.mean_delta_norm);
    out += '\n';
  }
  return out;
}

std::vector<RunRecord> run_records_from_csv(const std::string& text) {
  std::size_t total_lines = 0;
  const std::vector<std::string> lines = non_empty_lines(text, total_lines);
  if (lines.empty() || lines[0] != kRunHeader) {
    throw IoError("csv line 1: missing run-record header");
  }
  std::vector<RunRecord> records;
  std::int64_t last_episode = -1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 11) {
      throw IoError("csv line " + std::to_string(i + 1) + ": expected 11 fields, got " +
                    std::to_string(fields.size()));
    }
    RunRecord r;
    r.episode = parse_int(fields[0], i + 1);
    r.env_steps = parse_int(fields[1], i + 1);
    r.mean_return = parse_double(fields[2], i + 1);
    r.std_return = parse_double(fields[3], i + 1);
    r.value_loss = parse_double(fields[4], i + 1);
    r.policy_loss = parse_double(fields[5], i + 1);
    r.gen_loss = parse_double(fields[6], i + 1);
    r.disc_loss = parse_double(fields[7], i + 1);
    r.reward_loss = parse_double(fields[8], i + 1);
    r.mbae_steps = parse_int(fields[9], i + 1);
    r.mean_delta_norm = parse_double(fields[10], i + 1);
    if (r.episode <= last_episode) {
      throw IoError("csv line " + std::to_string(i + 1) + ": episodes must be increasing");
    }
    last_episode = r.episode;
    records.push_back(r);
  }
  return records;
}

std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs,
                                         bool use_median) {
  if (runs.empty()) throw ConfigError("aggregate over zero runs");
  const std::size_t rows = runs[0].size();
  for (const auto& run : runs) {
    if (run.size() != rows) {
      throw ConfigError("aggregate: runs have differing record counts");
    }
  }
  std::vector<AggregateRow> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> returns(runs.size());
    double steps = 0.0;
    for (std::size_t s = 0; s < runs.size(); ++s) {
      if (runs[s][i].episode != runs[0][i].episode) {
        throw ConfigError("aggregate: episode grids differ between runs");
      }
      returns[s] = runs[s][i].mean_return;
      steps += static_cast<double>(runs[s][i].env_steps);
    }
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= static_cast<double>(returns.size());

    double center = mean;
    if (use_median) {
      std::vector<double> sorted = returns;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      center = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }

    out[i].episode = runs[0][i].episode;
    out[i].env_steps = steps / static_cast<double>(runs.size());
    out[i].return_center = center;
    out[i].return_spread = std::sqrt(var);
    out[i].seeds = static_cast<std::int64_t>(runs.size());
  }
  return out;
}

std::string aggregate_to_csv(std::span<const AggregateRow> rows) {
  std::string out = kAggregateHeader;
  out += '\n';
  for (const AggregateRow& r : rows) {
    out += std::to_string(r.episode);
    out += ',';
    out += format_double(r.env_steps);
    out += ',';
    out += format_double(r.return_center);
    out += ',';
    out += format_double(r.return_spread);
    out += ',';
    out += std::to_string(r.seeds);
    out += '\n';
  }
  return out;
}

std::vector<AggregateRow> aggregate_from_csv(const std::string& text) {
  std::size_t total_lines = 0;
  const std::vector<std::string> lines = non_empty_lines(text, total_lines);
  if (lines.empty() || lines[0] != kAggregateHeader) {
    throw IoError("csv line 1: missing aggregate header");
  }
  std::vector<AggregateRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 5) {
      throw IoError("csv line " + std::to_string(i + 1) + ": expected 5 fields");
    }
    AggregateRow r;
    r.episode = parse_int(fields[0], i + 1);
    r.env_steps = parse_double(fields[1], i + 1);
    r.return_center = parse_double(fields[2], i + 1);
    r.return_spread = parse_double(fields[3], i + 1);
    r.seeds = parse_int(fields[4], i + 1);
    rows.push_back(r);
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mbae
