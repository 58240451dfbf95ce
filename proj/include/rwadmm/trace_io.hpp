#ifndef RWADMM_TRACE_IO_HPP
#define RWADMM_TRACE_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rwadmm {

// Shortest decimal form with up to 17 significant digits; round-trips exactly.
std::string format_g17(double value);

// write-temp-then-rename, so readers never observe partial files
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct TraceRecord {
  long event = 0;        // event count (async) or round count (sync)
  double sim_time_s = 0.0;
  double comm_units = 0.0;
  double accuracy = 0.0;
};

// Sampled metrics of one run plus the settings that produced it. Metadata is
// an ordered key/value list so serialization stays stable.
struct MetricsTrace {
  std::vector<TraceRecord> records;
  std::vector<std::pair<std::string, std::string>> metadata;

  void set_meta(std::string key, std::string value);
  const std::string* find_meta(std::string_view key) const;
};

inline constexpr std::string_view kTraceHeader = "event,sim_time_s,comm_units,accuracy";

std::string trace_to_csv(const MetricsTrace& trace);
void write_trace_csv(const MetricsTrace& trace, const std::filesystem::path& path);

// Throws std::runtime_error with "<path>:<line>: ..." on malformed input.
MetricsTrace read_trace_csv(const std::filesystem::path& path);
MetricsTrace trace_from_csv(std::string_view text, const std::string& origin);

}  // namespace rwadmm

#endif  // RWADMM_TRACE_IO_HPP
