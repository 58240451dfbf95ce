#include "rwadmm/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace rwadmm {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view field, const std::string& origin, int line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    fail(origin, line, "bad numeric field '" + std::string(field) + "'");
  return v;
}

long parse_long(std::string_view field, const std::string& origin, int line) {
  long v = 0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    fail(origin, line, "bad integer field '" + std::string(field) + "'");
  return v;
}

}  // namespace

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void MetricsTrace::set_meta(std::string key, std::string value) {
  for (auto& kv : metadata) {
    if (kv.first == key) {
      kv.second = std::move(value);
      return;
    }
  }
  metadata.emplace_back(std::move(key), std::move(value));
}

const std::string* MetricsTrace::find_meta(std::string_view key) const {
  for (const auto& kv : metadata)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

std::string trace_to_csv(const MetricsTrace& trace) {
  std::string out;
  out.reserve(64 * (trace.records.size() + trace.metadata.size() + 1));
  out += kTraceHeader;
  out += '\n';
  for (const auto& r : trace.records) {
    out += std::to_string(r.event);
    out += ',';
    out += format_g17(r.sim_time_s);
    out += ',';
    out += format_g17(r.comm_units);
    out += ',';
    out += format_g17(r.accuracy);
    out += '\n';
  }
  for (const auto& [k, v] : trace.metadata) {
    out += "# ";
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void write_trace_csv(const MetricsTrace& trace, const std::filesystem::path& path) {
  write_file_atomic(path, trace_to_csv(trace));
}

MetricsTrace trace_from_csv(std::string_view text, const std::string& origin) {
  MetricsTrace trace;
  int lineno = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;
    if (line.empty()) continue;

    if (!saw_header) {
      if (line != kTraceHeader) fail(origin, lineno, "missing trace header");
      saw_header = true;
      continue;
    }
    if (line.starts_with('#')) {
      std::string_view body = line.substr(1);
      if (body.starts_with(' ')) body.remove_prefix(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos)
        fail(origin, lineno, "metadata line without '='");
      trace.metadata.emplace_back(std::string(body.substr(0, eq)),
                                  std::string(body.substr(eq + 1)));
      continue;
    }

    TraceRecord rec;
    std::string_view fields[4];
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const auto comma = line.find(',', start);
      if (f < 3 && comma == std::string_view::npos)
        fail(origin, lineno, "expected 4 comma-separated fields");
      fields[f] = (f < 3) ? line.substr(start, comma - start) : line.substr(start);
      start = comma + 1;
    }
    if (fields[3].find(',') != std::string_view::npos)
      fail(origin, lineno, "expected 4 comma-separated fields");
    rec.event = parse_long(fields[0], origin, lineno);
    rec.sim_time_s = parse_double(fields[1], origin, lineno);
    rec.comm_units = parse_double(fields[2], origin, lineno);
    rec.accuracy = parse_double(fields[3], origin, lineno);
    trace.records.push_back(rec);
  }
  if (!saw_header) fail(origin, 1, "empty trace file");
  return trace;
}

MetricsTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return trace_from_csv(ss.str(), path.string());
}

}  // namespace rwadmm
