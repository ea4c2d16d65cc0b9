#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "npbnn/gibbs.hpp"

namespace npbnn {

/// One JSON object per line with fields sweep, phi, active_clusters,
/// noise_draw and, when present, theta and forecasts. Doubles are written in
/// shortest round-trip form.
std::string trace_line(const TraceRecord& record);
TraceRecord parse_trace_line(const std::string& line);

/// Buffered line-delimited trace output; flushes every `flush_every`
/// records and on close/destruction.
class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path, std::size_t flush_every = 1000);
  ~TraceWriter();
  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  void write(const TraceRecord& record);
  void flush();
  void close();

 private:
  std::ofstream out_;
  std::vector<std::string> buffer_;
  std::size_t flush_every_;
};

std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

}  // namespace npbnn
