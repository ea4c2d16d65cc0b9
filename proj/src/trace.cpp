#include "npbnn/trace.hpp"

#include <stdexcept>

#include <json.hpp>

namespace npbnn {

std::string trace_line(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["sweep"] = r.sweep;
  j["phi"] = r.phi;
  j["active_clusters"] = r.active_clusters;
  j["noise_draw"] = r.noise_draw;
  if (r.theta) j["theta"] = *r.theta;
  if (r.forecasts) j["forecasts"] = *r.forecasts;
  return j.dump();
}

TraceRecord parse_trace_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  TraceRecord r;
  r.sweep = j.at("sweep").get<std::uint64_t>();
  r.phi = j.at("phi").get<double>();
  r.active_clusters = j.at("active_clusters").get<int>();
  r.noise_draw = j.at("noise_draw").get<double>();
  if (j.contains("theta")) r.theta = j["theta"].get<std::vector<double>>();
  if (j.contains("forecasts")) r.forecasts = j["forecasts"].get<std::vector<double>>();
  return r;
}

TraceWriter::TraceWriter(const std::filesystem::path& path, std::size_t flush_every)
    : out_(path), flush_every_(flush_every) {
  if (!out_) throw std::runtime_error("cannot write trace " + path.string());
}

TraceWriter::~TraceWriter() {
  try {
    close();
  } catch (...) {
  }
}

void TraceWriter::write(const TraceRecord& record) {
  buffer_.push_back(trace_line(record));
  if (buffer_.size() >= flush_every_) flush();
}

void TraceWriter::flush() {
  for (const auto& line : buffer_) out_ << line << '\n';
  buffer_.clear();
  out_.flush();
  if (!out_) throw std::runtime_error("trace write failed");
}

void TraceWriter::close() {
  if (!out_.is_open()) return;
  flush();
  out_.close();
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_trace_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace npbnn
