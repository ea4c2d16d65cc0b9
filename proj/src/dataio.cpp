#include "npbnn/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace npbnn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_number(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Transform parse_transform(const std::string& name) {
  if (name == "none" || name.empty()) return Transform::None;
  if (name == "log10") return Transform::Log10;
  throw std::invalid_argument("unknown transform '" + name + "'");
}

std::string to_string(Transform t) { return t == Transform::Log10 ? "log10" : "none"; }

void NoiseMixtureSpec::validate() const {
  if (weights.empty() || weights.size() != std_devs.size()) {
    throw std::invalid_argument("noise mixture: weights and std_devs must be non-empty and equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("noise mixture: negative weight");
    if (!(std_devs[i] >= 0.0)) throw std::invalid_argument("noise mixture: negative std_dev");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("noise mixture: weights must sum to 1");
}

double NoiseMixtureSpec::draw(RngStream& rng) const {
  std::vector<double> lw(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) lw[i] = std::log(weights[i]);
  const std::size_t k = draw_categorical(rng, lw);
  return std_devs[k] * draw_std_normal(rng);
}

double NoiseMixtureSpec::density(double z) const {
  double f = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double s = std_devs[i];
    f += weights[i] * std::exp(-0.5 * z * z / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
  }
  return f;
}

TimeSeries simulate_logistic(RngStream& rng, double mu, double x0, int n, const NoiseMixtureSpec& noise) {
  if (n < 1) throw std::invalid_argument("simulate_logistic: n must be >= 1");
  noise.validate();
  TimeSeries out;
  out.name = "logistic";
  out.values.reserve(static_cast<std::size_t>(n));
  double x = x0;
  for (int t = 1; t <= n; ++t) {
    x = 1.0 - mu * x * x + noise.draw(rng);
    if (!(std::abs(x) <= 1e6)) {
      throw std::runtime_error("diverged orbit at step " + std::to_string(t));
    }
    out.values.push_back(x);
  }
  return out;
}

LagDataset embed(const TimeSeries& series, int rho) {
  if (rho < 1) throw std::invalid_argument("embed: rho must be >= 1");
  const auto n = static_cast<Eigen::Index>(series.size());
  if (n <= rho) throw std::invalid_argument("embed: series too short for the requested lag");
  LagDataset d;
  d.rho = rho;
  d.inputs.resize(n - rho, rho);
  d.targets.resize(n - rho);
  for (Eigen::Index t = rho; t < n; ++t) {
    d.targets(t - rho) = series.values[t];
    for (int j = 0; j < rho; ++j) d.inputs(t - rho, j) = series.values[t - 1 - j];
  }
  d.initial_states.assign(series.values.begin(), series.values.begin() + rho);
  return d;
}

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, std::size_t n_train) {
  if (n_train == 0 || n_train >= series.size()) {
    throw std::invalid_argument("split: n_train must satisfy 0 < n_train < length");
  }
  TimeSeries train{{series.values.begin(), series.values.begin() + static_cast<std::ptrdiff_t>(n_train)},
                   series.name, series.transform};
  TimeSeries test{{series.values.begin() + static_cast<std::ptrdiff_t>(n_train), series.values.end()},
                  series.name, series.transform};
  return {std::move(train), std::move(test)};
}

std::vector<double> tail_lag_state(const TimeSeries& series, int rho) {
  if (rho < 1 || series.size() < static_cast<std::size_t>(rho)) {
    throw std::invalid_argument("tail_lag_state: series shorter than lag");
  }
  return {series.values.rbegin(), series.values.rbegin() + rho};
}

TimeSeries load_csv(const std::filesystem::path& path, Transform transform) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  TimeSeries out;
  out.name = path.stem().string();
  out.transform = transform;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim(line);
    if (cell.empty()) continue;
    double v = 0.0;
    if (!parse_number(cell, v)) {
      if (first_content) {
        out.name = cell;
        first_content = false;
        continue;
      }
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
    first_content = false;
    if (transform == Transform::Log10) {
      if (!(v > 0.0)) {
        throw std::domain_error(path.string() + ":" + std::to_string(line_no) + ": log10 of non-positive value");
      }
      v = std::log10(v);
    }
    if (!std::isfinite(v)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
    }
    out.values.push_back(v);
  }
  if (out.values.empty()) throw std::runtime_error(path.string() + ": no observations");
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, ptr};
}

void save_csv(const std::filesystem::path& path, std::span<const double> values, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (!header.empty()) out << header << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

}  // namespace npbnn
