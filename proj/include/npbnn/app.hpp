#pragma once

#include <filesystem>
#include <vector>

#include "npbnn/config.hpp"
#include "npbnn/forecast.hpp"
#include "npbnn/gibbs.hpp"

namespace npbnn {

struct ExperimentData {
  TimeSeries series;
  TimeSeries train;
  TimeSeries test;
  LagDataset train_lags;
};

/// Simulates or loads the series named by the config and splits it.
ExperimentData load_experiment_data(const ExperimentConfig& config);

/// Root stream of chain `index` for a given experiment seed.
RngStream chain_stream(std::uint64_t seed, int index);

/// Writes <output>/series.csv and <output>/series.provenance.json.
std::filesystem::path cmd_simulate(const ExperimentConfig& config);

struct FitOutput {
  std::vector<std::filesystem::path> traces;
  std::vector<RunSummary> summaries;
};

/// Runs config.chains chains and writes into config.output: config.json,
/// train.csv, test.csv, trace.jsonl (trace_chain<k>.jsonl for k > 1 chains),
/// noise_draws.csv (noise_draws_chain<k>.csv) and summary.json.
FitOutput cmd_fit(const ExperimentConfig& config);

/// Reads theta samples from `trace`, forecasts config.horizon steps from the
/// end of the training series and writes <output>/forecast.json and
/// <output>/forecast.csv.
ForecastResult cmd_predict(const ExperimentConfig& config, const std::filesystem::path& trace);

/// Compares the mean path of a forecast.json with a truth CSV and writes
/// metrics.txt (key = value) and metrics.json into `out_dir`.
MetricsReport cmd_evaluate(const std::filesystem::path& forecast_file, const std::filesystem::path& truth_file,
                           const std::filesystem::path& out_dir);

}  // namespace npbnn
