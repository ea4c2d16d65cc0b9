#include "npbnn/app.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "npbnn/trace.hpp"

namespace npbnn {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kChainLabel = 0xC4A1'0000'0000'0001ULL;
constexpr std::uint64_t kInitLabel = ~std::uint64_t{0};

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string chain_suffix(int chains, int k) { return chains == 1 ? "" : "_chain" + std::to_string(k); }

}  // namespace

RngStream chain_stream(std::uint64_t seed, int index) {
  return RngStream(seed).substream(kChainLabel, static_cast<std::uint64_t>(index));
}

ExperimentData load_experiment_data(const ExperimentConfig& config) {
  ExperimentData d;
  if (config.source == "simulate") {
    RngStream rng(config.data_seed());
    d.series = simulate_logistic(rng, config.simulate.mu, config.simulate.x0, config.simulate.n, config.simulate.noise);
  } else {
    d.series = load_csv(config.csv.path, config.csv.transform);
  }
  if (config.n_train >= d.series.size()) {
    throw std::invalid_argument("n_train (" + std::to_string(config.n_train) + ") must be smaller than the series length (" +
                                std::to_string(d.series.size()) + ")");
  }
  std::tie(d.train, d.test) = split(d.series, config.n_train);
  d.train_lags = embed(d.train, config.rho);
  return d;
}

fs::path cmd_simulate(const ExperimentConfig& config) {
  if (config.source != "simulate") throw std::invalid_argument("simulate: config data.source must be 'simulate'");
  config.simulate.noise.validate();
  RngStream rng(config.data_seed());
  const TimeSeries series =
      simulate_logistic(rng, config.simulate.mu, config.simulate.x0, config.simulate.n, config.simulate.noise);
  fs::create_directories(config.output);
  const fs::path csv = config.output / "series.csv";
  save_csv(csv, series.values, "x");
  nlohmann::ordered_json prov;
  prov["generator"] = "noisy logistic map x_t = 1 - mu x_{t-1}^2 + z_t";
  prov["seed"] = config.data_seed();
  prov["config"] = config_to_json(config);
  write_json(config.output / "series.provenance.json", prov);
  return csv;
}

FitOutput cmd_fit(const ExperimentConfig& config) {
  config.validate();
  const ExperimentData data = load_experiment_data(config);
  const NetSpec spec = config.net_spec();
  const ModelHyper hyper = config.model_hyper();
  const SamplerOptions options = config.sampler_options();
  hyper.validate(spec);
  options.hmc.validate(spec.num_params());

  fs::create_directories(config.output);
  write_json(config.output / "config.json", config_to_json(config));
  save_csv(config.output / "train.csv", data.train.values, data.series.name);
  save_csv(config.output / "test.csv", data.test.values, data.series.name);

  FitOutput out;
  out.traces.resize(static_cast<std::size_t>(config.chains));
  out.summaries.resize(static_cast<std::size_t>(config.chains));
  std::vector<double> wall(static_cast<std::size_t>(config.chains), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.chains));

  auto run_chain = [&](int k) {
    const auto idx = static_cast<std::size_t>(k);
    try {
      const auto start = std::chrono::steady_clock::now();
      const RngStream root = chain_stream(config.seed, k);
      RngStream init_rng = root.substream(kInitLabel);
      ChainState state = init_chain(init_rng, spec, hyper, data.train_lags);
      const std::string suffix = chain_suffix(config.chains, k);
      out.traces[idx] = config.output / ("trace" + suffix + ".jsonl");
      TraceWriter writer(out.traces[idx]);
      TraceOptions trace_options;
      trace_options.store_theta = config.store_theta;
      out.summaries[idx] = run(root, config.protocol, state, data.train_lags, options, hyper, trace_options,
                               [&](const TraceRecord& r) { writer.write(r); });
      writer.close();
      save_csv(config.output / ("noise_draws" + suffix + ".csv"), out.summaries[idx].noise_draws, "noise_draw");
      wall[idx] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  };

  if (config.chains == 1) {
    run_chain(0);
  } else {
    std::vector<std::thread> threads;
    for (int k = 0; k < config.chains; ++k) threads.emplace_back(run_chain, k);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (int k = 0; k < config.chains; ++k) {
    const auto& s = out.summaries[static_cast<std::size_t>(k)];
    nlohmann::ordered_json c;
    c["chain"] = k;
    c["trace"] = out.traces[static_cast<std::size_t>(k)].filename().string();
    c["sweeps"] = s.sweeps;
    c["kept_records"] = s.kept;
    c["acceptance_rate"] = s.acceptance_rate;
    c["acceptance_alarm"] = !(s.acceptance_rate > 0.2 && s.acceptance_rate < 0.995);
    c["nonfinite_trajectories"] = s.nonfinite_trajectories;
    c["mean_active_clusters"] = s.mean_active_clusters;
    c["wall_time_seconds"] = wall[static_cast<std::size_t>(k)];
    summary.push_back(c);
  }
  write_json(config.output / "summary.json", summary);
  return out;
}

ForecastResult cmd_predict(const ExperimentConfig& config, const fs::path& trace) {
  const ExperimentData data = load_experiment_data(config);
  const auto records = read_trace(trace);
  std::vector<Eigen::VectorXd> thetas;
  for (const auto& r : records) {
    if (!r.theta) continue;
    thetas.emplace_back(Eigen::Map<const Eigen::VectorXd>(r.theta->data(), static_cast<Eigen::Index>(r.theta->size())));
  }
  if (thetas.empty()) {
    throw std::runtime_error("no theta samples stored in " + trace.string() + " (fit with --store-theta)");
  }
  const NetSpec spec = config.net_spec();
  for (const auto& t : thetas) {
    if (t.size() != spec.num_params()) throw std::runtime_error("trace theta length does not match the network in the config");
  }
  const std::vector<double> lag_state = tail_lag_state(data.train, config.rho);
  ForecastResult result = forecast(thetas, spec, lag_state, config.horizon);

  fs::create_directories(config.output);
  nlohmann::ordered_json j;
  j["horizon"] = result.horizon;
  j["samples"] = result.per_sample_paths.rows();
  j["mean_path"] = std::vector<double>(result.mean_path.begin(), result.mean_path.end());
  j["mc_std"] = std::vector<double>(result.mc_std.begin(), result.mc_std.end());
  nlohmann::ordered_json paths = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < result.per_sample_paths.rows(); ++i) {
    const Eigen::RowVectorXd row = result.per_sample_paths.row(i);
    paths.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["per_sample_paths"] = std::move(paths);
  write_json(config.output / "forecast.json", j);

  std::ofstream csv(config.output / "forecast.csv");
  csv << "step,mean,mc_std\n";
  for (int h = 0; h < result.horizon; ++h) {
    csv << h + 1 << ',' << format_double(result.mean_path(h)) << ',' << format_double(result.mc_std(h)) << '\n';
  }
  return result;
}

MetricsReport cmd_evaluate(const fs::path& forecast_file, const fs::path& truth_file, const fs::path& out_dir) {
  std::ifstream in(forecast_file);
  if (!in) throw std::runtime_error("cannot open forecast " + forecast_file.string());
  const auto j = nlohmann::json::parse(in);
  const auto predicted = j.at("mean_path").get<std::vector<double>>();
  const TimeSeries truth = load_csv(truth_file);
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("evaluate: forecast has " + std::to_string(predicted.size()) + " values but truth has " +
                                std::to_string(truth.size()));
  }
  const MetricsReport r = metrics(predicted, truth.values);

  fs::create_directories(out_dir);
  std::ofstream txt(out_dir / "metrics.txt");
  txt << "mse = " << format_double(r.mse) << '\n'
      << "rmse = " << format_double(r.rmse) << '\n'
      << "mae = " << format_double(r.mae) << '\n'
      << "mape_percent = " << (r.mape_percent ? format_double(*r.mape_percent) : std::string("undefined")) << '\n'
      << "theil_u = " << format_double(r.theil_u) << '\n';
  nlohmann::ordered_json m;
  m["mse"] = r.mse;
  m["rmse"] = r.rmse;
  m["mae"] = r.mae;
  m["mape_percent"] = r.mape_percent ? nlohmann::ordered_json(*r.mape_percent) : nlohmann::ordered_json(nullptr);
  m["theil_u"] = r.theil_u;
  m["mape_small_denominator_steps"] = r.small_denominators;
  write_json(out_dir / "metrics.json", m);
  return r;
}

}  // namespace npbnn
