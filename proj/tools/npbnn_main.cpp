#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "npbnn/app.hpp"
#include "npbnn/config.hpp"
#include "npbnn/dataio.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required = true) {
  auto* opt = cmd->add_option("--config", f.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  cmd->add_option("--seed", f.seed, "Override the experiment seed (64-bit unsigned)");
  cmd->add_option("--out", f.out, "Override the output directory");
}

npbnn::ExperimentConfig resolve(const CommonFlags& f) {
  npbnn::ExperimentConfig c = npbnn::load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.output = *f.out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autoregressive Bayesian neural network with geometric stick-breaking noise"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Simulate the noisy logistic map series");
  add_common(sim, sim_flags);

  CommonFlags fit_flags;
  int chains = 0;
  std::optional<bool> store_theta;
  auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler and write the trace");
  add_common(fit, fit_flags);
  fit->add_option("--chains", chains, "Number of independent chains")->check(CLI::PositiveNumber);
  fit->add_flag("--store-theta,!--no-store-theta", store_theta, "Store network parameters in the trace");

  CommonFlags pred_flags;
  std::string trace_path;
  auto* pred = app.add_subcommand("predict", "Monte Carlo multi-step forecast from a trace");
  add_common(pred, pred_flags);
  pred->add_option("--trace", trace_path, "Trace file written by fit")->required()->check(CLI::ExistingFile);

  std::string forecast_path, truth_path, eval_out = ".";
  auto* eval = app.add_subcommand("evaluate", "Forecast error metrics against held-out data");
  eval->add_option("--forecast", forecast_path, "forecast.json written by predict")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth_path, "CSV of actual values")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto path = npbnn::cmd_simulate(resolve(sim_flags));
      std::cout << "wrote " << path.string() << '\n';
    } else if (*fit) {
      auto c = resolve(fit_flags);
      if (chains > 0) c.chains = chains;
      if (store_theta) c.store_theta = *store_theta;
      const auto result = npbnn::cmd_fit(c);
      for (std::size_t k = 0; k < result.traces.size(); ++k) {
        const auto& s = result.summaries[k];
        std::cout << result.traces[k].string() << ": " << s.kept << " records, acceptance "
                  << npbnn::format_double(s.acceptance_rate) << ", mean active clusters "
                  << npbnn::format_double(s.mean_active_clusters) << '\n';
        if (!(s.acceptance_rate > 0.2 && s.acceptance_rate < 0.995)) {
          std::cerr << "warning: HMC acceptance rate outside (0.2, 0.995)\n";
        }
      }
    } else if (*pred) {
      const auto c = resolve(pred_flags);
      const auto r = npbnn::cmd_predict(c, trace_path);
      std::cout << "wrote " << (c.output / "forecast.json").string() << " (" << r.per_sample_paths.rows()
                << " samples, horizon " << r.horizon << ")\n";
    } else if (*eval) {
      const auto m = npbnn::cmd_evaluate(forecast_path, truth_path, eval_out);
      std::cout << "mse = " << npbnn::format_double(m.mse) << '\n'
                << "rmse = " << npbnn::format_double(m.rmse) << '\n'
                << "mae = " << npbnn::format_double(m.mae) << '\n'
                << "mape_percent = " << (m.mape_percent ? npbnn::format_double(*m.mape_percent) : "undefined") << '\n'
                << "theil_u = " << npbnn::format_double(m.theil_u) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
