#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "npbnn/dataio.hpp"
#include "npbnn/gibbs.hpp"

namespace npbnn {

struct SimulateSource {
  double mu = 1.71;
  double x0 = 0.1;
  int n = 210;
  NoiseMixtureSpec noise{{1.0 / 3.0, 2.0 / 3.0}, {0.04, 1e-4}};
  /// Seed of the simulated series; defaults to the experiment seed.
  std::optional<std::uint64_t> seed;
};

struct CsvSource {
  std::filesystem::path path;
  Transform transform = Transform::None;
};

/// Everything one experiment needs. Read from a JSON file with nested
/// sections (see configs/); command-line flags override single fields.
struct ExperimentConfig {
  std::string source = "simulate";  // "simulate" | "csv"
  SimulateSource simulate;
  CsvSource csv;

  int rho = 1;
  std::size_t n_train = 200;
  std::vector<int> hidden_layers{10};

  GsbHyper gsb;
  GammaPrior tau_prior{5.0, 5.0};
  HmcConfig hmc;
  RunProtocol protocol;
  NoiseModel noise_model = NoiseModel::Nonparametric;
  LabelRule label_rule = LabelRule::SliceUniform;

  std::uint64_t seed = 1;
  int horizon = 10;
  std::filesystem::path output = "out";
  bool store_theta = true;
  bool deterministic = true;
  int chains = 1;

  NetSpec net_spec() const;
  ModelHyper model_hyper() const;
  SamplerOptions sampler_options() const;
  std::uint64_t data_seed() const { return simulate.seed.value_or(seed); }

  /// Cross-field checks; throws std::invalid_argument naming the field.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace npbnn
