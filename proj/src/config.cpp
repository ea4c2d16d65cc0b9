#include "npbnn/config.hpp"

#include <fstream>
#include <stdexcept>

namespace npbnn {

namespace {

using nlohmann::json;

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string noise_model_name(NoiseModel m) { return m == NoiseModel::Gaussian ? "gaussian" : "nonparametric"; }

NoiseModel parse_noise_model(const std::string& s) {
  if (s == "nonparametric") return NoiseModel::Nonparametric;
  if (s == "gaussian") return NoiseModel::Gaussian;
  throw std::invalid_argument("noise_model: expected 'nonparametric' or 'gaussian', got '" + s + "'");
}

std::string label_rule_name(LabelRule r) { return r == LabelRule::StickWeighted ? "stick_weighted" : "slice_uniform"; }

LabelRule parse_label_rule(const std::string& s) {
  if (s == "slice_uniform") return LabelRule::SliceUniform;
  if (s == "stick_weighted") return LabelRule::StickWeighted;
  throw std::invalid_argument("label_rule: expected 'slice_uniform' or 'stick_weighted', got '" + s + "'");
}

}  // namespace

NetSpec ExperimentConfig::net_spec() const {
  NetSpec spec;
  spec.layer_sizes.push_back(rho);
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden_layers.begin(), hidden_layers.end());
  spec.layer_sizes.push_back(1);
  return spec;
}

ModelHyper ExperimentConfig::model_hyper() const { return ModelHyper::uniform_tau(gsb, tau_prior, net_spec()); }

SamplerOptions ExperimentConfig::sampler_options() const { return {hmc, noise_model, label_rule}; }

void ExperimentConfig::validate() const {
  if (source != "simulate" && source != "csv") throw std::invalid_argument("data.source: expected 'simulate' or 'csv'");
  if (source == "simulate") {
    simulate.noise.validate();
    if (simulate.n < 1) throw std::invalid_argument("data.simulate.n must be >= 1");
  } else if (csv.path.empty()) {
    throw std::invalid_argument("data.csv.path is required for a csv source");
  }
  if (rho < 1) throw std::invalid_argument("rho must be >= 1");
  if (n_train <= static_cast<std::size_t>(rho)) throw std::invalid_argument("n_train must exceed rho");
  if (source == "simulate" && n_train >= static_cast<std::size_t>(simulate.n)) {
    throw std::invalid_argument("n_train must be smaller than the series length");
  }
  net_spec().validate();
  gsb.validate();
  if (!(tau_prior.shape > 0.0 && tau_prior.rate > 0.0)) throw std::invalid_argument("tau: alpha and beta must be positive");
  hmc.validate(hmc.mass.size() == 0 ? 0 : net_spec().num_params());
  protocol.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (chains < 1) throw std::invalid_argument("chains must be >= 1");
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  read_opt(j, "seed", c.seed);
  if (j.contains("data")) {
    const json& d = j.at("data");
    read_opt(d, "source", c.source);
    if (d.contains("simulate")) {
      const json& s = d.at("simulate");
      read_opt(s, "mu", c.simulate.mu);
      read_opt(s, "x0", c.simulate.x0);
      read_opt(s, "n", c.simulate.n);
      if (s.contains("seed")) c.simulate.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("noise")) {
        c.simulate.noise.weights = s.at("noise").at("weights").get<std::vector<double>>();
        c.simulate.noise.std_devs = s.at("noise").at("std_devs").get<std::vector<double>>();
      }
    }
    if (d.contains("csv")) {
      const json& s = d.at("csv");
      std::filesystem::path p = s.at("path").get<std::string>();
      c.csv.path = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
      if (s.contains("transform")) c.csv.transform = parse_transform(s.at("transform").get<std::string>());
    }
  }
  read_opt(j, "rho", c.rho);
  read_opt(j, "n_train", c.n_train);
  if (j.contains("network")) read_opt(j.at("network"), "hidden", c.hidden_layers);
  if (j.contains("gsb")) {
    const json& g = j.at("gsb");
    read_opt(g, "a_phi", c.gsb.a_phi);
    read_opt(g, "b_phi", c.gsb.b_phi);
    read_opt(g, "a_lambda", c.gsb.a_lambda);
    read_opt(g, "b_lambda", c.gsb.b_lambda);
  }
  if (j.contains("tau")) {
    read_opt(j.at("tau"), "alpha", c.tau_prior.shape);
    read_opt(j.at("tau"), "beta", c.tau_prior.rate);
  }
  if (j.contains("hmc")) {
    const json& h = j.at("hmc");
    read_opt(h, "epsilon", c.hmc.epsilon);
    read_opt(h, "steps", c.hmc.steps);
    if (h.contains("mass")) {
      const auto m = h.at("mass").get<std::vector<double>>();
      c.hmc.mass = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
    }
  }
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    read_opt(p, "total_sweeps", c.protocol.total_sweeps);
    read_opt(p, "burn_in", c.protocol.burn_in);
    read_opt(p, "thin", c.protocol.thin);
  }
  if (j.contains("noise_model")) c.noise_model = parse_noise_model(j.at("noise_model").get<std::string>());
  if (j.contains("label_rule")) c.label_rule = parse_label_rule(j.at("label_rule").get<std::string>());
  read_opt(j, "horizon", c.horizon);
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  if (j.contains("trace")) read_opt(j.at("trace"), "store_theta", c.store_theta);
  read_opt(j, "deterministic", c.deterministic);
  read_opt(j, "chains", c.chains);
  return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["data"]["source"] = c.source;
  if (c.source == "simulate") {
    auto& s = j["data"]["simulate"];
    s["mu"] = c.simulate.mu;
    s["x0"] = c.simulate.x0;
    s["n"] = c.simulate.n;
    s["noise"]["weights"] = c.simulate.noise.weights;
    s["noise"]["std_devs"] = c.simulate.noise.std_devs;
    s["seed"] = c.data_seed();
  } else {
    j["data"]["csv"]["path"] = c.csv.path.string();
    j["data"]["csv"]["transform"] = to_string(c.csv.transform);
  }
  j["rho"] = c.rho;
  j["n_train"] = c.n_train;
  j["network"]["hidden"] = c.hidden_layers;
  j["gsb"] = {{"a_phi", c.gsb.a_phi}, {"b_phi", c.gsb.b_phi}, {"a_lambda", c.gsb.a_lambda}, {"b_lambda", c.gsb.b_lambda}};
  j["tau"] = {{"alpha", c.tau_prior.shape}, {"beta", c.tau_prior.rate}};
  j["hmc"]["epsilon"] = c.hmc.epsilon;
  j["hmc"]["steps"] = c.hmc.steps;
  j["hmc"]["mass"] = std::vector<double>(c.hmc.mass.begin(), c.hmc.mass.end());
  j["protocol"] = {{"total_sweeps", c.protocol.total_sweeps}, {"burn_in", c.protocol.burn_in}, {"thin", c.protocol.thin}};
  j["noise_model"] = noise_model_name(c.noise_model);
  j["label_rule"] = label_rule_name(c.label_rule);
  j["horizon"] = c.horizon;
  j["output"] = c.output.string();
  j["trace"]["store_theta"] = c.store_theta;
  j["deterministic"] = c.deterministic;
  j["chains"] = c.chains;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace npbnn
