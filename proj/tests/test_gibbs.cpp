#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "npbnn/gibbs.hpp"
#include "npbnn/trace.hpp"
#include "support/stats.hpp"

using namespace npbnn;
namespace t = npbnn::testing;

namespace {

LagDataset toy_data(int n, std::uint64_t seed = 1) {
  RngStream rng(seed);
  TimeSeries s = simulate_logistic(rng, 1.71, 0.1, n + 1, NoiseMixtureSpec{{0.5, 0.5}, {0.05, 0.001}});
  return embed(s, 1);
}

struct Toy {
  NetSpec spec{{1, 3, 1}};
  ModelHyper hyper = ModelHyper::uniform_tau(GsbHyper{1, 1, 3, 0.5}, {5, 5}, NetSpec{{1, 3, 1}});
  SamplerOptions options{HmcConfig{0.02, 5, {}}, NoiseModel::Nonparametric, LabelRule::SliceUniform};
};

}  // namespace

TEST_CASE("RunProtocol arithmetic") {
  CHECK(RunProtocol{40000, 2000, 50}.kept_count() == 760);
  CHECK(RunProtocol{10, 0, 1}.kept_count() == 10);
  CHECK(RunProtocol{100, 50, 25}.kept_count() == 2);
  CHECK(RunProtocol{200, 100, 10}.kept_count() == 10);
  const RunProtocol p{40000, 2000, 50};
  CHECK_FALSE(p.is_kept(2000));
  CHECK(p.is_kept(2050));
  CHECK_FALSE(p.is_kept(2051));
  CHECK(p.is_kept(40000));
  int counted = 0;
  for (int s = 1; s <= 40000; ++s) counted += p.is_kept(s);
  CHECK(counted == 760);
  CHECK_THROWS(RunProtocol{10, 10, 1}.validate());
  CHECK_THROWS(RunProtocol{10, 0, 0}.validate());
}

TEST_CASE("sample_tau") {
  const NetSpec spec{{1, 1, 1}};
  std::vector<RowMatrix> W{RowMatrix::Constant(1, 1, 1.0), RowMatrix::Constant(1, 1, 0.0)};
  std::vector<Eigen::VectorXd> b{Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 0.0)};
  const NetParams net = NetParams::from_layers(spec, W, b);
  const std::vector<GammaPrior> priors(4, GammaPrior{5.0, 5.0});
  RngStream rng(3);
  std::vector<std::vector<double>> draws(4);
  for (int i = 0; i < 100000; ++i) {
    const auto tau = sample_tau(rng, net, priors);
    for (int g = 0; g < 4; ++g) draws[static_cast<std::size_t>(g)].push_back(tau.tau[static_cast<std::size_t>(g)]);
  }
  // Groups of one element each: Ga(5.5, 5.5), Ga(5.5, 5.5), Ga(5.5, 5), Ga(5.5, 5).
  const double rates[] = {5.5, 5.5, 5.0, 5.0};
  for (int g = 0; g < 4; ++g) {
    const double m = 5.5 / rates[g], sd = std::sqrt(5.5) / rates[g];
    CHECK(std::abs(t::mean(draws[static_cast<std::size_t>(g)]) - m) < 3 * sd / std::sqrt(1e5));
  }
  SUBCASE("two-element groups") {
    const NetSpec wide{{2, 1, 1}};
    std::vector<RowMatrix> W2{RowMatrix::Zero(1, 2), RowMatrix::Zero(1, 1)};
    std::vector<Eigen::VectorXd> b2{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
    NetParams zero = NetParams::from_layers(wide, W2, b2);
    std::vector<double> x;
    for (int i = 0; i < 100000; ++i) x.push_back(sample_tau(rng, zero, priors).tau[0]);
    CHECK(std::abs(t::mean(x) - 1.2) < 0.02);  // Ga(6, 5)
    W2[0] << 1.0, -1.0;
    zero = NetParams::from_layers(wide, W2, b2);
    x.clear();
    for (int i = 0; i < 100000; ++i) x.push_back(sample_tau(rng, zero, priors).tau[0]);
    CHECK(std::abs(t::mean(x) - 1.0) < 0.02);  // Ga(6, 6)
  }
  CHECK_THROWS(sample_tau(rng, net, std::vector<GammaPrior>(3)));
}

TEST_CASE("init_chain") {
  Toy toy;
  const LagDataset data = toy_data(30);
  RngStream a(1), b(1);
  const ChainState s1 = init_chain(a, toy.spec, toy.hyper, data);
  const ChainState s2 = init_chain(b, toy.spec, toy.hyper, data);
  CHECK(s1.net.flat() == s2.net.flat());
  CHECK(s1.precisions.tau == s2.precisions.tau);
  CHECK(s1.mixture.phi == s2.mixture.phi);
  CHECK_NOTHROW(s1.mixture.check_invariants());
  CHECK(s1.mixture.active_clusters() == 1);
  CHECK(s1.mixture.r_star == 1);
  CHECK((s1.residuals - (data.targets - forward_batch(s1.net, data.inputs))).norm() == 0.0);

  SUBCASE("initial tau has the hyperprior mean") {
    std::vector<double> tau;
    RngStream rng(2);
    for (int i = 0; i < 10000; ++i) {
      tau.push_back(init_chain(rng, toy.spec, toy.hyper, data).precisions.tau[0]);
    }
    CHECK(std::abs(t::mean(tau) - 1.0) < 3 * std::sqrt(0.2 / 1e4));
  }
  SUBCASE("errors") {
    RngStream rng(3);
    CHECK_THROWS(init_chain(rng, NetSpec{{2, 3, 1}}, ModelHyper::uniform_tau(toy.hyper.gsb, {5, 5}, NetSpec{{2, 3, 1}}), data));
    LagDataset empty;
    empty.rho = 1;
    empty.inputs.resize(0, 1);
    CHECK_THROWS(init_chain(rng, toy.spec, toy.hyper, empty));
  }
}

TEST_CASE("sweep") {
  Toy toy;
  SUBCASE("smallest instance keeps invariants") {
    LagDataset one = toy_data(1);
    RngStream init(4);
    ChainState s = init_chain(init, toy.spec, toy.hyper, one);
    s.mixture.phi = 0.999;
    const RngStream root(5);
    for (int i = 0; i < 50; ++i) {
      sweep(root, s, one, toy.options, toy.hyper);
      REQUIRE_NOTHROW(s.mixture.check_invariants());
      REQUIRE(static_cast<int>(s.mixture.atoms.size()) == s.mixture.r_star);
    }
    CHECK(s.sweep_index == 50);
  }
  SUBCASE("bit-identical after 10 sweeps, residual cache consistent") {
    const LagDataset data = toy_data(40);
    auto go = [&]() {
      RngStream init(6);
      ChainState s = init_chain(init, toy.spec, toy.hyper, data);
      const RngStream root(7);
      for (int i = 0; i < 10; ++i) sweep(root, s, data, toy.options, toy.hyper);
      return s;
    };
    const ChainState a = go(), b = go();
    CHECK(a.net.flat() == b.net.flat());
    CHECK(a.mixture.atoms == b.mixture.atoms);
    CHECK(a.mixture.labels == b.mixture.labels);
    CHECK(a.mixture.phi == b.mixture.phi);
    CHECK(a.noise_draw == b.noise_draw);
    CHECK((a.residuals - (data.targets - forward_batch(a.net, data.inputs))).norm() == 0.0);
  }
  SUBCASE("gaussian mode keeps a single cluster") {
    const LagDataset data = toy_data(40);
    SamplerOptions opt = toy.options;
    opt.noise_model = NoiseModel::Gaussian;
    RngStream init(8);
    ChainState s = init_chain(init, toy.spec, toy.hyper, data);
    const RngStream root(9);
    for (int i = 0; i < 100; ++i) {
      sweep(root, s, data, opt, toy.hyper);
      REQUIRE(s.mixture.active_clusters() == 1);
      REQUIRE(s.mixture.atoms.size() == 1);
    }
  }
}

TEST_CASE("run") {
  Toy toy;
  const LagDataset data = toy_data(20);
  SUBCASE("kept sweeps and record contents") {
    RngStream init(10);
    ChainState s = init_chain(init, toy.spec, toy.hyper, data);
    TraceOptions to;
    to.store_theta = true;
    to.forecast_horizon = 3;
    to.forecast_lag_state = {0.2};
    const auto r = run(RngStream(11), RunProtocol{100, 50, 25}, s, data, toy.options, toy.hyper, to);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].sweep == 75);
    CHECK(r.records[1].sweep == 100);
    CHECK(r.records[1].theta->size() == static_cast<std::size_t>(toy.spec.num_params()));
    CHECK(r.records[1].forecasts->size() == 3);
    CHECK(r.records[1].noise_draw == s.noise_draw);
    CHECK(r.summary.sweeps == 100);
    CHECK(r.summary.kept == 2);
    CHECK(r.summary.noise_draws.size() == 2);
    CHECK(r.summary.acceptance_rate == doctest::Approx(r.summary.accepted / 100.0));
  }
  SUBCASE("every sweep kept") {
    RngStream init(12);
    ChainState s = init_chain(init, toy.spec, toy.hyper, data);
    const auto r = run(RngStream(13), RunProtocol{10, 0, 1}, s, data, toy.options, toy.hyper);
    CHECK(r.records.size() == 10);
    CHECK_FALSE(r.records[0].theta.has_value());
  }
  SUBCASE("lag state must match the network") {
    RngStream init(14);
    ChainState s = init_chain(init, toy.spec, toy.hyper, data);
    TraceOptions to;
    to.forecast_horizon = 2;
    to.forecast_lag_state = {0.1, 0.2};
    CHECK_THROWS(run(RngStream(15), RunProtocol{10, 0, 1}, s, data, toy.options, toy.hyper, to));
  }
}

TEST_CASE("trace lines round-trip") {
  TraceRecord r;
  r.sweep = 2050;
  r.phi = 0.1 + 0.2;
  r.active_clusters = 7;
  r.noise_draw = -1.0 / 3.0;
  const std::string plain = trace_line(r);
  CHECK(plain.find("theta") == std::string::npos);
  CHECK(plain.rfind("{\"sweep\":2050,\"phi\":", 0) == 0);
  TraceRecord back = parse_trace_line(plain);
  CHECK(back.phi == r.phi);
  CHECK(back.noise_draw == r.noise_draw);
  CHECK_FALSE(back.theta.has_value());

  r.theta = std::vector<double>{1e-300, -2.5, 0.1};
  r.forecasts = std::vector<double>{3.14159265358979};
  back = parse_trace_line(trace_line(r));
  CHECK(back.theta == r.theta);
  CHECK(back.forecasts == r.forecasts);

  const auto path = std::filesystem::temp_directory_path() / "npbnn_test_trace.jsonl";
  {
    TraceWriter w(path, 2);
    for (int i = 0; i < 5; ++i) {
      r.sweep = static_cast<std::uint64_t>(i);
      w.write(r);
    }
  }
  const auto all = read_trace(path);
  REQUIRE(all.size() == 5);
  CHECK(all[4].sweep == 4);
  {
    std::ofstream out(path, std::ios::app);
    out << "{not json\n";
  }
  CHECK_THROWS_WITH(read_trace(path), doctest::Contains(":6:"));
}
