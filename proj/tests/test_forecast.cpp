#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "npbnn/forecast.hpp"

using namespace npbnn;

TEST_CASE("iterate_path") {
  const std::vector<double> hist{3.0, 7.0};
  SUBCASE("zero map") {
    CHECK(iterate_path([](std::span<const double>) { return 0.0; }, hist, 4) == std::vector<double>(4, 0.0));
  }
  SUBCASE("most recent value is a fixed point") {
    CHECK(iterate_path([](std::span<const double> x) { return x[0]; }, hist, 4) == std::vector<double>(4, 3.0));
  }
  SUBCASE("logistic map") {
    const std::vector<double> y0{0.0};
    const auto p = iterate_path([](std::span<const double> x) { return 1.0 - 1.71 * x[0] * x[0]; }, y0, 3);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == doctest::Approx(-0.71).epsilon(1e-15));
    CHECK(p[2] == doctest::Approx(1.0 - 1.71 * 0.71 * 0.71).epsilon(1e-14));
    // Long orbit against a plain loop.
    const std::vector<double> x0{0.1};
    const auto long_path = iterate_path([](std::span<const double> x) { return 1.0 - 1.71 * x[0] * x[0]; }, x0, 50);
    double x = 0.1;
    for (double v : long_path) {
      x = 1.0 - 1.71 * x * x;
      CHECK(v == x);
    }
  }
  SUBCASE("lag order with rho = 2") {
    // y_t = y_{t-1} - y_{t-2}; lag state (y_n, y_{n-1}) = (3, 7).
    const auto p = iterate_path([](std::span<const double> x) { return x[0] - x[1]; }, hist, 3);
    CHECK(p == std::vector<double>{-4.0, -7.0, -3.0});
  }
  SUBCASE("errors") {
    CHECK_THROWS(iterate_path([](std::span<const double>) { return 0.0; }, hist, 0));
    CHECK_THROWS(iterate_path([](std::span<const double>) { return 0.0; }, std::vector<double>{}, 2));
  }
}

TEST_CASE("forecast") {
  const NetSpec spec{{1, 2, 1}};
  auto constant_net = [&](double c) {
    Eigen::VectorXd flat = Eigen::VectorXd::Zero(spec.num_params());
    flat(spec.num_params() - 1) = c;  // output bias
    return flat;
  };
  const std::vector<double> lag{0.4};
  SUBCASE("single sample") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    Eigen::VectorXd theta(spec.num_params());
    for (auto& v : theta) v = nd(gen);
    const std::vector<Eigen::VectorXd> one{theta};
    const auto r = forecast(one, spec, lag, 5);
    const NetParams p(spec, theta);
    const auto path = iterate_path([&](std::span<const double> x) { return forward(p, x); }, lag, 5);
    for (int j = 0; j < 5; ++j) CHECK(r.mean_path(j) == path[static_cast<std::size_t>(j)]);
    CHECK(r.mc_std.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("two constant samples average") {
    const std::vector<Eigen::VectorXd> two{constant_net(1.0), constant_net(3.0)};
    const auto r = forecast(two, spec, lag, 4);
    CHECK(r.horizon == 4);
    CHECK(r.per_sample_paths.rows() == 2);
    for (int j = 0; j < 4; ++j) {
      CHECK(r.mean_path(j) == 2.0);
      CHECK(r.mc_std(j) == doctest::Approx(std::sqrt(2.0)));
    }
  }
  SUBCASE("errors") {
    const std::vector<Eigen::VectorXd> none;
    CHECK_THROWS_WITH(forecast(none, spec, lag, 3), "no theta samples stored");
    const std::vector<Eigen::VectorXd> one{constant_net(1.0)};
    CHECK_THROWS(forecast(one, spec, std::vector<double>{0.1, 0.2}, 3));
  }
}

TEST_CASE("metrics") {
  SUBCASE("perfect prediction") {
    const std::vector<double> y{1, 2, 3};
    const auto m = metrics(y, y);
    CHECK(m.mse == 0.0);
    CHECK(m.rmse == 0.0);
    CHECK(m.mae == 0.0);
    CHECK(*m.mape_percent == 0.0);
    CHECK(m.theil_u == 0.0);
  }
  SUBCASE("one point by hand") {
    const auto m = metrics(std::vector<double>{2.0}, std::vector<double>{1.0});
    CHECK(m.mse == 1.0);
    CHECK(m.rmse == 1.0);
    CHECK(m.mae == 1.0);
    CHECK(*m.mape_percent == doctest::Approx(100.0));
    CHECK(m.theil_u == doctest::Approx(1.0 / 3.0));
    const auto five = metrics(std::vector<double>{1.05}, std::vector<double>{1.0});
    CHECK(*five.mape_percent == doctest::Approx(5.0));
  }
  SUBCASE("zero actual value leaves MAPE undefined") {
    const auto m = metrics(std::vector<double>{0.5, 1.0}, std::vector<double>{0.0, 1.0});
    CHECK_FALSE(m.mape_percent.has_value());
    CHECK(m.mse == doctest::Approx(0.125));
    CHECK(std::find(m.small_denominators.begin(), m.small_denominators.end(), 0u) != m.small_denominators.end());
  }
  SUBCASE("properties on random inputs") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> nd;
    for (int it = 0; it < 200; ++it) {
      std::vector<double> p(7), a(7);
      for (auto& v : p) v = nd(gen);
      for (auto& v : a) v = nd(gen);
      const auto m = metrics(p, a);
      CHECK(m.rmse * m.rmse == doctest::Approx(m.mse).epsilon(1e-15));
      CHECK(m.theil_u >= 0.0);
      CHECK(m.theil_u <= 1.0);
      std::vector<std::size_t> idx{6, 2, 4, 0, 1, 5, 3};
      std::vector<double> pp, aa;
      for (auto i : idx) pp.push_back(p[i]), aa.push_back(a[i]);
      const auto q = metrics(pp, aa);
      CHECK(q.mse == doctest::Approx(m.mse).epsilon(1e-14));
      CHECK(q.mae == doctest::Approx(m.mae).epsilon(1e-14));
      CHECK(*q.mape_percent == doctest::Approx(*m.mape_percent).epsilon(1e-14));
      CHECK(q.theil_u == doctest::Approx(m.theil_u).epsilon(1e-14));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS(metrics(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}));
    CHECK_THROWS(metrics(std::vector<double>{}, std::vector<double>{}));
    CHECK_THROWS(metrics(std::vector<double>{0.0}, std::vector<double>{0.0}));
  }
}
