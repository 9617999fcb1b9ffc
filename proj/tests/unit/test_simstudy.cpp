#include <cmath>

#include "autologit/errors.hpp"
#include "autologit/simstudy.hpp"
#include "doctest.h"

using namespace autologit;

TEST_CASE("large-scale mean") {
  const auto m1 = model1_study();
  ModelParams p;
  p.beta = m1.beta;
  const auto x1 = m1.covariates();
  for (int t : {0, 1, 25, 50}) CHECK(large_scale_L(p, x1, t) == doctest::Approx(0.2).epsilon(1e-12));

  const auto m2 = model2_study();
  p.beta = m2.beta;
  const auto x2 = m2.covariates();
  CHECK(large_scale_L(p, x2, 0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::abs(large_scale_L(p, x2, 1) - 0.1) < 0.01);
  CHECK(std::abs(large_scale_L(p, x2, 50) - 0.94) < 0.005);

  p.beta = {0.0};
  CHECK(large_scale_L(p, CovariateSeries::none(4, 1), 1) == 0.5);

  // Spatially varying covariates use the site average.
  CovariateSeries varying(2, 0, 1);
  varying.at(0, 0)[0] = 1.0;
  varying.at(1, 0)[0] = -2.0;
  p.beta = {0.0, 1.0};
  CHECK(large_scale_L(p, varying, 0) == doctest::Approx(0.5 * (logistic(1.0) + logistic(-2.0))));
}

TEST_CASE("conditional scale") {
  ModelParams p;
  p.beta = {-1.4};
  p.rho2 = 0.5;
  const auto x = CovariateSeries::none(4, 1);
  const std::vector<std::uint8_t> ones(4, 1), zeros(4, 0), two{1, 0, 1, 0};
  CHECK(conditional_scale_C(p, x, 1, ones) == doctest::Approx(0.28905049737499605).epsilon(1e-14));
  CHECK(conditional_scale_C(p, x, 1, zeros) == doctest::Approx(large_scale_L(p, x, 1)).epsilon(1e-14));
  CHECK(conditional_scale_C(p, x, 1, two) == doctest::Approx(0.5 * (logistic(-1.4) + logistic(-0.9))).epsilon(1e-14));
  p.rho2 = 0.0;
  CHECK(conditional_scale_C(p, x, 1, ones) == large_scale_L(p, x, 1));
}

TEST_CASE("empirical mean") {
  std::vector<std::uint8_t> s(400, 0);
  CHECK(empirical_mean_D(s) == 0.0);
  for (int k = 0; k < 79; ++k) s[k] = 1;
  CHECK(empirical_mean_D(s) == doctest::Approx(0.1975));
  std::fill(s.begin(), s.end(), 1);
  CHECK(empirical_mean_D(s) == 1.0);
}

TEST_CASE("quantiles interpolate linearly") {
  CHECK(empirical_quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(empirical_quantile({0, 10}, 0.25) == 2.5);
  CHECK(empirical_quantile({7}, 0.975) == 7.0);
}

TEST_CASE("replicate study shapes, bands and determinism") {
  auto cfg = model1_study();
  cfg.shape = {8, 8};
  cfg.horizon = 6;
  cfg.replicates = 5;
  cfg.rho_grid = band_grid();
  const auto a = replicate_study(cfg, RngStream(1));
  CHECK(a.cells.size() == 12);
  for (const auto& c : a.cells) {
    CHECK(c.L.size() == 7);
    CHECK(c.D.size() == 5);
    CHECK(std::isnan(c.C[0][0]));
    for (std::size_t t = 0; t < 7; ++t) {
      CHECK(c.lower[t] <= c.median[t]);
      CHECK(c.median[t] <= c.upper[t]);
      for (const auto& d : c.D) CHECK((d[t] >= 0.0 && d[t] <= 1.0));
    }
  }
  cfg.threads = 3;
  const auto b = replicate_study(cfg, RngStream(1));
  for (std::size_t k = 0; k < a.cells.size(); ++k) CHECK(a.cells[k].D == b.cells[k].D);

  cfg.replicates = 1;
  const auto one = replicate_study(cfg, RngStream(2));
  for (const auto& c : one.cells)
    for (std::size_t t = 0; t < c.L.size(); ++t) {
      CHECK(c.lower[t] == c.D[0][t]);
      CHECK(c.upper[t] == c.D[0][t]);
    }
  CHECK_NOTHROW(one.cell(CenteringVariant::OneStep, 0.7, 0.5));
  CHECK_THROWS_AS(one.cell(CenteringVariant::OneStep, 0.1, 0.5), ConfigError);
}

TEST_CASE("study configuration is validated") {
  auto cfg = model2_study();
  cfg.rho_grid.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = model2_study();
  cfg.beta = {-2.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = model1_study();
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
