#include "autologit/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "autologit/errors.hpp"
#include "autologit/parallel.hpp"

namespace autologit {

double large_scale_L(const ModelParams& params, const CovariateSeries& x, int t) {
  if (t < 0 || t > x.horizon()) throw DataError("covariates missing at t=" + std::to_string(t));
  if (x.num_sites() == 0) throw DataError("empty lattice");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.num_sites(); ++i) sum += logistic(params.linear_predictor(x.at(i, t)));
  return sum / static_cast<double>(x.num_sites());
}

double conditional_scale_C(const ModelParams& params, const CovariateSeries& x, int t,
                           std::span<const std::uint8_t> z_prev) {
  if (z_prev.size() != x.num_sites()) throw DataError("previous slice does not match the covariates");
  double sum = 0.0;
  for (std::size_t i = 0; i < z_prev.size(); ++i)
    sum += logistic(params.linear_predictor(x.at(i, t)) + params.rho2 * z_prev[i]);
  return sum / static_cast<double>(z_prev.size());
}

double empirical_mean_D(std::span<const std::uint8_t> slice) {
  if (slice.empty()) throw DataError("empty slice");
  std::size_t ones = 0;
  for (auto v : slice) ones += v;
  return static_cast<double>(ones) / static_cast<double>(slice.size());
}

void StudyConfig::validate() const {
  shape.validate();
  if (horizon < 1) throw ConfigError("study horizon must be >= 1");
  if (replicates < 1) throw ConfigError("study needs at least one replicate");
  if (rho_grid.empty()) throw ConfigError("study grid is empty");
  if (variants.empty()) throw ConfigError("study needs at least one centering variant");
  if (!(initial_p >= 0.0 && initial_p <= 1.0)) throw ConfigError("initial probability must lie in [0,1]");
  const std::size_t expected = covariate == TemporalCovariate::None ? 1 : 2;
  if (beta.size() != expected) throw ConfigError("beta length does not match the covariate choice");
  sampler.validate();
}

CovariateSeries StudyConfig::covariates() const {
  if (covariate == TemporalCovariate::None) return CovariateSeries::none(shape.size(), horizon);
  std::vector<std::vector<double>> per_time;
  for (int t = 0; t <= horizon; ++t) {
    double v = t;
    if (covariate == TemporalCovariate::Tent) v = t <= 8 ? t : 16 - t;
    per_time.push_back({v});
  }
  return CovariateSeries::temporal(shape.size(), per_time, {"x"});
}

std::vector<std::pair<double, double>> trajectory_grid() {
  std::vector<std::pair<double, double>> grid;
  for (double a : {0.3, 0.5, 0.7})
    for (double b : {0.3, 0.5, 0.7}) grid.emplace_back(a, b);
  return grid;
}

std::vector<std::pair<double, double>> band_grid() {
  std::vector<std::pair<double, double>> grid;
  for (double a : {0.5, 0.7})
    for (double b : {0.5, 0.7}) grid.emplace_back(a, b);
  return grid;
}

StudyConfig model1_study() {
  StudyConfig c;
  c.model_id = "model1";
  c.beta = {std::log(0.2 / 0.8)};
  c.initial_p = 0.2;
  c.rho_grid = trajectory_grid();
  return c;
}

StudyConfig model2_study() {
  StudyConfig c;
  c.model_id = "model2";
  c.beta = {std::log(0.1 / 0.9), 0.1};
  c.covariate = TemporalCovariate::Linear;
  c.initial_p = 0.1;
  c.rho_grid = trajectory_grid();
  return c;
}

double StudyCell::time_averaged_D(std::size_t replicate, int from_t) const {
  const auto& d = D.at(replicate);
  double sum = 0.0;
  for (std::size_t t = static_cast<std::size_t>(from_t); t < d.size(); ++t) sum += d[t];
  return sum / static_cast<double>(d.size() - static_cast<std::size_t>(from_t));
}

const StudyCell& StudySeries::cell(CenteringVariant v, double rho1, double rho2) const {
  for (const auto& c : cells)
    if (c.variant == v && std::abs(c.rho1 - rho1) < 1e-12 && std::abs(c.rho2 - rho2) < 1e-12) return c;
  throw ConfigError("study has no cell for the requested variant and (rho1, rho2)");
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

StudySeries replicate_study(const StudyConfig& config, const RngStream& rng) {
  config.validate();
  const auto graph = build_neighbor_graph(config.shape, config.neighborhood);
  const auto x = config.covariates();
  SamplerConfig sampler = config.sampler;
  sampler.initial = BernoulliInit{config.initial_p};

  StudySeries series;
  series.config = config;
  for (auto v : config.variants)
    for (const auto& [r1, r2] : config.rho_grid) {
      StudyCell cell;
      cell.variant = v;
      cell.rho1 = r1;
      cell.rho2 = r2;
      series.cells.push_back(std::move(cell));
    }

  const auto B = static_cast<std::size_t>(config.replicates);
  const std::size_t T = static_cast<std::size_t>(config.horizon);
  for (auto& cell : series.cells) {
    cell.C.assign(B, std::vector<double>(T + 1));
    cell.D.assign(B, std::vector<double>(T + 1));
  }

  std::vector<std::string> errors(series.cells.size() * B);
  parallel_for(series.cells.size() * B, config.threads, [&](std::size_t job) {
    const std::size_t c = job / B;
    const std::size_t b = job % B;
    auto& cell = series.cells[c];
    ModelParams params;
    params.beta = config.beta;
    params.rho1 = cell.rho1;
    params.rho2 = cell.rho2;
    params.variant = cell.variant;
    try {
      const auto z = simulate_trajectory(config.horizon, x, params, graph, sampler, rng.split(c).split(b));
      cell.C[b][0] = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t t = 0; t <= T; ++t) {
        cell.D[b][t] = empirical_mean_D(z.slice(static_cast<int>(t)));
        if (t > 0) cell.C[b][t] = conditional_scale_C(params, x, static_cast<int>(t), z.slice(static_cast<int>(t) - 1));
      }
    } catch (const Error& e) {
      throw NumericalError("study cell " + to_string(cell.variant) + " rho1=" + std::to_string(cell.rho1) +
                           " rho2=" + std::to_string(cell.rho2) + " replicate " + std::to_string(b) + ": " + e.what());
    }
  });

  for (auto& cell : series.cells) {
    ModelParams params;
    params.beta = config.beta;
    cell.L.resize(T + 1);
    cell.lower.resize(T + 1);
    cell.median.resize(T + 1);
    cell.upper.resize(T + 1);
    for (std::size_t t = 0; t <= T; ++t) {
      cell.L[t] = large_scale_L(params, x, static_cast<int>(t));
      std::vector<double> column(B);
      for (std::size_t b = 0; b < B; ++b) column[b] = cell.D[b][t];
      cell.lower[t] = empirical_quantile(column, 0.025);
      cell.median[t] = empirical_quantile(column, 0.5);
      cell.upper[t] = empirical_quantile(std::move(column), 0.975);
    }
  }
  return series;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  return out;
}

}  // namespace

void write_study_csv(const std::filesystem::path& path, const StudySeries& series) {
  auto out = open_output(path);
  out << "variant,rho1,rho2,replicate,t,L,C,D\n";
  for (const auto& cell : series.cells)
    for (std::size_t b = 0; b < cell.D.size(); ++b)
      for (std::size_t t = 0; t < cell.L.size(); ++t) {
        out << to_string(cell.variant) << ',' << cell.rho1 << ',' << cell.rho2 << ',' << b << ',' << t << ','
            << cell.L[t] << ',';
        if (t > 0) out << cell.C[b][t];
        out << ',' << cell.D[b][t] << '\n';
      }
}

void write_band_csv(const std::filesystem::path& path, const StudySeries& series) {
  auto out = open_output(path);
  out << "variant,rho1,rho2,t,L,D_lower,D_median,D_upper\n";
  for (const auto& cell : series.cells)
    for (std::size_t t = 0; t < cell.L.size(); ++t)
      out << to_string(cell.variant) << ',' << cell.rho1 << ',' << cell.rho2 << ',' << t << ',' << cell.L[t] << ','
          << cell.lower[t] << ',' << cell.median[t] << ',' << cell.upper[t] << '\n';
}

}  // namespace autologit
