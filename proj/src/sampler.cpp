#include "autologit/sampler.hpp"

#include <algorithm>
#include <string>

#include "autologit/errors.hpp"

namespace autologit {

std::string to_string(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::PerfectCFTP: return "cftp";
    case SamplerMode::PGS: return "pgs";
    case SamplerMode::PlainGibbs: return "gibbs";
  }
  return "unknown";
}

SamplerMode parse_sampler_mode(const std::string& name) {
  if (name == "cftp" || name == "perfect") return SamplerMode::PerfectCFTP;
  if (name == "pgs") return SamplerMode::PGS;
  if (name == "gibbs") return SamplerMode::PlainGibbs;
  throw ConfigError("unknown sampler mode '" + name + "'");
}

void SamplerConfig::validate() const {
  if (gibbs_sweeps < 1) throw ConfigError("gibbs_sweeps must be >= 1");
  if (cftp_start_sweeps < 1 || cftp_max_sweeps < cftp_start_sweeps) throw ConfigError("invalid CFTP look-back range");
  if (const auto* b = std::get_if<BernoulliInit>(&initial)) {
    if (!(b->p0 >= 0.0 && b->p0 <= 1.0)) throw ConfigError("Bernoulli initial probability must lie in [0,1]");
  }
}

namespace {

inline bool draw_site(std::span<const std::uint8_t> slice, const SliceField& field, const NeighborGraph& graph,
                      std::size_t i, double u) {
  int sum = 0;
  for (auto j : graph.neighbors(i)) sum += slice[j];
  return u < logistic(field.field[i] + field.coupling * sum);
}

// Both chains updated with the same uniforms, site by site.
void coupled_sweep(std::vector<std::uint8_t>& lower, std::vector<std::uint8_t>& upper, const SliceField& field,
                   const NeighborGraph& graph, RngStream rng) {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const double u = rng.uniform();
    lower[i] = draw_site(lower, field, graph, i, u);
    upper[i] = draw_site(upper, field, graph, i, u);
  }
}

}  // namespace

void gibbs_sweep(std::span<std::uint8_t> slice, const SliceField& field, const NeighborGraph& graph,
                 RngStream& rng) {
  for (std::size_t i = 0; i < slice.size(); ++i) slice[i] = draw_site(slice, field, graph, i, rng.uniform());
}

void gibbs_sweep(std::span<std::uint8_t> slice, std::span<const std::uint8_t> z_prev, const CovariateSeries& x,
                 int t, const ModelParams& params, const NeighborGraph& graph, RngStream& rng) {
  if (slice.size() != graph.num_sites()) throw DataError("slice length does not match the lattice");
  gibbs_sweep(slice, slice_field(z_prev, x, t, params, graph), graph, rng);
}

namespace {

std::vector<std::uint8_t> cftp_with_field(const SliceField& field, const NeighborGraph& graph, const RngStream& rng,
                                          const SamplerConfig& config, SamplerStats* stats) {
  if (field.coupling < 0.0)
    throw CftpUnsupported("monotone CFTP needs rho1 >= 0 (got " + std::to_string(field.coupling) +
                          "); use plain Gibbs sampling");
  const std::size_t n = graph.num_sites();
  std::vector<std::uint8_t> lower(n), upper(n);
  for (std::uint64_t lookback = config.cftp_start_sweeps;; lookback *= 2) {
    std::fill(lower.begin(), lower.end(), 0);
    std::fill(upper.begin(), upper.end(), 1);
    for (std::uint64_t s = lookback; s >= 1; --s) {
      coupled_sweep(lower, upper, field, graph, rng.split(s));
    }
    for (std::size_t i = 0; i < n; ++i)
      if (lower[i] > upper[i]) throw NumericalError("monotone coupling violated during CFTP");
    if (lower == upper) {
      if (stats) {
        ++stats->cftp_calls;
        stats->cftp_total_sweeps += lookback;
        stats->cftp_max_lookback = std::max(stats->cftp_max_lookback, lookback);
      }
      return lower;
    }
    if (lookback >= config.cftp_max_sweeps)
      throw NumericalError("CFTP did not coalesce within " + std::to_string(config.cftp_max_sweeps) + " sweeps");
  }
}

}  // namespace

std::vector<std::uint8_t> cftp_slice_sample(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                                            const ModelParams& params, const NeighborGraph& graph,
                                            const RngStream& rng, const SamplerConfig& config,
                                            SamplerStats* stats) {
  config.validate();
  return cftp_with_field(slice_field(z_prev, x, t, params, graph), graph, rng, config, stats);
}

std::vector<std::uint8_t> draw_slice(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                                     const ModelParams& params, const NeighborGraph& graph,
                                     const SamplerConfig& config, const RngStream& rng, SamplerStats* stats) {
  const SliceField field = slice_field(z_prev, x, t, params, graph);
  SamplerMode mode = config.mode;
  int sweeps = config.gibbs_sweeps;
  if (mode != SamplerMode::PlainGibbs && field.coupling < 0.0) {
    mode = SamplerMode::PlainGibbs;
    sweeps = 10 * config.gibbs_sweeps;
    if (stats) ++stats->gibbs_fallback_slices;
  }
  std::vector<std::uint8_t> now;
  if (mode == SamplerMode::PlainGibbs) {
    now.assign(z_prev.begin(), z_prev.end());
  } else {
    now = cftp_with_field(field, graph, rng.split(1), config, stats);
    if (mode == SamplerMode::PerfectCFTP) return now;
  }
  RngStream sweep_rng = rng.split(0);
  for (int s = 0; s < sweeps; ++s) gibbs_sweep(now, field, graph, sweep_rng);
  return now;
}

std::vector<std::uint8_t> init_bernoulli(const GridShape& shape, double p0, RngStream& rng) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ConfigError("Bernoulli probability must lie in [0,1]");
  std::vector<std::uint8_t> slice(shape.size());
  for (auto& v : slice) v = rng.uniform() < p0;
  return slice;
}

BinaryFieldSeries simulate_trajectory(int horizon, const CovariateSeries& x, const ModelParams& params,
                                      const NeighborGraph& graph, const SamplerConfig& config, const RngStream& rng,
                                      SamplerStats* stats) {
  config.validate();
  params.validate();
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
  if (x.horizon() < horizon) throw DataError("covariates do not cover the requested horizon");
  if (x.num_sites() != graph.num_sites()) throw DataError("covariates do not match the lattice");
  if (params.num_covariates() != x.dim()) throw DataError("beta length does not match covariate dimension");

  const std::size_t n = graph.num_sites();
  BinaryFieldSeries z(n, horizon);
  {
    auto slice0 = z.slice(0);
    if (const auto* init = std::get_if<ExplicitInit>(&config.initial)) {
      if (init->slice.size() != n) throw DataError("explicit initial slice has wrong length");
      std::copy(init->slice.begin(), init->slice.end(), slice0.begin());
    } else {
      RngStream init_rng = rng.split(0);
      const auto drawn = init_bernoulli(graph.shape(), std::get<BernoulliInit>(config.initial).p0, init_rng);
      std::copy(drawn.begin(), drawn.end(), slice0.begin());
    }
  }

  for (int t = 1; t <= horizon; ++t) {
    SamplerConfig slice_config = config;
    if (config.mode == SamplerMode::PGS && !config.pgs_perfect_every_slice && t > 1)
      slice_config.mode = SamplerMode::PlainGibbs;
    const auto next = draw_slice(z.slice(t - 1), x, t, params, graph, slice_config,
                                 rng.split(static_cast<std::uint64_t>(t)), stats);
    std::copy(next.begin(), next.end(), z.slice(t).begin());
  }
  return z;
}

}  // namespace autologit
