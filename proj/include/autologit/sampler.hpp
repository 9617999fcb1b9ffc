#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "autologit/lattice.hpp"
#include "autologit/model.hpp"
#include "autologit/rng.hpp"

namespace autologit {

enum class SamplerMode {
  PerfectCFTP,  // one exact draw per slice
  PGS,          // exact draw followed by gibbs_sweeps Gibbs sweeps
  PlainGibbs    // gibbs_sweeps sweeps started from the previous slice
};

std::string to_string(SamplerMode mode);
SamplerMode parse_sampler_mode(const std::string& name);

struct BernoulliInit {
  double p0 = 0.2;
};
struct ExplicitInit {
  std::vector<std::uint8_t> slice;
};
using InitialSlice = std::variant<BernoulliInit, ExplicitInit>;

struct SamplerConfig {
  SamplerMode mode = SamplerMode::PerfectCFTP;
  int gibbs_sweeps = 100;
  // First CFTP look-back, in sweeps; doubled until coalescence.
  std::uint64_t cftp_start_sweeps = 1;
  std::uint64_t cftp_max_sweeps = std::uint64_t{1} << 20;
  // PGS only: when false the exact draw is made at t = 1 only and later
  // slices are Gibbs chains started from the previous slice.
  bool pgs_perfect_every_slice = true;
  InitialSlice initial = BernoulliInit{};

  void validate() const;
};

struct SamplerStats {
  std::uint64_t cftp_calls = 0;
  std::uint64_t cftp_total_sweeps = 0;  // sweeps of the final successful look-back, summed
  std::uint64_t cftp_max_lookback = 0;
  int gibbs_fallback_slices = 0;  // slices simulated by plain Gibbs because rho1 < 0
};

// One systematic-scan sweep in row-major order. Each site is redrawn from
// its full conditional given the current values of its neighbours.
void gibbs_sweep(std::span<std::uint8_t> slice, const SliceField& field, const NeighborGraph& graph,
                 RngStream& rng);
void gibbs_sweep(std::span<std::uint8_t> slice, std::span<const std::uint8_t> z_prev, const CovariateSeries& x,
                 int t, const ModelParams& params, const NeighborGraph& graph, RngStream& rng);

// Exact draw from the slice law at time t by monotone coupling from the
// past: chains started from all-zero and all-one states share uniforms;
// sweep -s always reuses stream rng.split(s). Requires rho1 >= 0.
std::vector<std::uint8_t> cftp_slice_sample(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                                            const ModelParams& params, const NeighborGraph& graph,
                                            const RngStream& rng, const SamplerConfig& config = {},
                                            SamplerStats* stats = nullptr);

// Draws slice t given slice t-1 according to config.mode (Bernoulli/explicit
// initialisation is not involved). Uses streams rng.split(0) for Gibbs
// sweeps and rng.split(1) for the exact draw.
std::vector<std::uint8_t> draw_slice(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                                     const ModelParams& params, const NeighborGraph& graph,
                                     const SamplerConfig& config, const RngStream& rng, SamplerStats* stats = nullptr);

std::vector<std::uint8_t> init_bernoulli(const GridShape& shape, double p0, RngStream& rng);

// Slices 0..horizon. Slice 0 comes from the configured initialiser; slice t
// uses stream rng.split(t).
BinaryFieldSeries simulate_trajectory(int horizon, const CovariateSeries& x, const ModelParams& params,
                                      const NeighborGraph& graph, const SamplerConfig& config, const RngStream& rng,
                                      SamplerStats* stats = nullptr);

}  // namespace autologit
