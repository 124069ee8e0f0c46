#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gff/extremes.hpp"
#include "gff/rng.hpp"
#include "gff/sampler.hpp"

namespace gff {

enum class SweepOrder { raster, checkerboard };

struct ChainConfig {
  std::int64_t burn_in_sweeps = 0;
  std::int64_t thinning = 1;
  std::uint64_t seed = 0;
  SweepOrder sweep_order = SweepOrder::checkerboard;
  /// When false the hard wall on V_N^l is off and the chain targets the plain field.
  bool constrained = true;
};

/// Default burn-in of 50 N sweeps.
std::int64_t default_burn_in(int n);

struct ChainState {
  Field field;
  std::int64_t sweep_count = 0;
};

/// Exact draw from Normal(mean, variance) conditioned on [lower, inf).
double truncated_normal_draw(double mean, double variance, double lower, Stream& stream);

/// Heat-bath chain for the field conditioned to be nonnegative on V_N^l.
/// Each interior site is redrawn from Normal(mean of its 4 neighbours, 1),
/// truncated to [0, inf) on V_N^l. The chain starts from the zero field.
class CffChain {
public:
  CffChain(GridDomain domain, ChainConfig config);

  void sweep();
  std::int64_t sweeps() const { return sweeps_; }
  const GridDomain& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  ChainState state() const;

private:
  void update(int a, int b);

  GridDomain domain_;
  ChainConfig config_;
  Stream stream_;
  std::vector<double> values_;
  std::int64_t sweeps_ = 0;
};

/// Runs burn-in, then records `samples` states `thinning` sweeps apart.
std::vector<ChainState> cff_chain(const GridDomain& domain, const ChainConfig& config, std::int64_t samples);

/// Streaming form of cff_chain; the callback sees each recorded state.
void run_cff_chain(const GridDomain& domain, const ChainConfig& config, std::int64_t samples,
                   const std::function<void(const ChainState&)>& record);

/// Spatial mean over V_N^l of one state.
double inner_mean(const Field& field);

/// Mean of Phi over V_N^l and all states, divided by sqrt(g) log N.
double cff_mean_height(std::span<const ChainState> states);

/// L+_N(eta) = {x in V_N^l : Phi_x <= 2 sqrt(g) (1 - eta) log N}.
HighSet low_set(const ChainState& state, double eta);

/// D+_N(eta): largest square centered in V_N^l with max Phi <= 2 (1 - eta) sqrt(g) log N.
int max_low_square(const ChainState& state, double eta);

} // namespace gff
