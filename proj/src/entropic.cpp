#include "gff/entropic.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "gff/error.hpp"

namespace gff {

std::int64_t default_burn_in(int n) { return 50 * static_cast<std::int64_t>(n); }

double truncated_normal_draw(double mean, double variance, double lower, Stream& stream) {
  if (!(variance > 0.0)) throw Error(ErrorCode::precondition, "variance must be positive");
  const double sd = std::sqrt(variance);
  const double a = (lower - mean) / sd;
  if (a < 0.45) {
    // acceptance >= 1 - Phi(0.45) ~ 0.33
    for (;;) {
      const double z = stream.normal();
      if (z >= a) return mean + sd * z;
    }
  }
  // One-sided exponential proposal with the optimal rate (Robert 1995).
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(stream.uniform()) / rate;
    const double d = z - rate;
    if (std::log(stream.uniform()) <= -0.5 * d * d) return mean + sd * z;
  }
}

CffChain::CffChain(GridDomain domain, ChainConfig config)
    : domain_(std::move(domain)), config_(config), stream_{config.seed, tag_hash("cff-chain")},
      values_(domain_.site_count(), 0.0) {
  if (config_.burn_in_sweeps < 0) throw Error(ErrorCode::precondition, "burn-in must be nonnegative");
  if (config_.thinning < 1) throw Error(ErrorCode::precondition, "thinning must be at least 1");
}

void CffChain::update(int a, int b) {
  const int n = domain_.n();
  const std::size_t i = static_cast<std::size_t>(a - 1) * n + static_cast<std::size_t>(b - 1);
  const double mean = 0.25 * (values_[i - n] + values_[i + n] + values_[i - 1] + values_[i + 1]);
  if (config_.constrained && domain_.is_inner({a, b}))
    values_[i] = truncated_normal_draw(mean, 1.0, 0.0, stream_);
  else
    values_[i] = mean + stream_.normal();
}

void CffChain::sweep() {
  const int n = domain_.n();
  if (config_.sweep_order == SweepOrder::raster) {
    for (int a = 2; a < n; ++a)
      for (int b = 2; b < n; ++b) update(a, b);
  } else {
    for (int color = 0; color < 2; ++color)
      for (int a = 2; a < n; ++a)
        for (int b = 2 + ((a + color) & 1); b < n; b += 2) update(a, b);
  }
  ++sweeps_;
#ifndef NDEBUG
  if (config_.constrained)
    for (const auto& p : domain_.inner_sites()) assert(values_[domain_.index(p)] >= 0.0);
#endif
}

ChainState CffChain::state() const {
  return {Field(domain_, values_, Provenance::chain, config_.seed, sweeps_), sweeps_};
}

void run_cff_chain(const GridDomain& domain, const ChainConfig& config, std::int64_t samples,
                   const std::function<void(const ChainState&)>& record) {
  if (samples < 1) throw Error(ErrorCode::precondition, "need at least one recorded state");
  CffChain chain(domain, config);
  for (std::int64_t s = 0; s < config.burn_in_sweeps; ++s) chain.sweep();
  for (std::int64_t k = 0; k < samples; ++k) {
    for (std::int64_t s = 0; s < config.thinning; ++s) chain.sweep();
    record(chain.state());
  }
}

std::vector<ChainState> cff_chain(const GridDomain& domain, const ChainConfig& config, std::int64_t samples) {
  std::vector<ChainState> out;
  out.reserve(static_cast<std::size_t>(samples));
  run_cff_chain(domain, config, samples, [&out](const ChainState& s) { out.push_back(s); });
  return out;
}

double inner_mean(const Field& field) {
  const auto& d = field.domain();
  double sum = 0.0;
  for (int a = d.inner_lo(); a <= d.inner_hi(); ++a)
    for (int b = d.inner_lo(); b <= d.inner_hi(); ++b) sum += field({a, b});
  return sum / (static_cast<double>(d.inner_width()) * d.inner_width());
}

double cff_mean_height(std::span<const ChainState> states) {
  if (states.empty()) throw Error(ErrorCode::precondition, "no chain states");
  const auto& d = states.front().field.domain();
  double sum = 0.0;
  for (const auto& s : states) sum += inner_mean(s.field);
  return sum / static_cast<double>(states.size()) / (std::sqrt(2.0 / std::numbers::pi) * d.log_n());
}

HighSet low_set(const ChainState& state, double eta) {
  return low_set_at(state.field, high_level(state.field.domain(), 1.0 - eta));
}

int max_low_square(const ChainState& state, double eta) {
  return max_square_max_below(state.field, high_level(state.field.domain(), 1.0 - eta));
}

} // namespace gff
