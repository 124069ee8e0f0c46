// Acceptance run: one PASS/FAIL line per criterion, thresholds pinned below.
//
//   acceptance                   run everything, exit 1 on any FAIL
//   acceptance --only 4,5        run a subset
//   acceptance --known-red 7     still print FAIL for 7, but do not let it
//                                set the exit status

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gff/entropic.hpp"
#include "gff/error.hpp"
#include "gff/extremes.hpp"
#include "gff/green.hpp"
#include "gff/harness.hpp"
#include "gff/rng.hpp"
#include "gff/sampler.hpp"
#include "gff/theory.hpp"

using namespace gff;

namespace {

// Replica counts: the spec floor is 10, but medians of 10 fields move the
// fitted slopes by several tenths; these counts keep replica noise well
// inside the bands while staying within the runtime budget.
constexpr int kSpectralReplicas = 401;
constexpr int kMaxFieldReplicas = 801;
constexpr int kDiskReplicas = 41;
constexpr int kDiskCenters = 25;
constexpr std::uint64_t kSeed = 20261016;

constexpr double kGreenExactTol = 1e-10;
constexpr double kSpectralTol = 1e-8;
constexpr double kNoGrowth = 0.5;
constexpr double kHighCountSlope = 1.5, kHighCountHalf = 0.3;
constexpr double kSquareSlope = 0.4, kSquareHalf = 0.15;
constexpr double kDiskRatio = 0.9, kDiskHalf = 0.35;
constexpr double kPairsHalf = 0.4;
constexpr double kRhoGridTol = 1e-6;
constexpr double kIdentityTol = 1e-12;
constexpr double kChainSigmas = 5.0;
constexpr double kMeanLo = 1.2, kMeanHi = 2.5;
constexpr std::int64_t kMinBurnIn = 5000, kMinStates = 200;
constexpr double kSpikeSlope = 0.3, kSpikeHalf = 0.2;
constexpr double kLowSlope = 1.5, kLowHalf = 0.5;
constexpr double kMaxLo = 0.6, kMaxHi = 1.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig spectral_config(Experiment e, std::vector<int> ns, int replicas) {
  ExperimentConfig c;
  c.experiment = e;
  c.ns = std::move(ns);
  c.l = {1, 4};
  c.replicas = replicas;
  c.master_seed = kSeed;
  return c;
}

// Median per N of one statistic in raw harness rows.
std::vector<double> medians(const CsvTable& raw, const std::vector<int>& ns, const std::string& stat) {
  std::vector<double> out;
  for (const int n : ns) {
    std::vector<double> v;
    for (const auto& r : raw.rows)
      if (std::stoi(r[0]) == n && r[3] == stat) v.push_back(std::stod(r[5]));
    out.push_back(median(v));
  }
  return out;
}

Outcome slope_check(const std::vector<int>& ns, const std::vector<double>& stats, double centre, double half) {
  const auto fit = exponent_fit(ns, stats, centre);
  std::string s = "medians";
  for (std::size_t i = 0; i < ns.size(); ++i) s += fmt(" N=%d:%g", ns[i], stats[i]);
  s += fmt("; slope %.4f +- %.4f, band [%.2f, %.2f]", fit.slope, fit.stderr_, centre - half, centre + half);
  return {std::fabs(fit.slope - centre) <= half, s};
}

Outcome c1_green_exact() {
  const auto t = green_matrix(make_domain(3, {1, 4}));
  const double g = t({2, 2}, {2, 2});
  return {t.size() == 1 && std::fabs(g - 1.0) <= kGreenExactTol && t.max_residual() <= kGreenExactTol,
          fmt("G(2,2) = %.17g, residual %.2e", g, t.max_residual())};
}

Outcome c2_spectral() {
  const auto d = make_domain(16, {1, 4});
  const double dev = (spectral_covariance(d) - green_matrix(d).values()).cwiseAbs().maxCoeff();
  return {dev <= kSpectralTol, fmt("max |spectral - solve| = %.3e (tol %.0e)", dev, kSpectralTol)};
}

Outcome c3_lemma21() {
  std::vector<double> var, pair;
  std::string s;
  for (const int n : {32, 64, 128}) {
    const auto d = make_domain(n, {1, 4});
    const auto dev = covariance_deviation(d, green_block(d, d.inner_sites()));
    var.push_back(dev.variance_sup);
    pair.push_back(dev.pair_sup.value());
    s += fmt("N=%d var %.4f pair %.4f; ", n, dev.variance_sup, *dev.pair_sup);
  }
  bool ok = true;
  for (std::size_t i = 1; i < var.size(); ++i)
    ok = ok && var[i] <= var[0] + kNoGrowth && pair[i] <= pair[0] + kNoGrowth;
  return {ok, s + fmt("caps %.4f / %.4f", var[0] + kNoGrowth, pair[0] + kNoGrowth)};
}

Outcome c4_high_count() {
  const std::vector<int> ns{64, 128, 256, 512};
  auto c = spectral_config(Experiment::high_count, ns, kSpectralReplicas);
  c.params.eta = 0.5;
  return slope_check(ns, medians(collect(c), ns, "high_count"), kHighCountSlope, kHighCountHalf);
}

Outcome c5_high_square() {
  const std::vector<int> ns{64, 128, 256, 512};
  auto c = spectral_config(Experiment::high_square, ns, kSpectralReplicas);
  c.params.eta = 0.2;
  return slope_check(ns, medians(collect(c), ns, "high_square"), kSquareSlope, kSquareHalf);
}

Outcome c6_disk() {
  auto c = spectral_config(Experiment::disk_count, {512}, kDiskReplicas);
  c.params.alpha = 0.3;
  c.params.beta = 0.6;
  c.centers = kDiskCenters;
  const auto raw = collect(c);
  const double m = medians(raw, {512}, "disk_count").front();
  const double ratio = std::log(m) / std::log(512.0);
  return {std::fabs(ratio - kDiskRatio) <= kDiskHalf,
          fmt("%zu counts, median %g, log/log N = %.4f, band [%.2f, %.2f]", raw.rows.size(), m, ratio,
              kDiskRatio - kDiskHalf, kDiskRatio + kDiskHalf)};
}

double grid_rho(double alpha, double beta) {
  double best_g = 0.0, best = std::numeric_limits<double>::infinity();
  for (double g = 0.0; g <= 6.0; g += 1e-4)
    if (theory::tilt_constraint(alpha, beta, g) >= 0.0 && theory::f_h_beta(2.0, beta, g) < best) {
      best = theory::f_h_beta(2.0, beta, g);
      best_g = g;
    }
  for (double g = std::max(0.0, best_g - 1e-4); g <= best_g + 1e-4; g += 1e-8)
    if (theory::tilt_constraint(alpha, beta, g) >= 0.0) best = std::min(best, theory::f_h_beta(2.0, beta, g));
  return 2.0 + 2.0 * beta - 2.0 * alpha * alpha * best;
}

Outcome c7_pairs() {
  const double rho = theory::rho(0.4, 0.5);
  const double grid = grid_rho(0.4, 0.5);
  const std::vector<int> ns{128, 256, 512};
  auto c = spectral_config(Experiment::pairs, ns, kSpectralReplicas);
  c.params.alpha = 0.4;
  c.params.beta = 0.5;
  const auto m = medians(collect(c), ns, "pairs");
  bool ok = std::fabs(rho - grid) <= kRhoGridTol;
  std::string s = fmt("rho %.6f, grid %.6f; ", rho, grid);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double ratio = std::log(m[i]) / std::log(static_cast<double>(ns[i]));
    ok = ok && std::fabs(ratio - rho) <= kPairsHalf;
    s += fmt("N=%d median %g ratio %.4f; ", ns[i], m[i], ratio);
  }
  const auto fit = exponent_fit(ns, m);
  s += fmt("band [%.4f, %.4f]; across-N slope %.4f (diagnostic)", rho - kPairsHalf, rho + kPairsHalf, fit.slope);
  return {ok, s};
}

Outcome c8_identities() {
  double worst_star = 0, worst_lemma = 0, worst_rho = 0;
  for (int i = 1; i <= 9; ++i) {
    const double beta = i / 10.0, gs = theory::gamma_star(beta);
    worst_star = std::max(worst_star, std::fabs(theory::f_h_beta(2, beta, gs) - gs));
  }
  Stream s{kSeed, tag_hash("identities")};
  for (int k = 0; k < 10000; ++k) {
    const double alpha = 0.01 + 0.98 * s.uniform(), beta = 0.01 + 0.98 * s.uniform();
    const double gamma = 3.0 * s.uniform();
    const auto lem = theory::lemma83_coefficients(alpha, beta, gamma);
    const double lhs = beta * theory::f_h_beta(2, beta, gamma);
    const double rhs = 2 * lem.a + lem.b - lem.a * lem.b;
    worst_lemma = std::max(worst_lemma, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs)));
  }
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j)
      worst_rho = std::max(worst_rho, std::fabs(theory::rho(i / 10.0, j / 10.0) - grid_rho(i / 10.0, j / 10.0)));
  return {worst_star <= kIdentityTol && worst_lemma <= kIdentityTol && worst_rho <= kRhoGridTol,
          fmt("F(gamma*) - gamma* %.2e, lemma identity %.2e, rho vs grid %.2e", worst_star, worst_lemma, worst_rho)};
}

Outcome c9_oracles() {
  const auto d16 = make_domain(16, {1, 4});
  Stream s{kSeed, tag_hash("oracles")};
  int square_mismatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint8_t> ind(d16.site_count());
    const double p = 0.5 + 0.49 * s.uniform();
    for (auto& v : ind) v = s.uniform() < p ? 1 : 0;
    int best = 0;
    for (int a = 1; a <= 16; ++a)
      for (int b = 1; b <= 16; ++b)
        for (int side = 1; a + side - 1 <= 16 && b + side - 1 <= 16; ++side) {
          if (!d16.is_inner({a + side / 2, b + side / 2})) continue;
          bool full = true;
          for (int i = a; full && i < a + side; ++i)
            for (int j = b; full && j < b + side; ++j) full = ind[d16.index({i, j})] != 0;
          if (full) best = std::max(best, side);
        }
    square_mismatch += largest_centered_square(d16, ind) != best;
  }
  const auto d = make_domain(128, {1, 4});
  int pair_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts;
    const auto w = static_cast<std::uint64_t>(d.inner_width());
    const auto count = 1 + s.below(2000);
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto c = s.below(w * w);
      pts.push_back({d.inner_lo() + static_cast<int>(c / w), d.inner_lo() + static_cast<int>(c % w)});
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double beta = 0.1 + 0.8 * s.uniform();
    const double r = std::pow(128.0, beta);
    std::int64_t brute = 0;
    for (const auto& x : pts)
      for (const auto& y : pts) {
        const double d1 = x.x1 - y.x1, d2 = x.x2 - y.x2;
        if (!(x == y) && d1 * d1 + d2 * d2 <= r * r) ++brute;
      }
    pair_mismatch += pair_count(HighSet(d, 0.0, Direction::above, pts), beta) != brute;
  }
  return {square_mismatch == 0 && pair_mismatch == 0,
          fmt("square mismatches %d/1000, pair mismatches %d/100", square_mismatch, pair_mismatch)};
}

Outcome c10_chain_n3() {
  ChainConfig cfg;
  cfg.burn_in_sweeps = 100;
  cfg.seed = kSeed;
  constexpr std::int64_t draws = 100000;
  double sum = 0, sum2 = 0;
  run_cff_chain(make_domain(3, {1, 4}), cfg, draws, [&](const ChainState& st) {
    const double v = st.field({2, 2});
    sum += v;
    sum2 += v * v;
  });
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  const double target = std::sqrt(2.0 / std::numbers::pi);
  return {std::fabs(mean - target) <= kChainSigmas * se,
          fmt("mean %.5f, target %.5f, %.2f standard errors", mean, target, std::fabs(mean - target) / se)};
}

// Independent chains per size, pooled states. The mean height at N=128
// settles near 1.245, close to the band edge, so criterion 11 records more.
constexpr int kChains = 4;
constexpr int kMeanChains = 8;
constexpr std::int64_t kStatesPerChain = 100;
constexpr std::int64_t kMeanStatesPerChain = 200;
constexpr std::int64_t kThinning = 10;

std::int64_t burn_in(int n) { return std::max(kMinBurnIn, default_burn_in(n)); }

Outcome c11_cff_mean() {
  std::vector<double> h;
  std::string s;
  bool budget = true;
  for (const int n : {32, 64, 128}) {
    std::vector<ChainState> states;
    for (int k = 0; k < kMeanChains; ++k) {
      ChainConfig cfg{burn_in(n), kThinning, replica_seed(kSeed, "cff-mean", n, k)};
      auto part = cff_chain(make_domain(n, {1, 4}), cfg, kMeanStatesPerChain);
      states.insert(states.end(), part.begin(), part.end());
    }
    budget = budget && burn_in(n) >= kMinBurnIn && static_cast<std::int64_t>(states.size()) >= kMinStates;
    h.push_back(cff_mean_height(states));
    s += fmt("N=%d %.4f (burn-in %lld, %zu states); ", n, h.back(), static_cast<long long>(burn_in(n)),
             states.size());
  }
  const bool ok = h[0] > 0 && h[1] > h[0] && h[2] > h[1] && h[2] >= kMeanLo && h[2] <= kMeanHi;
  return {budget && ok, s + fmt("band at N=128 [%.1f, %.1f]", kMeanLo, kMeanHi)};
}

Outcome c12_cff_trends() {
  const std::vector<int> ns{64, 128, 256};
  std::vector<double> spike, low;
  for (const int n : ns) {
    std::vector<double> sp, lo;
    for (int k = 0; k < kChains; ++k) {
      ChainConfig cfg{burn_in(n), kThinning, replica_seed(kSeed, "cff-trends", n, k)};
      run_cff_chain(make_domain(n, {1, 4}), cfg, kStatesPerChain, [&](const ChainState& st) {
        sp.push_back(max_low_square(st, 0.4));
        lo.push_back(static_cast<double>(low_set(st, 0.5).size()));
      });
    }
    spike.push_back(median(sp));
    low.push_back(median(lo));
  }
  const auto a = slope_check(ns, spike, kSpikeSlope, kSpikeHalf);
  const auto b = slope_check(ns, low, kLowSlope, kLowHalf);
  return {a.pass && b.pass, "D+(0.4) " + a.detail + " | L+(0.5) " + b.detail + " | MCMC-limited estimates"};
}

Outcome c13_max() {
  const std::vector<int> ns{64, 128, 256, 512};
  const auto m = medians(collect(spectral_config(Experiment::max_field, ns, kMaxFieldReplicas)), ns, "max");
  const double scale = 2.0 * std::sqrt(theory::g());
  bool ok = true;
  std::string s;
  double prev = -1;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double r = m[i] / std::log(static_cast<double>(ns[i])) / scale;
    ok = ok && r > prev;
    prev = r;
    s += fmt("N=%d median max %.4f ratio %.4f; ", ns[i], m[i], r);
  }
  ok = ok && prev >= kMaxLo && prev <= kMaxHi;
  return {ok, s + fmt("band at N=512 [%.1f, %.1f] x 2 sqrt(g)", kMaxLo, kMaxHi)};
}

std::set<int> parse_list(const char* text) {
  std::set<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.insert(std::stoi(item));
  return out;
}

} // namespace

int main(int argc, char** argv) {
  std::set<int> only, known_red;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--only"))
      only = parse_list(argv[i + 1]);
    else if (!std::strcmp(argv[i], "--known-red"))
      known_red = parse_list(argv[i + 1]);
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"green exactness", c1_green_exact},
      {"spectral covariance equals solve", c2_spectral},
      {"Green's function deviation bounded", c3_lemma21},
      {"high point count exponent", c4_high_count},
      {"largest high square exponent", c5_high_square},
      {"disk count exponent", c6_disk},
      {"pair count exponent rho", c7_pairs},
      {"theory identities", c8_identities},
      {"square DP and pair scan oracles", c9_oracles},
      {"conditioned chain at N=3", c10_chain_n3},
      {"conditioned mean height trend", c11_cff_mean},
      {"conditioned spike and low set trends", c12_cff_trends},
      {"field maximum trend", c13_max},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool tolerated = !o.pass && known_red.count(id);
    std::printf("criterion %2d %-38s %s%s [%.1fs] %s\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL",
                tolerated ? " (known red)" : "", secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !tolerated) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
