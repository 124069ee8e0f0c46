#include "gff/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gff/error.hpp"
#include "gff/rng.hpp"

namespace gff {

double two_sqrt_g() { return 2.0 * std::sqrt(2.0 / std::numbers::pi); }

double high_level(const GridDomain& domain, double eta) { return two_sqrt_g() * eta * domain.log_n(); }

HighSet::HighSet(GridDomain domain, double level, Direction direction, std::vector<Point> points)
    : domain_(std::move(domain)), level_(level), direction_(direction), points_(std::move(points)),
      mask_(domain_.site_count(), 0) {
  for (const auto& p : points_) {
    if (!domain_.is_inner(p)) throw Error(ErrorCode::precondition, "high set point outside V_N^l");
    mask_[domain_.index(p)] = 1;
  }
}

namespace {

template <class Pred>
HighSet threshold_set(const Field& field, double level, Direction dir, Pred keep) {
  const auto& d = field.domain();
  std::vector<Point> pts;
  for (int a = d.inner_lo(); a <= d.inner_hi(); ++a)
    for (int b = d.inner_lo(); b <= d.inner_hi(); ++b)
      if (keep(field({a, b}))) pts.push_back({a, b});
  return HighSet(d, level, dir, std::move(pts));
}

double sq(double v) { return v * v; }

} // namespace

HighSet high_set_at(const Field& field, double level) {
  return threshold_set(field, level, Direction::above, [level](double v) { return v >= level; });
}

HighSet low_set_at(const Field& field, double level) {
  return threshold_set(field, level, Direction::below, [level](double v) { return v <= level; });
}

HighSet high_set(const Field& field, double eta) { return high_set_at(field, high_level(field.domain(), eta)); }

std::int64_t count_in_disk(const HighSet& hs, Point x, double beta) {
  const auto& d = hs.domain();
  if (!d.is_inner(x)) throw Error(ErrorCode::precondition, "disk center must lie in V_N^l");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::precondition, "beta must lie in (0, 1)");
  const double rho = std::pow(static_cast<double>(d.n()), beta);
  const int r = static_cast<int>(std::floor(rho));
  // The set lives in V_N^l, so clip the scan to it.
  std::int64_t count = 0;
  for (int a = std::max(d.inner_lo(), x.x1 - r); a <= std::min(d.inner_hi(), x.x1 + r); ++a)
    for (int b = std::max(d.inner_lo(), x.x2 - r); b <= std::min(d.inner_hi(), x.x2 + r); ++b)
      if (sq(a - x.x1) + sq(b - x.x2) <= rho * rho && hs.contains({a, b})) ++count;
  return count;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::precondition, "median of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ConditionalDiskStats count_in_disk_given_high(std::span<const Field> fields, double alpha, double beta,
                                              std::int64_t budget, std::uint64_t seed, std::int64_t max_accepted) {
  if (fields.empty()) throw Error(ErrorCode::precondition, "no replicas given");
  const auto& d = fields.front().domain();
  ConditionalDiskStats out;
  out.alpha = alpha;
  out.beta = beta;
  out.predicted = 2.0 * beta * (1.0 - alpha * alpha);

  std::vector<HighSet> sets;
  sets.reserve(fields.size());
  for (const auto& f : fields) {
    if (!(f.domain() == d)) throw Error(ErrorCode::precondition, "replicas on different domains");
    sets.push_back(high_set(f, alpha));
  }

  Stream stream{seed, tag_hash("disk-given-high")};
  const auto width = static_cast<std::uint64_t>(d.inner_width());
  for (std::int64_t t = 0; t < budget && static_cast<std::int64_t>(out.counts.size()) < max_accepted; ++t) {
    ++out.proposals;
    const auto r = static_cast<std::size_t>(stream.below(sets.size()));
    const auto cell = stream.below(width * width);
    const Point x{d.inner_lo() + static_cast<int>(cell / width), d.inner_lo() + static_cast<int>(cell % width)};
    if (!sets[r].contains(x)) continue;
    out.counts.push_back(count_in_disk(sets[r], x, beta));
    out.replica.push_back(r);
    out.centers.push_back(x);
  }
  if (out.counts.empty())
    throw Error(ErrorCode::no_accepted_samples,
                "no alpha-high center found in " + std::to_string(out.proposals) + " proposals");
  std::vector<double> ratios;
  ratios.reserve(out.counts.size());
  for (auto c : out.counts) ratios.push_back(std::log(static_cast<double>(c)) / d.log_n());
  out.median_ratio = median(std::move(ratios));
  return out;
}

std::int64_t pair_count(const HighSet& hs, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::precondition, "beta must lie in (0, 1)");
  const auto& pts = hs.points();
  if (pts.size() < 2) return 0;
  const double rho = std::pow(static_cast<double>(hs.domain().n()), beta);
  const double rho2 = rho * rho;
  const int cell = std::max(1, static_cast<int>(std::ceil(rho)));

  // Bucket points by cell; a partner within rho lies in one of the 3x3 cells around.
  const int cells = hs.domain().n() / cell + 2;
  std::vector<std::vector<Point>> grid(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells));
  auto key = [&](Point p) { return static_cast<std::size_t>(p.x1 / cell) * cells + static_cast<std::size_t>(p.x2 / cell); };
  for (const auto& p : pts) grid[key(p)].push_back(p);

  std::int64_t count = 0;
  for (const auto& p : pts) {
    const int c1 = p.x1 / cell, c2 = p.x2 / cell;
    for (int a = std::max(0, c1 - 1); a <= std::min(cells - 1, c1 + 1); ++a)
      for (int b = std::max(0, c2 - 1); b <= std::min(cells - 1, c2 + 1); ++b)
        for (const auto& q : grid[static_cast<std::size_t>(a) * cells + b])
          if (sq(p.x1 - q.x1) + sq(p.x2 - q.x2) <= rho2) ++count;
  }
  // every point matched itself once
  return count - static_cast<std::int64_t>(pts.size());
}

std::int64_t pair_count_brute(const HighSet& hs, double beta) {
  const auto& pts = hs.points();
  const double rho = std::pow(static_cast<double>(hs.domain().n()), beta);
  std::int64_t count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j && sq(pts[i].x1 - pts[j].x1) + sq(pts[i].x2 - pts[j].x2) <= rho * rho) ++count;
  return count;
}

int largest_centered_square(const GridDomain& domain, std::span<const std::uint8_t> indicator) {
  const int n = domain.n();
  if (indicator.size() != domain.site_count()) throw Error(ErrorCode::precondition, "indicator size mismatch");
  // side[j] holds, for the current row, the largest all-set square whose
  // bottom-right corner is (row, j).
  std::vector<int> prev(static_cast<std::size_t>(n) + 1, 0), cur(static_cast<std::size_t>(n) + 1, 0);
  const int lo = domain.inner_lo(), hi = domain.inner_hi();
  int best = 0;
  for (int i = 1; i <= n; ++i) {
    cur[0] = 0;
    for (int j = 1; j <= n; ++j) {
      if (!indicator[domain.index({i, j})]) {
        cur[j] = 0;
        continue;
      }
      const int s = 1 + std::min({prev[j], cur[j - 1], prev[j - 1]});
      cur[j] = s;
      // For bottom-right (i, j) the center coordinate is i + 1 - ceil(a/2);
      // it lies in [lo, hi] iff ceil(a/2) in [i + 1 - hi, i + 1 - lo].
      const int cap1 = i + 1 - lo, cap2 = j + 1 - lo;
      const int floor1 = i + 1 - hi, floor2 = j + 1 - hi;
      const int a = std::min({s, 2 * cap1, 2 * cap2});
      if (a <= best) continue;
      if ((a + 1) / 2 >= floor1 && (a + 1) / 2 >= floor2 && a >= 1) best = a;
    }
    std::swap(prev, cur);
  }
  return best;
}

namespace {

template <class Pred>
int square_for(const Field& field, Pred keep) {
  const auto& d = field.domain();
  std::vector<std::uint8_t> ind(d.site_count());
  for (std::size_t i = 0; i < ind.size(); ++i) ind[i] = keep(field.at(i)) ? 1 : 0;
  return largest_centered_square(d, ind);
}

} // namespace

int max_square_min_above(const Field& field, double level) {
  return square_for(field, [level](double v) { return v >= level; });
}

int max_square_max_below(const Field& field, double level) {
  return square_for(field, [level](double v) { return v <= level; });
}

ExponentEstimate exponent_fit(std::span<const int> ns, std::span<const double> statistics,
                              std::optional<double> predicted) {
  if (ns.size() != statistics.size()) throw Error(ErrorCode::precondition, "sizes and statistics differ in length");
  if (ns.size() < 3) throw Error(ErrorCode::insufficient_sizes, "need at least 3 lattice sizes");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw Error(ErrorCode::precondition, "lattice sizes must be strictly increasing");

  ExponentEstimate out;
  out.ns.assign(ns.begin(), ns.end());
  out.statistics.assign(statistics.begin(), statistics.end());
  out.predicted = predicted;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (statistics[i] > 0.0) {
      xs.push_back(std::log(static_cast<double>(ns[i])));
      ys.push_back(std::log(statistics[i]));
    } else {
      out.censored.push_back(ns[i]);
    }
  }
  if (xs.size() < 3)
    throw Error(ErrorCode::insufficient_sizes,
                std::to_string(out.censored.size()) + " censored sizes leave fewer than 3 points to fit");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) ssr += sq(ys[i] - out.intercept - out.slope * xs[i]);
  out.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
  return out;
}

} // namespace gff
