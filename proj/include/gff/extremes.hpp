#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gff/lattice.hpp"
#include "gff/sampler.hpp"

namespace gff {

/// 2 sqrt(g) with g = 2/pi.
double two_sqrt_g();

/// Height 2 sqrt(g) eta log N.
double high_level(const GridDomain& domain, double eta);

enum class Direction { above, below };

/// Sites of V_N^l on one side of a level.
class HighSet {
public:
  HighSet(GridDomain domain, double level, Direction direction, std::vector<Point> points);

  const GridDomain& domain() const { return domain_; }
  double level() const { return level_; }
  Direction direction() const { return direction_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool contains(Point p) const { return domain_.contains(p) && mask_[domain_.index(p)] != 0; }

private:
  GridDomain domain_;
  double level_;
  Direction direction_;
  std::vector<Point> points_;
  std::vector<std::uint8_t> mask_;
};

/// {x in V_N^l : Phi_x >= level}.
HighSet high_set_at(const Field& field, double level);
/// {x in V_N^l : Phi_x <= level}.
HighSet low_set_at(const Field& field, double level);

/// eta-high points: level 2 sqrt(g) eta log N.
HighSet high_set(const Field& field, double eta);

/// |points ∩ D(x, N^beta)|.
std::int64_t count_in_disk(const HighSet& hs, Point x, double beta);

struct ConditionalDiskStats {
  double alpha = 0.0;
  double beta = 0.0;
  std::int64_t proposals = 0;
  /// Per accepted (replica, x): |H_N(alpha) ∩ D(x, N^beta)|.
  std::vector<std::int64_t> counts;
  std::vector<std::size_t> replica;
  std::vector<Point> centers;
  double median_ratio = 0.0; // median of log(count) / log N
  double predicted = 0.0;    // 2 beta (1 - alpha^2)
};

/// Rejection sampling of (replica, x) with x uniform on V_N^l, keeping x in
/// H_N(alpha); stops after `budget` proposals or `max_accepted` acceptances.
ConditionalDiskStats count_in_disk_given_high(std::span<const Field> fields, double alpha, double beta,
                                              std::int64_t budget, std::uint64_t seed,
                                              std::int64_t max_accepted = 2000);

/// Ordered pairs (x, y), x != y, of points with |x - y| <= N^beta, by cell scan.
std::int64_t pair_count(const HighSet& hs, double beta);
/// Same count by direct double loop.
std::int64_t pair_count_brute(const HighSet& hs, double beta);

/// Largest a such that an a x a square of sites (in V_N) with center in V_N^l
/// has every indicator set. The square with lower corner lo has center
/// lo + (a/2, a/2). `indicator` is row-major over V_N.
int largest_centered_square(const GridDomain& domain, std::span<const std::uint8_t> indicator);

/// D_N: side of the largest square centered in V_N^l with min Phi >= level.
int max_square_min_above(const Field& field, double level);
/// Side of the largest square centered in V_N^l with max Phi <= level.
int max_square_max_below(const Field& field, double level);

struct ExponentEstimate {
  std::vector<int> ns;
  std::vector<double> statistics;
  std::vector<int> censored; // sizes whose statistic was <= 0
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;
  std::optional<double> predicted;
};

/// Least-squares slope of log(stat) on log N; zero statistics are censored.
ExponentEstimate exponent_fit(std::span<const int> ns, std::span<const double> statistics,
                              std::optional<double> predicted = std::nullopt);

double median(std::vector<double> values);

} // namespace gff
