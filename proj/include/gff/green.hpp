#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gff/lattice.hpp"

namespace gff {

struct GreenOptions {
  /// Largest number of table sites for which a dense table is built.
  std::size_t dense_cap = 65536;
};

/// Killed-walk Green's function G_N(x, y) restricted to a set of interior
/// sites. The full table (green_matrix) covers every site of int(V_N).
class GreenTable {
public:
  GreenTable(GridDomain domain, std::vector<Point> sites, Eigen::MatrixXd values, double max_residual);

  const GridDomain& domain() const { return domain_; }
  const std::vector<Point>& sites() const { return sites_; }
  const Eigen::MatrixXd& values() const { return values_; }
  std::size_t size() const { return sites_.size(); }

  /// True when the table covers all of int(V_N) in row-major order.
  bool is_full() const;
  bool covers(Point p) const;
  /// Row of `p` in values(), or -1 when not covered.
  Eigen::Index slot(Point p) const { return domain_.contains(p) ? slot_[domain_.index(p)] : -1; }

  /// G(x, y); zero when either argument lies on the boundary of V_N.
  double operator()(Point x, Point y) const;

  /// Largest relative residual of the linear solves that produced the table.
  double max_residual() const { return max_residual_; }
  double max_asymmetry() const;

  void write(std::ostream& out) const;
  static GreenTable read(std::istream& in);

private:
  GridDomain domain_;
  std::vector<Point> sites_;
  std::vector<std::int32_t> slot_; // site index in V_N -> row in values_, or -1
  Eigen::MatrixXd values_;
  double max_residual_;
};

/// Solves G(x,y) = delta_xy + (1/4) sum_{z~x} G(z,y) on int(V_N), G = 0 on
/// the boundary, for every interior column. Throws dense_cap_exceeded when
/// the interior is larger than options.dense_cap.
GreenTable green_matrix(const GridDomain& domain, const GreenOptions& options = {});

/// Same linear solve, keeping only the rows and columns of `sites`.
GreenTable green_block(const GridDomain& domain, std::vector<Point> sites, const GreenOptions& options = {});

struct WalkEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t trials = 0;
};

/// Monte Carlo estimate of G_N(x, y): visits to y (time 0 included) of a
/// simple random walk from x before it first hits the boundary of V_N.
WalkEstimate green_walk_oracle(const GridDomain& domain, Point x, Point y, std::int64_t trials, std::uint64_t seed);

struct CovarianceDeviation {
  /// sup over V_N^l of |G(x,x) - g log N|.
  double variance_sup = 0.0;
  /// sup over distinct pairs of V_N^l of |G(x,y) - g (log N - log|y-x|)|;
  /// empty when V_N^l is a single site.
  std::optional<double> pair_sup;
  std::size_t sites = 0;
};

CovarianceDeviation covariance_deviation(const GridDomain& domain, const GreenTable& table);

} // namespace gff
