#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gff {

/// Exact rational number, used for the inner margin l.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 4;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  /// Parses "p/q" or a finite decimal such as "0.25".
  static Rational parse(std::string_view text);

  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Lattice site (x1, x2), both coordinates in {1, ..., N}.
struct Point {
  int x1 = 0;
  int x2 = 0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle of sites [lo.x1, lo.x1 + height) x [lo.x2, lo.x2 + width).
/// Tiling boxes are square except for the clipped last row/column of a partition.
struct Box {
  Point lo;
  int height = 0;
  int width = 0;

  /// Square of `side` sites whose center() is `center`.
  static Box centered(Point center, int side);

  Point center() const { return {lo.x1 + height / 2, lo.x2 + width / 2}; }
  int side() const { return height > width ? height : width; }
  bool is_square() const { return height == width; }
  std::size_t size() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  bool contains(Point p) const {
    return p.x1 >= lo.x1 && p.x1 < lo.x1 + height && p.x2 >= lo.x2 && p.x2 < lo.x2 + width;
  }
  bool contains(const Box& b) const {
    return b.lo.x1 >= lo.x1 && b.lo.x1 + b.height <= lo.x1 + height &&
           b.lo.x2 >= lo.x2 && b.lo.x2 + b.width <= lo.x2 + width;
  }
  /// Sites on the outer ring of the box.
  bool on_ring(Point p) const {
    return contains(p) && (p.x1 == lo.x1 || p.x1 == lo.x1 + height - 1 ||
                           p.x2 == lo.x2 || p.x2 == lo.x2 + width - 1);
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// The box V_N = {1..N}^2 together with its inner region V_N^l.
///
/// The inner region is the set of sites whose L-infinity distance to the
/// boundary ring is at least lN, i.e. min(x1-1, N-x1, x2-1, N-x2) >= lN.
/// It is always a square block contained in int(V_N).
class GridDomain {
public:
  GridDomain(int n, Rational l);

  int n() const { return n_; }
  Rational margin() const { return l_; }
  double log_n() const;

  std::size_t site_count() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
  std::size_t index(Point p) const {
    return static_cast<std::size_t>(p.x1 - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(p.x2 - 1);
  }
  Point point(std::size_t index) const {
    return {static_cast<int>(index / static_cast<std::size_t>(n_)) + 1,
            static_cast<int>(index % static_cast<std::size_t>(n_)) + 1};
  }

  bool contains(Point p) const { return p.x1 >= 1 && p.x1 <= n_ && p.x2 >= 1 && p.x2 <= n_; }
  bool on_boundary(Point p) const {
    return contains(p) && (p.x1 == 1 || p.x1 == n_ || p.x2 == 1 || p.x2 == n_);
  }
  bool is_interior(Point p) const { return contains(p) && !on_boundary(p); }
  bool is_inner(Point p) const {
    return p.x1 >= inner_lo_ && p.x1 <= inner_hi_ && p.x2 >= inner_lo_ && p.x2 <= inner_hi_;
  }

  /// Inclusive coordinate range [inner_lo, inner_hi] of V_N^l along each axis.
  int inner_lo() const { return inner_lo_; }
  int inner_hi() const { return inner_hi_; }
  int inner_width() const { return inner_hi_ - inner_lo_ + 1; }
  Box inner_box() const { return {{inner_lo_, inner_lo_}, inner_width(), inner_width()}; }
  Box full_box() const { return {{1, 1}, n_, n_}; }

  /// Row-major enumerations.
  std::vector<Point> sites() const;
  std::vector<Point> interior_sites() const;
  std::vector<Point> boundary_sites() const;
  std::vector<Point> inner_sites() const;

  friend bool operator==(const GridDomain& a, const GridDomain& b) {
    return a.n_ == b.n_ && a.l_ == b.l_;
  }

private:
  int n_;
  Rational l_;
  int inner_lo_ = 0;
  int inner_hi_ = -1;
};

GridDomain make_domain(int n, Rational l);

/// D(x, rho) = {y in V_N : |y - x| <= rho}, Euclidean norm, row-major order.
std::vector<Point> disk(const GridDomain& domain, Point x, double rho);

/// Even side length used for boxes of nominal size N^alpha (1 when alpha == 0).
int box_side(int n, double alpha);

struct BoxPartition {
  double alpha = 0.0;
  int side = 1;
  std::vector<Box> boxes;
};

/// Tiling of V_N^l by adjacent boxes of side ~N^alpha, starting at the low
/// corner; leftover space clips the last row and column of tiles.
BoxPartition partition(const GridDomain& domain, double alpha);

struct HierarchyLevel {
  double alpha = 0.0;
  int side = 1;
  std::vector<Box> boxes;
  /// Index into the previous level's boxes; empty for the first level.
  std::vector<std::size_t> parent;
};

struct MultiscaleHierarchy {
  double alpha = 0.0;
  int k = 0;
  std::vector<HierarchyLevel> levels; // K + 1 levels, alpha_i = alpha (K - i + 1) / K

  /// Children of box `parent_index` of level `level` (0-based) in level + 1.
  std::vector<std::size_t> children(std::size_t level, std::size_t parent_index) const;
};

/// Nested box families: level 1 is partition(alpha_1); every box of level
/// i+1 is a tile of partition(alpha_{i+1}) lying inside the concentric
/// half-side square of a level-i box.
MultiscaleHierarchy build_hierarchy(const GridDomain& domain, double alpha, int k);

} // namespace gff
