#include "gff/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "gff/error.hpp"

namespace gff {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::invalid_margin: return "invalid-margin";
  case ErrorCode::precondition: return "precondition";
  case ErrorCode::too_small_lattice: return "too-small-lattice";
  case ErrorCode::dense_cap_exceeded: return "out-of-memory";
  case ErrorCode::factorization_failure: return "factorization-failure";
  case ErrorCode::degenerate_box: return "degenerate-box";
  case ErrorCode::domain_error: return "domain-error";
  case ErrorCode::identity_violation: return "identity-violation";
  case ErrorCode::insufficient_sizes: return "insufficient-sizes";
  case ErrorCode::no_accepted_samples: return "no-accepted-samples";
  case ErrorCode::config_invalid: return "config-invalid";
  case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::config_invalid, "not an integer: '" + std::string(s) + "'");
  return v;
}

Rational reduced(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::config_invalid, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  return {num / g, den / g};
}

} // namespace

Rational Rational::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos)
    return reduced(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return reduced(parse_int(text), 1);
  std::string digits(text.substr(0, dot));
  std::string frac(text.substr(dot + 1));
  if (frac.size() > 15) throw Error(ErrorCode::config_invalid, "too many decimals: '" + std::string(text) + "'");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::string all = digits + frac;
  return reduced(parse_int(all.empty() ? std::string("0") : all), den);
}

Box Box::centered(Point center, int side) {
  return {{center.x1 - side / 2, center.x2 - side / 2}, side, side};
}

GridDomain::GridDomain(int n, Rational l) : n_(n), l_(l) {
  if (n < 3) throw Error(ErrorCode::precondition, "N must be at least 3, got " + std::to_string(n));
  if (l.den <= 0 || l.num <= 0 || 2 * l.num >= l.den)
    throw Error(ErrorCode::invalid_margin, "l = " + l.str() + " is not in (0, 1/2)");
  // smallest integer m >= l N
  std::int64_t prod = l.num * static_cast<std::int64_t>(n);
  std::int64_t margin = (prod + l.den - 1) / l.den;
  inner_lo_ = static_cast<int>(1 + margin);
  inner_hi_ = static_cast<int>(n - margin);
  if (inner_lo_ > inner_hi_)
    throw Error(ErrorCode::invalid_margin,
                "inner region is empty for N = " + std::to_string(n) + ", l = " + l.str());
}

double GridDomain::log_n() const { return std::log(static_cast<double>(n_)); }

std::vector<Point> GridDomain::sites() const {
  std::vector<Point> out;
  out.reserve(site_count());
  for (int a = 1; a <= n_; ++a)
    for (int b = 1; b <= n_; ++b) out.push_back({a, b});
  return out;
}

std::vector<Point> GridDomain::interior_sites() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n_ - 2) * static_cast<std::size_t>(n_ - 2));
  for (int a = 2; a < n_; ++a)
    for (int b = 2; b < n_; ++b) out.push_back({a, b});
  return out;
}

std::vector<Point> GridDomain::boundary_sites() const {
  std::vector<Point> out;
  for (int a = 1; a <= n_; ++a)
    for (int b = 1; b <= n_; ++b)
      if (on_boundary({a, b})) out.push_back({a, b});
  return out;
}

std::vector<Point> GridDomain::inner_sites() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(inner_width()) * static_cast<std::size_t>(inner_width()));
  for (int a = inner_lo_; a <= inner_hi_; ++a)
    for (int b = inner_lo_; b <= inner_hi_; ++b) out.push_back({a, b});
  return out;
}

GridDomain make_domain(int n, Rational l) { return GridDomain(n, l); }

std::vector<Point> disk(const GridDomain& domain, Point x, double rho) {
  if (!domain.contains(x)) throw Error(ErrorCode::precondition, "disk center outside V_N");
  std::vector<Point> out;
  if (rho < 0) return out;
  const int r = static_cast<int>(std::floor(rho));
  const double r2 = rho * rho;
  for (int a = std::max(1, x.x1 - r); a <= std::min(domain.n(), x.x1 + r); ++a) {
    for (int b = std::max(1, x.x2 - r); b <= std::min(domain.n(), x.x2 + r); ++b) {
      const double d1 = a - x.x1, d2 = b - x.x2;
      if (d1 * d1 + d2 * d2 <= r2) out.push_back({a, b});
    }
  }
  return out;
}

int box_side(int n, double alpha) {
  if (alpha == 0.0) return 1;
  const double nominal = std::pow(static_cast<double>(n), alpha);
  return std::max(2, 2 * static_cast<int>(std::lround(nominal / 2.0)));
}

BoxPartition partition(const GridDomain& domain, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw Error(ErrorCode::precondition, "partition exponent must lie in [0, 1)");
  BoxPartition out;
  out.alpha = alpha;
  out.side = box_side(domain.n(), alpha);
  const int lo = domain.inner_lo(), hi = domain.inner_hi();
  const int per_axis = (domain.inner_width() + out.side - 1) / out.side;
  out.boxes.reserve(static_cast<std::size_t>(per_axis) * static_cast<std::size_t>(per_axis));
  for (int a = lo; a <= hi; a += out.side) {
    const int h = std::min(out.side, hi - a + 1);
    for (int b = lo; b <= hi; b += out.side) {
      const int w = std::min(out.side, hi - b + 1);
      out.boxes.push_back({{a, b}, h, w});
    }
  }
  return out;
}

namespace {

// Child lies in the concentric square of half the parent's extent. Sites are
// unit cells [k, k + 1), so comparisons are done on 4x-scaled coordinates.
bool in_half_square(const Box& parent, const Box& child) {
  const long p1 = 4L * parent.lo.x1, p2 = 4L * parent.lo.x2;
  const long c1 = 4L * child.lo.x1, c2 = 4L * child.lo.x2;
  return c1 >= p1 + parent.height && c1 + 4L * child.height <= p1 + 3L * parent.height &&
         c2 >= p2 + parent.width && c2 + 4L * child.width <= p2 + 3L * parent.width;
}

} // namespace

std::vector<std::size_t> MultiscaleHierarchy::children(std::size_t level, std::size_t parent_index) const {
  std::vector<std::size_t> out;
  if (level + 1 >= levels.size()) return out;
  const auto& next = levels[level + 1];
  for (std::size_t i = 0; i < next.boxes.size(); ++i)
    if (next.parent[i] == parent_index) out.push_back(i);
  return out;
}

MultiscaleHierarchy build_hierarchy(const GridDomain& domain, double alpha, int k) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw Error(ErrorCode::precondition, "hierarchy needs 1/2 < alpha < 1");
  if (k < 2) throw Error(ErrorCode::precondition, "hierarchy needs K >= 2");

  MultiscaleHierarchy h;
  h.alpha = alpha;
  h.k = k;
  for (int i = 1; i <= k; ++i) {
    const double ai = alpha * (k - i + 1) / k;
    if (std::pow(static_cast<double>(domain.n()), ai) < 2.0)
      throw Error(ErrorCode::too_small_lattice,
                  "level " + std::to_string(i) + " box side N^" + std::to_string(ai) + " is below 2");
  }

  {
    auto first = partition(domain, alpha);
    h.levels.push_back({alpha, first.side, std::move(first.boxes), {}});
  }
  for (int i = 2; i <= k + 1; ++i) {
    const double ai = alpha * (k - i + 1) / k;
    auto tiles = partition(domain, ai);
    const auto& prev = h.levels.back();
    HierarchyLevel next{ai, tiles.side, {}, {}};
    // Tiles are laid out row-major on a regular grid, so the candidates for a
    // parent are found by index arithmetic rather than a full scan.
    const int per_axis = (domain.inner_width() + tiles.side - 1) / tiles.side;
    const int lo = domain.inner_lo();
    for (std::size_t p = 0; p < prev.boxes.size(); ++p) {
      const Box& parent = prev.boxes[p];
      const int r0 = (parent.lo.x1 - lo) / tiles.side;
      const int r1 = std::min(per_axis - 1, (parent.lo.x1 + parent.height - 1 - lo) / tiles.side);
      const int c0 = (parent.lo.x2 - lo) / tiles.side;
      const int c1 = std::min(per_axis - 1, (parent.lo.x2 + parent.width - 1 - lo) / tiles.side);
      for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
          const Box& child = tiles.boxes[static_cast<std::size_t>(r) * per_axis + c];
          if (in_half_square(parent, child)) {
            next.boxes.push_back(child);
            next.parent.push_back(p);
          }
        }
    }
    h.levels.push_back(std::move(next));
  }
  return h;
}

} // namespace gff
