#include "gff/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "gff/error.hpp"
#include "gff/rng.hpp"

namespace gff {

namespace {

constexpr char kGreenMagic[8] = {'G', 'F', 'F', 'G', 'R', 'E', 'E', 'N'};

// Interior sites are numbered row-major over {2..N-1}^2.
std::size_t interior_index(const GridDomain& d, Point p) {
  return static_cast<std::size_t>(p.x1 - 2) * static_cast<std::size_t>(d.n() - 2) + static_cast<std::size_t>(p.x2 - 2);
}

Eigen::SparseMatrix<double> walk_laplacian(const GridDomain& d) {
  const int m = d.n() - 2;
  const auto size = static_cast<Eigen::Index>(m) * m;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(size) * 5);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Eigen::Index row = static_cast<Eigen::Index>(a) * m + b;
      entries.emplace_back(row, row, 1.0);
      if (a > 0) entries.emplace_back(row, row - m, -0.25);
      if (a + 1 < m) entries.emplace_back(row, row + m, -0.25);
      if (b > 0) entries.emplace_back(row, row - 1, -0.25);
      if (b + 1 < m) entries.emplace_back(row, row + 1, -0.25);
    }
  }
  Eigen::SparseMatrix<double> a(size, size);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::io_error, "truncated Green table");
  return v;
}

} // namespace

GreenTable::GreenTable(GridDomain domain, std::vector<Point> sites, Eigen::MatrixXd values, double max_residual)
    : domain_(std::move(domain)), sites_(std::move(sites)), slot_(domain_.site_count(), -1),
      values_(std::move(values)), max_residual_(max_residual) {
  if (values_.rows() != static_cast<Eigen::Index>(sites_.size()) || values_.cols() != values_.rows())
    throw Error(ErrorCode::precondition, "Green table shape does not match its site list");
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (!domain_.is_interior(sites_[i])) throw Error(ErrorCode::precondition, "Green table site not interior");
    slot_[domain_.index(sites_[i])] = static_cast<std::int32_t>(i);
  }
}

bool GreenTable::is_full() const {
  const auto interior = domain_.interior_sites();
  return interior == sites_;
}

bool GreenTable::covers(Point p) const { return domain_.contains(p) && slot_[domain_.index(p)] >= 0; }

double GreenTable::operator()(Point x, Point y) const {
  if (!domain_.contains(x) || !domain_.contains(y)) throw Error(ErrorCode::precondition, "point outside V_N");
  if (domain_.on_boundary(x) || domain_.on_boundary(y)) return 0.0;
  const auto i = slot_[domain_.index(x)], j = slot_[domain_.index(y)];
  if (i < 0 || j < 0) throw Error(ErrorCode::precondition, "site not covered by this Green table");
  return values_(i, j);
}

double GreenTable::max_asymmetry() const { return (values_ - values_.transpose()).cwiseAbs().maxCoeff(); }

void GreenTable::write(std::ostream& out) const {
  out.write(kGreenMagic, sizeof kGreenMagic);
  put<std::int32_t>(out, domain_.n());
  put<std::int64_t>(out, domain_.margin().num);
  put<std::int64_t>(out, domain_.margin().den);
  put<std::uint64_t>(out, sites_.size());
  for (const auto& p : sites_) {
    put<std::int32_t>(out, p.x1);
    put<std::int32_t>(out, p.x2);
  }
  // row-major
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = 0; j < values_.cols(); ++j) put<double>(out, values_(i, j));
  put<double>(out, max_residual_);
  if (!out) throw Error(ErrorCode::io_error, "failed writing Green table");
}

GreenTable GreenTable::read(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kGreenMagic, sizeof magic) != 0)
    throw Error(ErrorCode::io_error, "not a Green table dump");
  const auto n = get<std::int32_t>(in);
  const auto num = get<std::int64_t>(in);
  const auto den = get<std::int64_t>(in);
  const auto count = get<std::uint64_t>(in);
  GridDomain domain(n, {num, den});
  if (count > domain.site_count()) throw Error(ErrorCode::io_error, "corrupt Green table site count");
  std::vector<Point> sites(count);
  for (auto& p : sites) {
    p.x1 = get<std::int32_t>(in);
    p.x2 = get<std::int32_t>(in);
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) values(i, j) = get<double>(in);
  const double residual = get<double>(in);
  return GreenTable(std::move(domain), std::move(sites), std::move(values), residual);
}

GreenTable green_block(const GridDomain& domain, std::vector<Point> sites, const GreenOptions& options) {
  if (sites.size() > options.dense_cap)
    throw Error(ErrorCode::dense_cap_exceeded, std::to_string(sites.size()) + " sites exceed the dense cap of " +
                                                  std::to_string(options.dense_cap));
  for (const auto& p : sites)
    if (!domain.is_interior(p)) throw Error(ErrorCode::precondition, "Green table sites must be interior");

  const auto a = walk_laplacian(domain);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(a);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::factorization_failure, "walk Laplacian is not positive definite");

  const auto count = static_cast<Eigen::Index>(sites.size());
  std::vector<Eigen::Index> rows(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) rows[i] = static_cast<Eigen::Index>(interior_index(domain, sites[i]));

  Eigen::MatrixXd values(count, count);
  double max_residual = 0.0;
  constexpr Eigen::Index kBlock = 128;
  for (Eigen::Index start = 0; start < count; start += kBlock) {
    const Eigen::Index width = std::min(kBlock, count - start);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(a.rows(), width);
    for (Eigen::Index c = 0; c < width; ++c) rhs(rows[static_cast<std::size_t>(start + c)], c) = 1.0;
    Eigen::MatrixXd cols = llt.solve(rhs);
    Eigen::MatrixXd residual = a * cols - rhs;
    for (Eigen::Index c = 0; c < width; ++c) max_residual = std::max(max_residual, residual.col(c).norm());
    for (Eigen::Index c = 0; c < width; ++c)
      for (Eigen::Index r = 0; r < count; ++r) values(r, start + c) = cols(rows[static_cast<std::size_t>(r)], c);
  }
  if (!(max_residual <= 1e-10))
    throw Error(ErrorCode::factorization_failure, "Green solve residual " + std::to_string(max_residual));
  return GreenTable(domain, std::move(sites), std::move(values), max_residual);
}

GreenTable green_matrix(const GridDomain& domain, const GreenOptions& options) {
  return green_block(domain, domain.interior_sites(), options);
}

WalkEstimate green_walk_oracle(const GridDomain& domain, Point x, Point y, std::int64_t trials, std::uint64_t seed) {
  if (!domain.is_interior(x) || !domain.is_interior(y))
    throw Error(ErrorCode::precondition, "walk oracle endpoints must be interior sites");
  if (trials < 1) throw Error(ErrorCode::precondition, "walk oracle needs at least one trial");

  Stream stream{seed, tag_hash("green-walk"), static_cast<std::uint64_t>(x.x1), static_cast<std::uint64_t>(x.x2),
                static_cast<std::uint64_t>(y.x1), static_cast<std::uint64_t>(y.x2)};
  const int n = domain.n();
  double mean = 0.0, m2 = 0.0;
  std::uint64_t word = 0;
  int left = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    int a = x.x1, b = x.x2;
    std::int64_t visits = 0;
    while (a != 1 && a != n && b != 1 && b != n) {
      if (a == y.x1 && b == y.x2) ++visits;
      if (left == 0) {
        word = stream.bits();
        left = 32;
      }
      switch (word & 3u) {
      case 0: ++a; break;
      case 1: --a; break;
      case 2: ++b; break;
      default: --b; break;
      }
      word >>= 2;
      --left;
    }
    // Welford update
    const double v = static_cast<double>(visits);
    const double delta = v - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (v - mean);
  }
  WalkEstimate out;
  out.mean = mean;
  out.trials = trials;
  out.stderr_ = trials > 1 ? std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
  return out;
}

CovarianceDeviation covariance_deviation(const GridDomain& domain, const GreenTable& table) {
  if (!(table.domain() == domain)) throw Error(ErrorCode::precondition, "Green table built for another domain");
  const double g = 2.0 / std::numbers::pi;
  const double log_n = domain.log_n();
  const auto inner = domain.inner_sites();
  std::vector<Eigen::Index> slot(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (!table.covers(inner[i])) throw Error(ErrorCode::precondition, "Green table does not cover V_N^l");
    slot[i] = table.slot(inner[i]);
  }
  const auto& v = table.values();
  CovarianceDeviation out;
  out.sites = inner.size();
  for (std::size_t i = 0; i < inner.size(); ++i)
    out.variance_sup = std::max(out.variance_sup, std::fabs(v(slot[i], slot[i]) - g * log_n));
  if (inner.size() > 1) {
    double sup = 0.0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      for (std::size_t j = i + 1; j < inner.size(); ++j) {
        const double d1 = inner[i].x1 - inner[j].x1, d2 = inner[i].x2 - inner[j].x2;
        const double dist = std::sqrt(d1 * d1 + d2 * d2);
        sup = std::max(sup, std::fabs(v(slot[i], slot[j]) - g * (log_n - std::log(dist))));
      }
    }
    out.pair_sup = sup;
  }
  return out;
}

} // namespace gff
