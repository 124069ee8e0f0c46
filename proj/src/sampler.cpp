#include "gff/sampler.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include "gff/error.hpp"
#include "gff/sine_transform.hpp"

namespace gff {

namespace {

constexpr char kFieldMagic[8] = {'G', 'F', 'F', 'F', 'I', 'E', 'L', 'D'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::io_error, "truncated field dump");
  return v;
}

void check_box(const GridDomain& domain, const Box& box) {
  if (!domain.full_box().contains(box)) throw Error(ErrorCode::precondition, "box is not inside V_N");
  if (box.height < 3 || box.width < 3) throw Error(ErrorCode::degenerate_box, "box has an empty interior");
}

// Solves (I - P) u = rhs on a rows x cols interior with zero outer values.
void solve_dirichlet(std::vector<double>& rhs, int rows, int cols) {
  orthonormal_dst2(rhs, rows, cols);
  for (int k = 0; k < rows; ++k)
    for (int l = 0; l < cols; ++l)
      rhs[static_cast<std::size_t>(k) * cols + l] /= 1.0 - walk_eigenvalue(k + 1, l + 1, rows, cols);
  orthonormal_dst2(rhs, rows, cols);
}

} // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
  case Provenance::dense: return "dense";
  case Provenance::spectral: return "spectral";
  case Provenance::conditional: return "conditional";
  case Provenance::chain: return "chain";
  case Provenance::synthetic: return "synthetic";
  }
  return "unknown";
}

Field::Field(GridDomain domain, std::vector<double> values, Provenance provenance, std::uint64_t seed,
             std::int64_t sweep_count)
    : domain_(std::move(domain)), values_(std::move(values)), provenance_(provenance), seed_(seed),
      sweep_count_(sweep_count) {
  if (values_.size() != domain_.site_count()) throw Error(ErrorCode::precondition, "field size does not match V_N");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::precondition, "field has a non-finite entry");
  if (provenance_ == Provenance::dense || provenance_ == Provenance::spectral ||
      provenance_ == Provenance::conditional) {
    for (const auto& p : domain_.boundary_sites())
      if (values_[domain_.index(p)] != 0.0) throw Error(ErrorCode::precondition, "field is nonzero on the boundary");
  }
}

Field Field::negated() const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -values_[i];
  return Field(domain_, std::move(v), Provenance::synthetic, seed_);
}

void Field::write(std::ostream& out) const {
  out.write(kFieldMagic, sizeof kFieldMagic);
  put<std::int32_t>(out, domain_.n());
  put<std::int64_t>(out, domain_.margin().num);
  put<std::int64_t>(out, domain_.margin().den);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(provenance_));
  put<std::uint64_t>(out, seed_);
  put<std::int64_t>(out, sweep_count_);
  out.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(values_.size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::io_error, "failed writing field dump");
}

Field Field::read(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kFieldMagic, sizeof magic) != 0) throw Error(ErrorCode::io_error, "not a field dump");
  const auto n = get<std::int32_t>(in);
  const auto num = get<std::int64_t>(in);
  const auto den = get<std::int64_t>(in);
  const auto prov = get<std::uint32_t>(in);
  const auto seed = get<std::uint64_t>(in);
  const auto sweeps = get<std::int64_t>(in);
  if (prov > static_cast<std::uint32_t>(Provenance::synthetic)) throw Error(ErrorCode::io_error, "bad provenance tag");
  GridDomain domain(n, {num, den});
  std::vector<double> values(domain.site_count());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw Error(ErrorCode::io_error, "truncated field dump");
  return Field(std::move(domain), std::move(values), static_cast<Provenance>(prov), seed, sweeps);
}

Eigen::MatrixXd precision_matrix(const GridDomain& domain) {
  const int m = domain.n() - 2;
  const auto size = static_cast<Eigen::Index>(m) * m;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(size, size);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const Eigen::Index i = static_cast<Eigen::Index>(a) * m + b;
      if (a > 0) q(i, i - m) = -0.25;
      if (a + 1 < m) q(i, i + m) = -0.25;
      if (b > 0) q(i, i - 1) = -0.25;
      if (b + 1 < m) q(i, i + 1) = -0.25;
    }
  return q;
}

DenseSampler::DenseSampler(const GreenTable& table) : domain_(table.domain()) {
  if (!table.is_full()) throw Error(ErrorCode::precondition, "dense sampling needs the full interior Green table");
  Eigen::LLT<Eigen::MatrixXd> llt(table.values());
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::factorization_failure, "Green table is not numerically positive definite");
  lower_ = llt.matrixL();
}

Field DenseSampler::sample(std::uint64_t seed) const {
  Stream stream{seed, tag_hash("dense")};
  Eigen::VectorXd z(lower_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = stream.normal();
  const Eigen::VectorXd interior = lower_.triangularView<Eigen::Lower>() * z;
  std::vector<double> values(domain_.site_count(), 0.0);
  Eigen::Index k = 0;
  for (int a = 2; a < domain_.n(); ++a)
    for (int b = 2; b < domain_.n(); ++b) values[domain_.index({a, b})] = interior[k++];
  return Field(domain_, std::move(values), Provenance::dense, seed);
}

Field sample_dense(const GridDomain& domain, const GreenTable& table, std::uint64_t seed) {
  if (!(table.domain() == domain)) throw Error(ErrorCode::precondition, "Green table built for another domain");
  return DenseSampler(table).sample(seed);
}

std::vector<double> sample_interior_field(int rows, int cols, Stream& stream) {
  std::vector<double> coeff(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int k = 0; k < rows; ++k)
    for (int l = 0; l < cols; ++l)
      coeff[static_cast<std::size_t>(k) * cols + l] =
          stream.normal() / std::sqrt(1.0 - walk_eigenvalue(k + 1, l + 1, rows, cols));
  orthonormal_dst2(coeff, rows, cols);
  return coeff;
}

Field sample_spectral(const GridDomain& domain, std::uint64_t seed) {
  Stream stream{seed, tag_hash("spectral")};
  const int m = domain.n() - 2;
  const auto interior = sample_interior_field(m, m, stream);
  std::vector<double> values(domain.site_count(), 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) values[domain.index({a + 2, b + 2})] = interior[static_cast<std::size_t>(a) * m + b];
  return Field(domain, std::move(values), Provenance::spectral, seed);
}

Eigen::MatrixXd spectral_covariance(const GridDomain& domain) {
  const int m = domain.n() - 2;
  // basis(k, i) = sqrt(2/(m+1)) sin(pi k i / (m+1)), 1-based k and i
  Eigen::MatrixXd basis(m, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      basis(k, i) = std::sqrt(2.0 / (m + 1)) * std::sin(std::numbers::pi * (k + 1) * (i + 1) / (m + 1));
  const auto size = static_cast<Eigen::Index>(m) * m;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(size, size);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      const double w2 = 1.0 / (1.0 - walk_eigenvalue(k + 1, l + 1, m, m));
      Eigen::VectorXd mode(size);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) mode[static_cast<Eigen::Index>(a) * m + b] = basis(k, a) * basis(l, b);
      cov.noalias() += w2 * mode * mode.transpose();
    }
  }
  return cov;
}

HarmonicExtension harmonic_extension(const Field& field, const Box& box) {
  const auto& domain = field.domain();
  check_box(domain, box);
  const int rows = box.height - 2, cols = box.width - 2;
  std::vector<double> rhs(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
  auto ring = [&](int a, int b) { return field({box.lo.x1 + a, box.lo.x2 + b}); };
  for (int a = 1; a <= rows; ++a) {
    for (int b = 1; b <= cols; ++b) {
      double s = 0.0;
      if (a == 1) s += ring(0, b);
      if (a == rows) s += ring(rows + 1, b);
      if (b == 1) s += ring(a, 0);
      if (b == cols) s += ring(a, cols + 1);
      rhs[static_cast<std::size_t>(a - 1) * cols + (b - 1)] = 0.25 * s;
    }
  }
  solve_dirichlet(rhs, rows, cols);
  HarmonicExtension out{box, std::move(rhs), {box, 0.0}};
  out.coarse.value = out.at(box.center());
  return out;
}

Field sample_conditional(const Field& field, const Box& box, std::uint64_t seed) {
  const auto ext = harmonic_extension(field, box);
  Stream stream{seed, tag_hash("conditional")};
  const int rows = box.height - 2, cols = box.width - 2;
  const auto fluct = sample_interior_field(rows, cols, stream);
  std::vector<double> values(field.values().begin(), field.values().end());
  const auto& domain = field.domain();
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) {
      const auto k = static_cast<std::size_t>(a) * cols + b;
      values[domain.index({box.lo.x1 + 1 + a, box.lo.x2 + 1 + b})] = ext.interior[k] + fluct[k];
    }
  const auto prov = field.provenance() == Provenance::chain || field.provenance() == Provenance::synthetic
                        ? field.provenance()
                        : Provenance::conditional;
  return Field(domain, std::move(values), prov, seed, field.sweep_count());
}

} // namespace gff
