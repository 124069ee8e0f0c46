#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gff/green.hpp"
#include "gff/lattice.hpp"
#include "gff/rng.hpp"

namespace gff {

enum class Provenance : std::uint32_t { dense = 0, spectral = 1, conditional = 2, chain = 3, synthetic = 4 };

std::string_view to_string(Provenance p);

/// One realization of a field over V_N, stored row-major. Immutable.
class Field {
public:
  Field(GridDomain domain, std::vector<double> values, Provenance provenance, std::uint64_t seed,
        std::int64_t sweep_count = 0);

  const GridDomain& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  double operator()(Point p) const { return values_[domain_.index(p)]; }
  double at(std::size_t index) const { return values_[index]; }

  Provenance provenance() const { return provenance_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t sweep_count() const { return sweep_count_; }

  /// -Phi, tagged synthetic.
  Field negated() const;

  /// Header (magic, N, l, provenance, seed, sweep count) then N*N doubles.
  void write(std::ostream& out) const;
  static Field read(std::istream& in);

private:
  GridDomain domain_;
  std::vector<double> values_;
  Provenance provenance_;
  std::uint64_t seed_;
  std::int64_t sweep_count_;
};

/// Precision of the field on int(V_N): identity minus the walk kernel.
/// Its inverse is G_N; the heat-bath conditionals and spectral weights use it.
Eigen::MatrixXd precision_matrix(const GridDomain& domain);

/// Exact sampler Phi_int = L z with G = L L^T, factorized once.
class DenseSampler {
public:
  explicit DenseSampler(const GreenTable& table);
  Field sample(std::uint64_t seed) const;

private:
  GridDomain domain_;
  Eigen::MatrixXd lower_;
};

Field sample_dense(const GridDomain& domain, const GreenTable& table, std::uint64_t seed);

/// Zero-boundary free field on a rows x cols interior, synthesized in the
/// Dirichlet sine basis with mode weights (1 - lambda_kl)^{-1/2}.
std::vector<double> sample_interior_field(int rows, int cols, Stream& stream);

Field sample_spectral(const GridDomain& domain, std::uint64_t seed);

/// Covariance implied by the spectral mode weights, evaluated by a direct
/// eigen-sum over all modes (no transform). Rows/cols follow interior_sites().
Eigen::MatrixXd spectral_covariance(const GridDomain& domain);

struct CoarseValue {
  Box box;
  double value = 0.0;
};

struct HarmonicExtension {
  Box box;
  /// (height-2) x (width-2) row-major values over int(box).
  std::vector<double> interior;
  CoarseValue coarse;

  double at(Point p) const {
    return interior[static_cast<std::size_t>(p.x1 - box.lo.x1 - 1) * static_cast<std::size_t>(box.width - 2) +
                    static_cast<std::size_t>(p.x2 - box.lo.x2 - 1)];
  }
};

/// Discrete-harmonic interpolation of the field's values on the ring of
/// `box`; coarse.value is the extension at box.center() (Phi_B).
HarmonicExtension harmonic_extension(const Field& field, const Box& box);

/// Copy of `field` with int(box) resampled from its conditional law given
/// the ring values: harmonic extension plus an independent zero-boundary
/// field on the box.
Field sample_conditional(const Field& field, const Box& box, std::uint64_t seed);

} // namespace gff
