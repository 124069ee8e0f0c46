#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gff::theory {

/// g = 2/pi.
double g();

/// F_{h,beta}(gamma) = gamma^2 (1 - beta) + h (1 - gamma (1 - beta))^2 / beta.
double f_h_beta(double h, double beta, double gamma);

/// Unconstrained minimizer 2 / (2 - beta) of F_{2,beta}.
double gamma_star(double beta);

/// Largest admissible tilt, 1 / alpha.
double gamma_plus(double alpha);

/// 2 - 2 beta - 2 alpha^2 F_{0,beta}(gamma); the admissible set is where this is >= 0.
double tilt_constraint(double alpha, double beta, double gamma);

/// Pair exponent: 2 + 2 beta - 2 alpha^2 F_{2,beta}(min(gamma*, gamma+)).
double rho(double alpha, double beta);

/// Mean pair exponent: 2 + 2 beta - 2 alpha^2 gamma*(beta).
double rho_mean(double alpha, double beta);

struct Params {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> eta;
  std::optional<double> gamma;
  std::optional<double> h;
};

struct Prediction {
  std::string name;    // e.g. "high_count"
  std::string target;  // result the exponent belongs to
  std::optional<double> value;
  std::string note;    // empty, or why the value is absent
};

/// Every exponent the parameters allow: spike width, low count, high count,
/// disk count, conditional disk count, maximal high square, rho, rho_mean.
std::vector<Prediction> predicted_exponents(const Params& params);

struct Lemma83 {
  double a = 0.0;
  double b = 0.0;
  double variance_coeff = 0.0; // beta (2a + b - ab)
};

/// a = 1 - gamma (1 - beta), b = gamma (2 - beta) - 2; checks
/// 2a^2(2-beta) + b^2(1-beta) + 4(1-beta)ab = beta (2a + b - ab) and
/// beta F_{2,beta}(gamma) = 2a + b - ab, throwing identity_violation otherwise.
Lemma83 lemma83_coefficients(double alpha, double beta, double gamma);

/// [b-, b+] = 2 sqrt(g) (alpha (1 - beta) -/+ epsilon) log N.
std::pair<double, double> lemma81_interval(double alpha, double beta, double epsilon, double n);

} // namespace gff::theory
