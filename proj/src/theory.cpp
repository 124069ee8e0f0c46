#include "gff/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gff/error.hpp"

namespace gff::theory {

namespace {

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw Error(ErrorCode::domain_error, std::string(name) + " must lie in (0, 1)");
}

} // namespace

double g() { return 2.0 / std::numbers::pi; }

double f_h_beta(double h, double beta, double gamma) {
  require_open_unit(beta, "beta");
  if (!(gamma >= 0.0)) throw Error(ErrorCode::domain_error, "gamma must be nonnegative");
  if (!(h >= 0.0)) throw Error(ErrorCode::domain_error, "h must be nonnegative");
  const double t = 1.0 - gamma * (1.0 - beta);
  return gamma * gamma * (1.0 - beta) + h * t * t / beta;
}

double gamma_star(double beta) {
  require_open_unit(beta, "beta");
  return 2.0 / (2.0 - beta);
}

double gamma_plus(double alpha) {
  require_open_unit(alpha, "alpha");
  return 1.0 / alpha;
}

double tilt_constraint(double alpha, double beta, double gamma) {
  require_open_unit(alpha, "alpha");
  return 2.0 - 2.0 * beta - 2.0 * alpha * alpha * f_h_beta(0.0, beta, gamma);
}

double rho(double alpha, double beta) {
  const double gm = std::min(gamma_star(beta), gamma_plus(alpha));
  return 2.0 + 2.0 * beta - 2.0 * alpha * alpha * f_h_beta(2.0, beta, gm);
}

double rho_mean(double alpha, double beta) {
  require_open_unit(alpha, "alpha");
  return 2.0 + 2.0 * beta - 2.0 * alpha * alpha * f_h_beta(2.0, beta, gamma_star(beta));
}

std::vector<Prediction> predicted_exponents(const Params& p) {
  std::vector<Prediction> out;
  auto add = [&out](std::string name, std::string target, auto&& compute) {
    Prediction pr{std::move(name), std::move(target), std::nullopt, {}};
    try {
      pr.value = compute();
    } catch (const Error& e) {
      pr.note = e.what();
    }
    out.push_back(std::move(pr));
  };
  auto need = [](const std::optional<double>& v, const char* name) {
    if (!v) throw Error(ErrorCode::domain_error, std::string(name) + " not given");
    return *v;
  };
  auto eta_in = [&](double lo) {
    const double eta = need(p.eta, "eta");
    if (!(eta > lo && eta < 1.0))
      throw Error(ErrorCode::domain_error, lo < 0 ? "eta must lie in (-1, 1)" : "eta must lie in (0, 1)");
    return eta;
  };

  add("spike_width", "conditioned field: largest downward spike", [&] { return 0.5 - eta_in(0.0) / 2.0; });
  add("low_count", "conditioned field: number of low points", [&] {
    const double eta = eta_in(0.0);
    return 2.0 * (1.0 - eta * eta);
  });
  add("high_count", "number of eta-high points", [&] {
    const double eta = eta_in(0.0);
    return 2.0 * (1.0 - eta * eta);
  });
  add("disk_count", "high points in a disk of radius N^beta", [&] {
    const double alpha = need(p.alpha, "alpha"), beta = need(p.beta, "beta");
    require_open_unit(alpha, "alpha");
    require_open_unit(beta, "beta");
    if (!(alpha <= beta)) throw Error(ErrorCode::domain_error, "disk count needs alpha <= beta");
    return 2.0 * beta * (1.0 - (alpha / beta) * (alpha / beta));
  });
  add("disk_count_given_high", "high points near a high point", [&] {
    const double alpha = need(p.alpha, "alpha"), beta = need(p.beta, "beta");
    require_open_unit(alpha, "alpha");
    require_open_unit(beta, "beta");
    return 2.0 * beta * (1.0 - alpha * alpha);
  });
  add("high_square", "largest square above 2 sqrt(g) eta log N", [&] { return 0.5 - eta_in(-1.0) / 2.0; });
  add("rho", "pairs of alpha-high points within N^beta", [&] { return rho(need(p.alpha, "alpha"), need(p.beta, "beta")); });
  add("rho_mean", "mean number of such pairs",
      [&] { return rho_mean(need(p.alpha, "alpha"), need(p.beta, "beta")); });
  return out;
}

Lemma83 lemma83_coefficients(double alpha, double beta, double gamma) {
  require_open_unit(alpha, "alpha");
  require_open_unit(beta, "beta");
  if (!(gamma >= 0.0)) throw Error(ErrorCode::domain_error, "gamma must be nonnegative");
  Lemma83 out;
  out.a = 1.0 - gamma * (1.0 - beta);
  out.b = gamma * (2.0 - beta) - 2.0;
  const double core = 2.0 * out.a + out.b - out.a * out.b;
  out.variance_coeff = beta * core;

  const double f = 2.0 * out.a * out.a * (2.0 - beta) + out.b * out.b * (1.0 - beta) + 4.0 * (1.0 - beta) * out.a * out.b;
  const double scale = 1.0 + std::fabs(core) + std::fabs(f);
  if (std::fabs(f - out.variance_coeff) > 1e-12 * scale)
    throw Error(ErrorCode::identity_violation, "f(a, b, beta) != beta (2a + b - ab)");
  if (std::fabs(beta * f_h_beta(2.0, beta, gamma) - core) > 1e-12 * scale)
    throw Error(ErrorCode::identity_violation, "beta F_{2,beta}(gamma) != 2a + b - ab");
  return out;
}

std::pair<double, double> lemma81_interval(double alpha, double beta, double epsilon, double n) {
  const double c = 2.0 * std::sqrt(g()) * std::log(n);
  return {c * (alpha * (1.0 - beta) - epsilon), c * (alpha * (1.0 - beta) + epsilon)};
}

} // namespace gff::theory
