#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "slowbond/report.hpp"

namespace slowbond {

/// A distribution with finitely many atoms.
struct FiniteDistribution {
  std::vector<double> values;
  std::vector<double> weights;  // nonnegative, summing to 1

  double mean() const;
  /// log E[exp(theta (X - EX))], computed with a log-sum-exp.
  double centered_log_mgf(double theta) const;
};

struct MGFReport {
  std::vector<double> theta_grid;
  std::vector<double> lhs;
  std::vector<double> bound;
  double margin = 0.0;  // min over the grid of bound - lhs

  bool passed() const { return margin >= 0.0; }
  Report to_report(const std::string& title) const;
};

/// 41 points on [-4, 4]: zero plus 20 log-spaced magnitudes in [1e-3, 4]
/// with both signs.
std::vector<double> default_theta_grid();

/// Centered log-MGF against theta^2 / 8. DomainError if the support leaves
/// [0, 1].
MGFReport hoeffding_check(const FiniteDistribution& dist,
                          std::span<const double> theta_grid);

/// Subgaussian order of w(B) = prod_{x in B} w(x) with w(x) = (eta(x) -
/// rho) / (rho (1 - rho)) under Bernoulli(rho) sites.
double w_order(double epsilon0, std::size_t set_size);

/// Exact 2^|B| enumeration of the log-MGF of w(B) against
/// sigma^2 theta^2 / 2 with sigma^2 = w_order(eps0, |B|).
MGFReport w_subgaussian_check(double rho, double epsilon0, std::size_t set_size,
                              std::span<const double> theta_grid);

struct ProductBound {
  double value = 0.0;       // E[exp(gamma X1 X2)]
  double halfwidth = 0.0;   // CI halfwidth, 0 for exact evaluations
  double limit = 3.0;
  bool passed() const { return value + halfwidth <= limit; }
};

/// E[exp(gamma X1 X2)] for jointly Gaussian X1, X2 with standard
/// deviations s1, s2 and correlation r (closed form).
ProductBound gaussian_product_mgf(double s1, double s2, double r, double gamma);
/// Exact expectation for a finite joint law {(x1, x2, weight)}.
ProductBound finite_product_mgf(const std::vector<std::array<double, 3>>& joint, double gamma);
/// Monte Carlo with `samples` draws of independent N(0, s1^2) x N(0, s2^2),
/// 99.9% normal CI.
ProductBound monte_carlo_product_mgf(double s1, double s2, double gamma, std::size_t samples,
                                     std::uint64_t seed);

/// Gaussian closed forms (independent and correlated), two-point pairs and
/// a Monte Carlo cross-check. UsageError unless 0 <= gamma <= 1 / (4 s1 s2).
Report subgaussian_product_check(double s1, double s2, double gamma,
                                 std::size_t mc_samples = 1000000, std::uint64_t seed = 1);

/// X_i = sum_{j < width} w(i + j mod sites) over independent Bernoulli(rho)
/// sites; the family is ell-dependent with ell = width. Checks sum f_i X_i
/// against order 2 ell sum sigma_i^2 f_i^2 by exact enumeration, plus the
/// entropy inequality E_mu[F] <= H(mu | nu) + log E_nu[e^F] for a family
/// of tilted measures mu.
Report ell_dependent_sum_check(std::size_t sites, std::size_t width, double rho,
                               std::span<const double> f, std::span<const double> theta_grid);

/// Normal-approximation CI: (mean, z(level) * sd / sqrt(R)).
std::pair<double, double> confidence_interval(std::span<const double> samples, double level);

/// The full battery of concentration checks run by `slowbond check`.
Report appendix_suite(std::uint64_t seed, std::size_t mc_samples = 1000000);

}  // namespace slowbond
