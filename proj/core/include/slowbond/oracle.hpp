#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slowbond/lattice.hpp"
#include "slowbond/profiles.hpp"
#include "slowbond/report.hpp"

// Exhaustive state-space computations for small tori. Configurations are
// indexed by their occupancy read as a binary integer, site 0 least
// significant.

namespace slowbond {

/// Largest torus for which the generator matrix is built.
inline constexpr std::size_t kMatrixSiteCap = 16;
/// Largest torus for routines that enumerate pairs of configurations.
inline constexpr std::size_t kPairSiteCap = 12;

void require_matrix_cap(const LatticeSpec& spec);

/// Probability vector over all 2^(nk) configurations.
class DistributionVector {
 public:
  DistributionVector() = default;
  /// Throws DomainError unless entries are >= 0 and sum to 1 within 1e-12.
  DistributionVector(std::size_t sites, std::vector<double> probabilities);

  static DistributionVector point_mass(std::size_t sites, std::uint64_t index);

  std::size_t sites() const { return sites_; }
  std::size_t states() const { return p_.size(); }
  const std::vector<double>& probabilities() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }

  /// Probability that site x is occupied.
  double occupation(Site x) const;

 private:
  std::size_t sites_ = 0;
  std::vector<double> p_;
};

/// Independent Bernoulli occupations with parameters in (0,1).
class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<double> site_params);

  const std::vector<double>& site_params() const { return params_; }
  std::size_t sites() const { return params_.size(); }
  double probability(std::uint64_t index) const;
  /// Dense vector of probabilities over all configurations.
  std::vector<double> to_vector() const;
  DistributionVector to_distribution() const;

 private:
  std::vector<double> params_;
};

/// Constant parameter 1/2: the reversible invariant measure.
ProductMeasure uniform_measure(const LatticeSpec& spec);
/// Site x gets gamma(x / nk): the initial law of the process.
ProductMeasure initial_product_measure(const LatticeSpec& spec, const Profile& gamma);

using GeneratorMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Unaccelerated generator: Q[eta, eta^{x,x+1}] += xi_{x,x+1} for each
/// bond that changes eta; diagonal = minus the row sum.
GeneratorMatrix build_generator_matrix(const LatticeSpec& spec);

/// mu_0 exp(t * speedup * Q) by uniformization over sub-intervals; total
/// variation error below `tv_tolerance`.
DistributionVector evolve_master(const LatticeSpec& spec, const TimeScaleRegime& regime,
                                 const DistributionVector& mu0, double t,
                                 double tv_tolerance = 1e-12);
DistributionVector evolve_master(const GeneratorMatrix& q, double speedup,
                                 const DistributionVector& mu0, double t,
                                 double tv_tolerance = 1e-12);

/// D(g; nu) = sum_eta nu(eta) sum_x xi_{x,x+1} [g(eta^{x,x+1}) - g(eta)]^2.
double dirichlet_form(const LatticeSpec& spec, std::span<const double> g,
                      std::span<const double> nu);
double dirichlet_form(const LatticeSpec& spec, std::span<const double> g,
                      const ProductMeasure& nu);
/// D_{x,x+1}(g; nu) per bond, without the conductance factor.
std::vector<double> dirichlet_form_per_bond(const LatticeSpec& spec, std::span<const double> g,
                                            std::span<const double> nu);

/// H(mu | nu) = sum mu log(mu / nu) with 0 log 0 = 0. DomainError if mu is
/// not absolutely continuous with respect to nu.
double relative_entropy(std::span<const double> mu, std::span<const double> nu);
double relative_entropy(const DistributionVector& mu, const DistributionVector& nu);
double relative_entropy(const DistributionVector& mu, const ProductMeasure& nu);

/// Product measure with parameter rho_t(i/k) on box i, rho_t the Fourier
/// solution of the continuous heat equation started at gamma.
ProductMeasure reference_measure(const LatticeSpec& spec, const Profile& gamma, double t,
                                 double alpha);

/// w(x) = (eta(x) - p_x) / (p_x (1 - p_x)).
std::vector<double> w_field(const Configuration& eta, const ProductMeasure& nu);

/// Adjoint of the generator with respect to nu applied to the constant 1,
/// from the summation-by-parts formula in w.
std::vector<double> adjoint_one_formula(const LatticeSpec& spec, const ProductMeasure& nu);
/// Same quantity from the matrix: (Q^T nu)(eta) / nu(eta).
std::vector<double> adjoint_one_matrix(const LatticeSpec& spec, const ProductMeasure& nu);
/// Formula route, cross-checked against the matrix route; throws
/// ConsistencyError if they differ by more than `tolerance`.
std::vector<double> adjoint_one(const LatticeSpec& spec, const ProductMeasure& nu,
                                double tolerance = 1e-9);

/// log Psi_t(eta) = log(nu_t(eta) / nu^n(eta)).
std::vector<double> log_psi(const LatticeSpec& spec, const Profile& gamma, double t,
                            double alpha);
/// d/dt log Psi_t = sum_x w_t(x) d/dt rho_t(m(x)), with the time derivative
/// alpha * rho_t'' taken mode-wise from the Fourier solution.
std::vector<double> log_psi_derivative(const LatticeSpec& spec, const Profile& gamma, double t,
                                       double alpha);

/// Largest dt accepted by yau_inequality_check: speedup * dt <= 1e-3.
double max_yau_dt(const LatticeSpec& spec, const TimeScaleRegime& regime);

/// Certifies dH(mu_t|nu_t)/dt <= -S D(sqrt f_t; nu_t) + int (S L*1 -
/// d/dt log Psi_t) f_t dnu_t at time t. The derivative is a central
/// difference (one-sided second-order at t < dt); the slack is 1e-4 plus the
/// difference between step dt and step 2 dt estimates. mu_0 defaults to the
/// initial product measure of gamma.
Report yau_inequality_check(const LatticeSpec& spec, const TimeScaleRegime& regime,
                            const Profile& gamma, double t, double dt,
                            const std::optional<DistributionVector>& mu0 = std::nullopt);

/// Evaluates the two boundary-replacement integrals and the slow-bond w*w
/// integral at time t under the critical time scale, together with the
/// Laplacian discretization remainder, and checks that they sum to
/// int (S L*1 - d/dt log Psi_t) f_t dnu_t.
Report entropy_production_decomposition(const LatticeSpec& spec, const Profile& gamma, double t);

/// Exact H(mu^n | nu_0^n) against the bound nk * (kappa / eps0) / k.
Report initial_entropy_bound_check(const LatticeSpec& spec, const Profile& gamma);

/// Invariance of nu^n (max |nu Q|) and detailed balance over all pairs.
Report invariance_check(const LatticeSpec& spec);

}  // namespace slowbond
