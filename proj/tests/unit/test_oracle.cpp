#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slowbond/errors.hpp"
#include "slowbond/measures.hpp"
#include "slowbond/oracle.hpp"
#include "slowbond/pde.hpp"
#include "slowbond/simulator.hpp"

using namespace slowbond;

namespace {

std::vector<double> random_probabilities(std::size_t states, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.01, 1.0);
  std::vector<double> p(states);
  double s = 0.0;
  for (auto& v : p) s += (v = U(rng));
  for (auto& v : p) v /= s;
  return p;
}

double expect(const std::vector<double>& f, const std::vector<double>& nu) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * nu[i];
  return s;
}

}  // namespace

TEST(GeneratorMatrix, TwoSiteRates) {
  const auto q = build_generator_matrix(LatticeSpec(2, 1, 1.0, 1.0));
  // states 01 (index 1) and 10 (index 2)
  EXPECT_DOUBLE_EQ(q.coeff(1, 2), 1.5);
  EXPECT_DOUBLE_EQ(q.coeff(2, 1), 1.5);
  EXPECT_DOUBLE_EQ(q.coeff(1, 1), -1.5);
  EXPECT_DOUBLE_EQ(q.coeff(0, 0), 0.0);
}

TEST(GeneratorMatrix, RowSumsZeroAndSymmetric) {
  const auto q = build_generator_matrix(LatticeSpec(3, 2, 0.8, 1.5));
  const Eigen::MatrixXd dense(q);
  for (Eigen::Index i = 0; i < dense.rows(); ++i) EXPECT_NEAR(dense.row(i).sum(), 0.0, 1e-15);
  EXPECT_EQ((dense - dense.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GeneratorMatrix, CapEnforced) {
  EXPECT_THROW(build_generator_matrix(LatticeSpec(9, 2, 1.0, 1.5)), ResourceError);
}

TEST(EvolveMaster, UniformIsInvariant) {
  const LatticeSpec spec(3, 2, 1.0, 1.5);
  const auto nu = uniform_measure(spec).to_distribution();
  const auto out = evolve_master(spec, Critical{}, nu, 0.2);
  for (std::size_t i = 0; i < out.states(); ++i) EXPECT_NEAR(out[i], nu[i], 1e-12);
}

TEST(EvolveMaster, TwoStateClosedForm) {
  // one particle on two sites: P(site 0) = 1/2 + 1/2 exp(-2 * 1.5 * S t)
  const LatticeSpec spec(2, 1, 1.0, 1.0);
  const double S = speedup_factor(spec, Critical{});
  for (double t : {0.0, 0.01, 0.1, 1.0}) {
    const auto mu = evolve_master(spec, Critical{}, DistributionVector::point_mass(2, 1), t);
    EXPECT_NEAR(mu.occupation(0), 0.5 + 0.5 * std::exp(-3.0 * S * t), 1e-12);
    double total = 0.0;
    for (double p : mu.probabilities()) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(EvolveMaster, TinyStepMatchesFirstOrder) {
  const LatticeSpec spec(2, 2, 1.0, 1.5);
  const auto q = build_generator_matrix(spec);
  const double S = speedup_factor(spec, Critical{});
  const double dt = 1e-9;
  const auto mu0 = DistributionVector::point_mass(4, 0b0011);
  const auto mu = evolve_master(spec, Critical{}, mu0, dt);
  const Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(mu0.probabilities().data(), 16);
  const Eigen::VectorXd drift = Eigen::VectorXd(q.transpose() * p0) * (S * dt);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(mu[i], p0[i] + drift[i], 1e-12);
}

TEST(DistributionVector, Validation) {
  EXPECT_THROW(DistributionVector(1, {0.5, 0.6}), DomainError);
  EXPECT_THROW(DistributionVector(1, {1.1, -0.1}), DomainError);
  EXPECT_NO_THROW(DistributionVector(1, {0.25, 0.75}));
}

TEST(DirichletForm, Examples) {
  const LatticeSpec spec(2, 1, 1.0, 1.0);
  const auto nu = uniform_measure(spec);
  std::vector<double> g(4, 0.0);
  g[1] = 1.0;  // site 0 occupied, site 1 empty
  EXPECT_NEAR(dirichlet_form(spec, g, nu), 0.75, 1e-15);
  EXPECT_EQ(dirichlet_form(spec, std::vector<double>(4, 2.0), nu), 0.0);
}

TEST(DirichletForm, NonNegativeAndPerBondSum) {
  const LatticeSpec spec(3, 2, 0.5, 1.5);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> g(64);
    for (auto& v : g) v = N(rng);
    const auto nu = random_probabilities(64, rng);
    const double d = dirichlet_form(spec, g, nu);
    EXPECT_GE(d, 0.0);
    const auto per = dirichlet_form_per_bond(spec, g, nu);
    double s = 0.0;
    for (Site x = 0; x < 6; ++x) s += conductance(spec, x) * per[x];
    EXPECT_NEAR(s, d, 1e-12 * std::max(1.0, d));
  }
}

TEST(RelativeEntropy, Examples) {
  const LatticeSpec spec(2, 2, 1.0, 1.5);
  const auto nu = uniform_measure(spec);
  EXPECT_NEAR(relative_entropy(DistributionVector::point_mass(4, 5), nu), 4 * std::log(2.0), 1e-12);
  const auto d = nu.to_distribution();
  EXPECT_NEAR(relative_entropy(d, d), 0.0, 1e-15);
  EXPECT_THROW(relative_entropy(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}),
               DomainError);
}

TEST(RelativeEntropy, GibbsInequality) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_probabilities(16, rng), nu = random_probabilities(16, rng);
    EXPECT_GT(relative_entropy(mu, nu), 0.0);
  }
}

TEST(RelativeEntropy, HTheoremAgainstUniform) {
  const LatticeSpec spec(3, 2, 1.0, 1.5);
  const auto nu = uniform_measure(spec);
  auto mu = initial_product_measure(spec, sine_profile(0.5, 0.3)).to_distribution();
  double last = relative_entropy(mu, nu);
  for (int i = 0; i < 10; ++i) {
    mu = evolve_master(spec, Critical{}, mu, 0.005);
    const double h = relative_entropy(mu, nu);
    EXPECT_LE(h, last + 1e-12);
    last = h;
  }
}

TEST(ReferenceMeasure, Examples) {
  const LatticeSpec spec(3, 4, 1.0, 1.5);
  const ProductMeasure flat = reference_measure(spec, constant_profile(0.3), 0.1, 1.0);
  for (double p : flat.site_params()) EXPECT_NEAR(p, 0.3, 1e-12);
  const Profile gamma = sine_profile(0.5, 0.25);
  const auto at0 = reference_measure(spec, gamma, 0.0, 1.0).site_params();
  for (Site x = 0; x < 12; ++x) EXPECT_NEAR(at0[x], gamma((x / 3) / 4.0), 1e-12);
  const auto later = reference_measure(spec, gamma, 0.02, 1.0).site_params();
  const FourierOnT rho = solve_continuous_heat(gamma, 1.0, 0.02);
  for (Site x = 0; x < 12; ++x) EXPECT_NEAR(later[x], evaluate(rho, (x / 3) / 4.0), 1e-12);
}

TEST(WField, Examples) {
  const ProductMeasure half(std::vector<double>(4, 0.5));
  const auto w = w_field(Configuration::from_index(4, 0b0101), half);
  EXPECT_EQ(w, (std::vector<double>{2, -2, 2, -2}));
  EXPECT_THROW(ProductMeasure(std::vector<double>{0.0, 0.5}), DomainError);
}

TEST(WField, CenteredWithKnownVariance) {
  const ProductMeasure nu(std::vector<double>{0.2, 0.35, 0.7});
  double m[3] = {0, 0, 0}, v[3] = {0, 0, 0};
  for (std::uint64_t idx = 0; idx < 8; ++idx) {
    const auto w = w_field(Configuration::from_index(3, idx), nu);
    for (int x = 0; x < 3; ++x) {
      m[x] += nu.probability(idx) * w[x];
      v[x] += nu.probability(idx) * w[x] * w[x];
    }
  }
  for (int x = 0; x < 3; ++x) {
    const double p = nu.site_params()[x];
    EXPECT_NEAR(m[x], 0.0, 1e-14);
    EXPECT_NEAR(v[x], 1.0 / (p * (1 - p)), 1e-12);
  }
}

TEST(AdjointOne, ConstantParametersGiveZero) {
  const LatticeSpec spec(3, 2, 1.0, 1.5);
  for (double v : adjoint_one(spec, ProductMeasure(std::vector<double>(6, 0.3))))
    EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(AdjointOne, FormulaMatchesMatrixAndIsCentered) {
  const LatticeSpec spec(2, 2, 1.0, 1.5);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (int trial = 0; trial < 25; ++trial) {
    const double p = U(rng), q = U(rng);
    const ProductMeasure nu(std::vector<double>{p, p, q, q});
    const auto f = adjoint_one_formula(spec, nu), m = adjoint_one_matrix(spec, nu);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], m[i], 1e-10);
    EXPECT_NEAR(expect(f, nu.to_vector()), 0.0, 1e-12);
  }
}

TEST(LogPsiDerivative, ConstantProfileAndCentering) {
  const LatticeSpec spec(2, 3, 1.0, 1.5);
  for (double v : log_psi_derivative(spec, constant_profile(0.4), 0.05, 1.0)) EXPECT_NEAR(v, 0.0, 1e-12);
  const Profile gamma = bump_profile(0.25, 0.5, 0.4, 1.5);
  const auto d = log_psi_derivative(spec, gamma, 0.02, 1.0);
  EXPECT_NEAR(expect(d, reference_measure(spec, gamma, 0.02, 1.0).to_vector()), 0.0, 1e-12);
}

TEST(LogPsiDerivative, MatchesFiniteDifference) {
  const LatticeSpec spec(2, 3, 1.0, 1.5);
  const Profile gamma = bump_profile(0.25, 0.5, 0.4, 1.5);
  const double t = 0.01, h = 1e-6;
  const auto d = log_psi_derivative(spec, gamma, t, 1.0);
  const auto up = log_psi(spec, gamma, t + h, 1.0), down = log_psi(spec, gamma, t - h, 1.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    EXPECT_NEAR(d[i], (up[i] - down[i]) / (2 * h), 1e-6 * std::max(1.0, std::abs(d[i])));
}

TEST(Yau, IdentityDensityAtTimeZero) {
  const LatticeSpec spec(4, 2, 1.0, 1.5);
  const Profile gamma = bump_profile(0.25, 0.5, 0.3, 2.0);
  const auto nu0 = reference_measure(spec, gamma, 0.0, 1.0).to_distribution();
  const Report r = yau_inequality_check(spec, Critical{}, gamma, 0.0, max_yau_dt(spec, Critical{}), nu0);
  EXPECT_NEAR(r.get("entropy"), 0.0, 1e-14);
  EXPECT_NEAR(r.get("dirichlet"), 0.0, 1e-14);
  EXPECT_NEAR(r.get("rhs"), 0.0, 1e-9);
  EXPECT_TRUE(r.all_passed());
}

TEST(Yau, HoldsAlongBothRegimes) {
  const LatticeSpec spec(4, 2, 1.0, 1.5);
  for (const Profile& gamma : {sine_profile(0.5, 0.25), bump_profile(0.25, 0.5, 0.3, 2.0)}) {
    for (const TimeScaleRegime& regime : {TimeScaleRegime{Critical{}}, make_subcritical(0.5)}) {
      for (double t : {0.01, 0.1, 0.5}) {
        const Report r = yau_inequality_check(spec, regime, gamma, t, max_yau_dt(spec, regime));
        EXPECT_TRUE(r.all_passed()) << gamma.name() << " t=" << t << " margin " << r.get("margin");
      }
    }
  }
}

TEST(Yau, RejectsOversizedStep) {
  const LatticeSpec spec(4, 2, 1.0, 1.5);
  EXPECT_THROW(yau_inequality_check(spec, Critical{}, sine_profile(0.5, 0.25), 0.1, 1e-2), UsageError);
}

TEST(Decomposition, ConstantProfileVanishes) {
  const Report r = entropy_production_decomposition(LatticeSpec(4, 2, 1.0, 1.5), constant_profile(0.4), 0.05);
  for (const char* key : {"boundary_left", "boundary_right", "slow_bond_ww", "laplacian_remainder", "direct"})
    EXPECT_NEAR(r.get(key), 0.0, 1e-12) << key;
}

TEST(Decomposition, SumIdentityAndSign) {
  const LatticeSpec spec(4, 2, 1.0, 1.5);
  const Profile gamma = bump_profile(0.25, 0.5, 0.3, 2.0);
  for (double t : {0.01, 0.05}) {
    const Report r = entropy_production_decomposition(spec, gamma, t);
    EXPECT_TRUE(r.all_passed());
    EXPECT_NEAR(r.get("slow_bond_ww"), r.get("slow_bond_ww_closed_form"), 1e-9);
  }
}

TEST(InitialEntropy, Examples) {
  const Report flat = initial_entropy_bound_check(LatticeSpec(4, 2, 1.0, 1.5), constant_profile(0.4));
  EXPECT_NEAR(flat.get("entropy"), 0.0, 1e-14);
  EXPECT_TRUE(flat.all_passed());
  const Profile sine = sine_profile(0.5, 0.25);
  const Report r = initial_entropy_bound_check(LatticeSpec(4, 2, 1.0, 1.5), sine);
  EXPECT_TRUE(r.all_passed());
  EXPECT_NEAR(r.get("bound"), 4.0 * sine.kappa() / sine.epsilon0(), 1e-12);
}

TEST(InitialEntropy, ScalesLinearlyInN) {
  const Profile gamma = bump_profile(0.25, 0.5, 0.3, 2.0);
  std::vector<double> per_n;
  for (std::size_t n : {2u, 3u, 4u})
    per_n.push_back(initial_entropy_bound_check(LatticeSpec(n, 2, 1.0, 1.5), gamma).get("entropy") / n);
  for (double v : per_n) {
    EXPECT_LE(v, 2.0 * per_n.front());
    EXPECT_GE(v, 0.5 * per_n.front());
  }
}

TEST(Invariance, UniformMeasure) {
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {4, 3}, {6, 2}}) {
    const Report r = invariance_check(LatticeSpec(n, k, 1.7, 1.5));
    EXPECT_TRUE(r.all_passed()) << n << "x" << k;
    EXPECT_LE(r.get("max_abs_nu_Q"), 1e-12);
  }
}
