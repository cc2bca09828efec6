#include "slowbond/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "slowbond/errors.hpp"
#include "slowbond/rng.hpp"

namespace slowbond {

namespace {

double log_sum_exp(std::span<const double> logs, std::span<const double> weights) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logs.size(); ++i)
    if (weights[i] > 0.0) top = std::max(top, logs[i]);
  // normalized by the total weight so that theta = 0 gives exactly 0
  double acc = 0.0, total = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i)
    if (weights[i] > 0.0) {
      acc += weights[i] * std::exp(logs[i] - top);
      total += weights[i];
    }
  return top + std::log(acc / total);
}

MGFReport compare(std::span<const double> grid, const std::vector<double>& lhs,
                  const std::vector<double>& bound) {
  MGFReport r;
  r.theta_grid.assign(grid.begin(), grid.end());
  r.lhs = lhs;
  r.bound = bound;
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lhs.size(); ++i) r.margin = std::min(r.margin, bound[i] - lhs[i]);
  if (lhs.empty()) r.margin = 0.0;
  return r;
}

// Hoeffding order of a variable confined to an interval of length L.
double interval_order(double length) { return length * length / 4.0; }

// Joint law of (w(0), ..., w(sites-1)) under i.i.d. Bernoulli(rho), as
// values per outcome with the outcome weight.
struct SiteEnumeration {
  std::vector<std::vector<double>> w;
  std::vector<double> weight;
};

SiteEnumeration enumerate_sites(std::size_t sites, double rho) {
  if (sites > 16) throw ResourceError("enumeration limited to 16 sites");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
  const double up = 1.0 / rho, down = -1.0 / (1.0 - rho);
  SiteEnumeration e;
  const std::size_t outcomes = std::size_t{1} << sites;
  e.w.resize(outcomes, std::vector<double>(sites));
  e.weight.resize(outcomes);
  for (std::size_t idx = 0; idx < outcomes; ++idx) {
    double p = 1.0;
    for (std::size_t x = 0; x < sites; ++x) {
      const bool occ = (idx >> x) & 1u;
      e.w[idx][x] = occ ? up : down;
      p *= occ ? rho : 1.0 - rho;
    }
    e.weight[idx] = p;
  }
  return e;
}

}  // namespace

double FiniteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += weights[i] * values[i];
  return m;
}

double FiniteDistribution::centered_log_mgf(double theta) const {
  const double m = mean();
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) logs[i] = theta * (values[i] - m);
  return log_sum_exp(logs, weights);
}

Report MGFReport::to_report(const std::string& title) const {
  Report r(title);
  r.add("grid_points", static_cast<double>(theta_grid.size()));
  r.add("margin", margin);
  r.add_check("holds", passed());
  return r;
}

std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  constexpr int kHalf = 20;
  const double lo = std::log(1e-3), hi = std::log(4.0);
  for (int i = kHalf - 1; i >= 0; --i)
    grid.push_back(-std::exp(lo + (hi - lo) * i / (kHalf - 1)));
  grid.push_back(0.0);
  for (int i = 0; i < kHalf; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / (kHalf - 1)));
  return grid;
}

MGFReport hoeffding_check(const FiniteDistribution& dist, std::span<const double> theta_grid) {
  if (dist.values.size() != dist.weights.size() || dist.values.empty())
    throw UsageError("hoeffding_check: values and weights must be nonempty and equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < dist.values.size(); ++i) {
    if (!(dist.values[i] >= 0.0 && dist.values[i] <= 1.0))
      throw DomainError("hoeffding_check: support must lie in [0,1]");
    if (!(dist.weights[i] >= 0.0)) throw DomainError("hoeffding_check: negative weight");
    total += dist.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("hoeffding_check: weights must sum to 1");
  std::vector<double> lhs, bound;
  for (double th : theta_grid) {
    lhs.push_back(dist.centered_log_mgf(th));
    bound.push_back(th * th / 8.0);
  }
  return compare(theta_grid, lhs, bound);
}

double w_order(double epsilon0, std::size_t set_size) {
  return std::pow(2.0 / epsilon0, 2.0 * static_cast<double>(set_size));
}

MGFReport w_subgaussian_check(double rho, double epsilon0, std::size_t set_size,
                              std::span<const double> theta_grid) {
  if (!(epsilon0 > 0.0 && epsilon0 < 0.5)) throw DomainError("epsilon0 must lie in (0, 1/2)");
  if (rho < epsilon0 || rho > 1.0 - epsilon0)
    throw DomainError("w_subgaussian_check: rho must lie in [eps0, 1 - eps0]");
  if (set_size == 0) throw UsageError("w_subgaussian_check: empty set");
  const SiteEnumeration e = enumerate_sites(set_size, rho);
  FiniteDistribution d;
  for (std::size_t idx = 0; idx < e.weight.size(); ++idx) {
    double prod = 1.0;
    for (double v : e.w[idx]) prod *= v;
    d.values.push_back(prod);
    d.weights.push_back(e.weight[idx]);
  }
  const double sigma2 = w_order(epsilon0, set_size);
  std::vector<double> lhs, bound;
  for (double th : theta_grid) {
    lhs.push_back(d.centered_log_mgf(th));
    bound.push_back(sigma2 * th * th / 2.0);
  }
  return compare(theta_grid, lhs, bound);
}

ProductBound gaussian_product_mgf(double s1, double s2, double r, double gamma) {
  const double g = gamma * s1 * s2;
  const double det = (1.0 - g * r) * (1.0 - g * r) - g * g;
  if (!(det > 0.0)) throw DomainError("gaussian_product_mgf: expectation is infinite");
  return {1.0 / std::sqrt(det), 0.0, 3.0};
}

ProductBound finite_product_mgf(const std::vector<std::array<double, 3>>& joint, double gamma) {
  double total = 0.0, acc = 0.0;
  for (const auto& [x1, x2, w] : joint) {
    total += w;
    acc += w * std::exp(gamma * x1 * x2);
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("finite_product_mgf: weights must sum to 1");
  return {acc, 0.0, 3.0};
}

ProductBound monte_carlo_product_mgf(double s1, double s2, double gamma, std::size_t samples,
                                     std::uint64_t seed) {
  if (samples < 2) throw UsageError("monte_carlo_product_mgf: need at least 2 samples");
  Rng rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> vals(samples);
  for (auto& v : vals) v = std::exp(gamma * s1 * z(rng) * s2 * z(rng));
  const auto [mean, half] = confidence_interval(vals, 0.999);
  return {mean, half, 3.0};
}

Report subgaussian_product_check(double s1, double s2, double gamma, std::size_t mc_samples,
                                 std::uint64_t seed) {
  if (!(s1 > 0.0 && s2 > 0.0)) throw UsageError("subgaussian_product_check: orders must be positive");
  const double cap = 1.0 / (4.0 * s1 * s2);
  if (!(gamma >= 0.0) || gamma > cap * (1.0 + 1e-12))
    throw UsageError("subgaussian_product_check: gamma must lie in [0, 1/(4 s1 s2)]");
  Report r("subgaussian-product");
  auto record = [&](const std::string& name, const ProductBound& b) {
    r.add(name + ".value", b.value);
    if (b.halfwidth > 0.0) r.add(name + ".halfwidth", b.halfwidth);
    r.add_check(name + ".le_3", b.passed());
  };
  record("zero", finite_product_mgf({{0.0, s2, 0.5}, {0.0, -s2, 0.5}}, gamma));
  const ProductBound indep = gaussian_product_mgf(s1, s2, 0.0, gamma);
  record("gaussian_independent", indep);
  for (double rho : {-1.0, -0.5, 0.5, 1.0})
    record("gaussian_corr_" + std::to_string(static_cast<int>(rho * 10)),
           gaussian_product_mgf(s1, s2, rho, gamma));
  // symmetric two-point variables +-s are subgaussian of order s^2
  record("two_point_independent",
         finite_product_mgf({{s1, s2, 0.25}, {s1, -s2, 0.25}, {-s1, s2, 0.25}, {-s1, -s2, 0.25}},
                            gamma));
  record("two_point_equal", finite_product_mgf({{s1, s2, 0.5}, {-s1, -s2, 0.5}}, gamma));
  if (mc_samples >= 2) {
    const ProductBound mc = monte_carlo_product_mgf(s1, s2, gamma, mc_samples, seed);
    record("monte_carlo_independent", mc);
    r.add_check("monte_carlo_matches_closed_form",
                std::abs(mc.value - indep.value) <= mc.halfwidth);
  }
  return r;
}

Report ell_dependent_sum_check(std::size_t sites, std::size_t width, double rho,
                               std::span<const double> f, std::span<const double> theta_grid) {
  if (sites == 0 || sites > 12) throw UsageError("ell_dependent_sum_check: need 1..12 sites");
  if (width == 0 || width > sites) throw UsageError("ell_dependent_sum_check: bad width");
  if (f.size() != sites) throw UsageError("ell_dependent_sum_check: one weight per variable");
  const SiteEnumeration e = enumerate_sites(sites, rho);
  const double site_order = interval_order(1.0 / rho + 1.0 / (1.0 - rho));
  const double var_order = static_cast<double>(width) * site_order;
  const std::size_t ell = width;

  std::vector<double> sums(e.weight.size());
  for (std::size_t idx = 0; idx < e.weight.size(); ++idx) {
    double s = 0.0;
    for (std::size_t i = 0; i < sites; ++i) {
      double xi = 0.0;
      for (std::size_t j = 0; j < width; ++j) xi += e.w[idx][(i + j) % sites];
      s += f[i] * xi;
    }
    sums[idx] = s;
  }
  double f2 = 0.0;
  for (double v : f) f2 += v * v;
  const double order = 2.0 * static_cast<double>(ell) * var_order * f2;

  FiniteDistribution d{sums, e.weight};
  std::vector<double> lhs, bound;
  for (double th : theta_grid) {
    lhs.push_back(d.centered_log_mgf(th));
    bound.push_back(order * th * th / 2.0);
  }
  const MGFReport mgf = compare(theta_grid, lhs, bound);

  // Variational entropy inequality on the same finite space, nu = product
  // Bernoulli(rho), mu = product Bernoulli(q), F = theta * sum.
  double worst = std::numeric_limits<double>::infinity();
  for (double q : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    std::vector<double> mu(e.weight.size());
    for (std::size_t idx = 0; idx < mu.size(); ++idx) {
      double p = 1.0;
      for (std::size_t x = 0; x < sites; ++x) p *= ((idx >> x) & 1u) ? q : 1.0 - q;
      mu[idx] = p;
    }
    double h = 0.0;
    for (std::size_t idx = 0; idx < mu.size(); ++idx)
      h += mu[idx] * std::log(mu[idx] / e.weight[idx]);
    for (double th : theta_grid) {
      double ef = 0.0;
      std::vector<double> logs(sums.size());
      for (std::size_t idx = 0; idx < sums.size(); ++idx) {
        ef += mu[idx] * th * sums[idx];
        logs[idx] = th * sums[idx];
      }
      worst = std::min(worst, h + log_sum_exp(logs, e.weight) - ef);
    }
  }

  Report r("ell-dependent-sum");
  r.add("sites", static_cast<double>(sites));
  r.add("ell", static_cast<double>(ell));
  r.add("order", order);
  r.add("margin", mgf.margin);
  r.add_check("subgaussian_holds", mgf.passed());
  r.add("entropy_inequality_margin", worst);
  r.add_check("entropy_inequality_holds", worst >= -1e-12);
  return r;
}

std::pair<double, double> confidence_interval(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw UsageError("confidence_interval: need at least 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("confidence_interval: level in (0,1)");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 0.5 + level / 2.0);
  return {mean, z * sd / std::sqrt(n)};
}

Report appendix_suite(std::uint64_t seed, std::size_t mc_samples) {
  const auto grid = default_theta_grid();
  Report r("appendix-suite");

  Rng rng(mix64(seed));
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t atoms = 1 + rng() % 8;
    FiniteDistribution d;
    double total = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
      d.values.push_back(uniform01(rng));
      d.weights.push_back(uniform01(rng) + 1e-3);
      total += d.weights.back();
    }
    for (double& w : d.weights) w /= total;
    // also include the extreme two-point law
    if (trial == 0) d = {{0.0, 1.0}, {0.5, 0.5}};
    worst = std::min(worst, hoeffding_check(d, grid).margin);
  }
  r.add("hoeffding.trials", 50);
  r.add("hoeffding.min_margin", worst);
  r.add_check("hoeffding.holds", worst >= 0.0);

  double w_margin = std::numeric_limits<double>::infinity();
  double printed_margin = std::numeric_limits<double>::infinity();
  const double eps0 = 0.25;
  for (std::size_t b = 1; b <= 3; ++b) {
    for (double rho : {0.25, 0.5, 0.75}) {
      const MGFReport m = w_subgaussian_check(rho, eps0, b, grid);
      w_margin = std::min(w_margin, m.margin);
      // the order with the exponent sign flipped, for comparison
      const double printed = std::pow(2.0 / eps0, -2.0 * static_cast<double>(b));
      for (std::size_t i = 0; i < grid.size(); ++i)
        printed_margin =
            std::min(printed_margin, printed * grid[i] * grid[i] / 2.0 - m.lhs[i]);
    }
  }
  r.add("w_subgaussian.min_margin", w_margin);
  r.add("w_subgaussian.inverse_order_margin", printed_margin);
  r.add_check("w_subgaussian.holds", w_margin >= 0.0);

  const Report product = subgaussian_product_check(1.0, 1.0, 0.25, mc_samples, mix64(seed + 1));
  r.merge("product", product);

  const std::vector<double> f{1.0, -0.5, 0.25, 2.0, -1.0, 0.75, 0.0, 1.5};
  r.merge("ell_dependent", ell_dependent_sum_check(8, 2, 0.5, f, grid));
  r.merge("ell_dependent_skewed", ell_dependent_sum_check(8, 2, 0.3, f, grid));
  return r;
}

}  // namespace slowbond
