#include "slowbond/pde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include "slowbond/errors.hpp"
#include "slowbond/format.hpp"
#include "slowbond/measures.hpp"
#include "slowbond/rng.hpp"

namespace slowbond {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Quadrature points for Fourier coefficients; aliasing only involves modes
// above kQuadPoints - 2 * cutoff.
constexpr std::size_t kQuadPoints = 4096;

}  // namespace

std::vector<double> solve_discrete_heat(std::span<const double> rho0, double alpha, double t) {
  const std::size_t k = rho0.size();
  if (k == 0) throw UsageError("solve_discrete_heat: empty initial condition");
  if (!(t >= 0.0)) throw UsageError("solve_discrete_heat: t must be nonnegative");
  if (k == 1) return {rho0[0]};
  const double kd = static_cast<double>(k);
  // forward DFT, decay, inverse DFT; O(k^2) is fine for the box counts used
  std::vector<std::complex<double>> hat(k);
  for (std::size_t m = 0; m < k; ++m) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      acc += rho0[i] * std::polar(1.0, -kTwoPi * static_cast<double>((m * i) % k) / kd);
    const double s = std::sin(kPi * static_cast<double>(m) / kd);
    const double lambda = -4.0 * alpha * kd * kd * s * s;
    hat[m] = acc * std::exp(lambda * t);
  }
  std::vector<double> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < k; ++m)
      acc += hat[m] * std::polar(1.0, kTwoPi * static_cast<double>((m * j) % k) / kd);
    out[j] = acc.real() / kd;
  }
  return out;
}

FourierOnT evolve(const FourierOnT& field, double alpha, double dt) {
  if (!(dt >= 0.0)) throw UsageError("evolve: dt must be nonnegative");
  FourierOnT out = field;
  double worst = 1.0;
  for (auto& mode : out.modes) {
    const double w = kTwoPi * mode.frequency;
    const double decay = std::exp(-w * w * alpha * dt);
    mode.cosine *= decay;
    mode.sine *= decay;
    worst = decay;
  }
  // tail modes decay at least as fast as the highest retained one
  out.tail_bound *= worst;
  return out;
}

FourierOnT solve_continuous_heat(const Profile& gamma, double alpha, double t, int cutoff) {
  if (!(t >= 0.0)) throw UsageError("solve_continuous_heat: t must be nonnegative");
  if (cutoff < 1) throw UsageError("solve_continuous_heat: cutoff must be >= 1");
  if (2 * static_cast<std::size_t>(cutoff) >= kQuadPoints / 2)
    throw UsageError("solve_continuous_heat: cutoff too large for quadrature grid");
  gamma.check_admissible();

  std::vector<double> samples(kQuadPoints);
  for (std::size_t j = 0; j < kQuadPoints; ++j)
    samples[j] = gamma(static_cast<double>(j) / static_cast<double>(kQuadPoints));

  auto coefficient = [&](int m) {
    double c = 0.0, s = 0.0;
    for (std::size_t j = 0; j < kQuadPoints; ++j) {
      const double phase =
          kTwoPi * static_cast<double>((static_cast<std::size_t>(m) * j) % kQuadPoints) /
          static_cast<double>(kQuadPoints);
      c += samples[j] * std::cos(phase);
      s += samples[j] * std::sin(phase);
    }
    const double scale = 2.0 / static_cast<double>(kQuadPoints);
    return FourierMode{m, c * scale, s * scale};
  };

  FourierOnT field;
  double mean = 0.0;
  for (double v : samples) mean += v;
  field.mean = mean / static_cast<double>(kQuadPoints);
  for (int m = 1; m <= cutoff; ++m) field.modes.push_back(coefficient(m));
  // tail estimate from the next `cutoff` modes, decayed to time t
  double tail = 0.0;
  for (int m = cutoff + 1; m <= 2 * cutoff; ++m) {
    const FourierMode mode = coefficient(m);
    const double w = kTwoPi * m;
    tail += (std::abs(mode.cosine) + std::abs(mode.sine)) * std::exp(-w * w * alpha * t);
  }
  for (auto& mode : field.modes) {
    const double w = kTwoPi * mode.frequency;
    const double decay = std::exp(-w * w * alpha * t);
    mode.cosine *= decay;
    mode.sine *= decay;
  }
  field.tail_bound = tail;
  return field;
}

double evaluate(const FourierOnT& field, double u) {
  double v = field.mean;
  for (const auto& mode : field.modes) {
    const double phase = kTwoPi * mode.frequency * u;
    v += mode.cosine * std::cos(phase) + mode.sine * std::sin(phase);
  }
  return v;
}

double second_derivative(const FourierOnT& field, double u) {
  double v = 0.0;
  for (const auto& mode : field.modes) {
    const double w = kTwoPi * mode.frequency;
    const double phase = w * u;
    v -= w * w * (mode.cosine * std::cos(phase) + mode.sine * std::sin(phase));
  }
  return v;
}

double evaluate(const DensityField& field, Point p, bool interpolate) {
  if (const auto* f = std::get_if<FourierOnT>(&field)) return evaluate(*f, p.u);
  const auto& d = std::get<DiscreteOnTk>(field);
  if (!interpolate)
    throw UsageError("evaluate: point query on a discrete field requires interpolation");
  const double k = static_cast<double>(d.values.size());
  double u = p.u - std::floor(p.u);
  auto i = static_cast<std::size_t>(u * k);
  if (i >= d.values.size()) i = d.values.size() - 1;
  return d.values[i];
}

double evaluate(const DensityField& field, BoxId i) {
  const auto* d = std::get_if<DiscreteOnTk>(&field);
  if (!d) throw UsageError("evaluate: box index query on a continuous field");
  if (i.index >= d->values.size()) throw IndexError("evaluate: box index out of range");
  return d->values[i.index];
}

double integrate_against(const FourierOnT& field, const TestFunction& G, std::size_t points) {
  double acc = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(points);
    acc += G(u) * evaluate(field, u);
  }
  return acc / static_cast<double>(points);
}

double total_mass(const DensityField& field) {
  if (const auto* f = std::get_if<FourierOnT>(&field)) return f->mean;
  const auto& d = std::get<DiscreteOnTk>(field);
  double acc = 0.0;
  for (double v : d.values) acc += v;
  return acc / static_cast<double>(d.values.size());
}

void write_csv(std::ostream& out, const DensityField& field, std::size_t grid) {
  if (const auto* d = std::get_if<DiscreteOnTk>(&field)) {
    out << "index,value\n";
    for (std::size_t i = 0; i < d->values.size(); ++i)
      out << i << ',' << format_double(d->values[i]) << '\n';
    return;
  }
  const auto& f = std::get<FourierOnT>(field);
  out << "u,value\n";
  for (std::size_t j = 0; j < grid; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(grid);
    out << format_double(u) << ',' << format_double(evaluate(f, u)) << '\n';
  }
}

}  // namespace slowbond

namespace slowbond {

Report pde_property_checks(double alpha, std::uint64_t seed) {
  Report r("pde-properties");
  Rng rng(mix64(seed));
  auto random_vector = [&](std::size_t k) {
    std::vector<double> v(k);
    for (double& x : v) x = uniform01(rng);
    return v;
  };
  auto mean_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };

  double semigroup = 0.0, mass = 0.0, fd = 0.0;
  bool ordered = true, bounded = true;
  for (std::size_t k : {2u, 3u, 4u, 8u, 16u}) {
    const auto rho0 = random_vector(k);
    for (double s : {0.001, 0.01, 0.05}) {
      for (double t : {0.002, 0.02, 0.1}) {
        const auto two_step = solve_discrete_heat(solve_discrete_heat(rho0, alpha, s), alpha, t);
        const auto one_step = solve_discrete_heat(rho0, alpha, s + t);
        for (std::size_t i = 0; i < k; ++i)
          semigroup = std::max(semigroup, std::abs(two_step[i] - one_step[i]));
        mass = std::max(mass, std::abs(mean_of(one_step) - mean_of(rho0)));
        for (double v : one_step) bounded = bounded && v >= -1e-12 && v <= 1.0 + 1e-12;
      }
    }
    auto upper = rho0;
    for (double& v : upper) v = std::min(1.0, v + 0.5 * uniform01(rng));
    for (double t : {0.001, 0.01, 0.1, 1.0}) {
      const auto lo = solve_discrete_heat(rho0, alpha, t);
      const auto hi = solve_discrete_heat(upper, alpha, t);
      for (std::size_t i = 0; i < k; ++i) ordered = ordered && lo[i] <= hi[i] + 1e-12;
    }
    // (rho_t - rho_0)/t - alpha Delta_k rho_0 = O(t)
    const auto lap = discrete_laplacian(rho0);
    const double kk = static_cast<double>(k * k);
    for (double t : {1e-4, 1e-5}) {
      const auto rt = solve_discrete_heat(rho0, alpha, t);
      double worst = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        worst = std::max(worst, std::abs((rt[i] - rho0[i]) / t - alpha * lap[i]));
      // second-order term is bounded by (alpha * 4 k^2)^2 t / 2
      fd = std::max(fd, worst / (0.5 * alpha * alpha * 16.0 * kk * kk * t));
    }
  }
  r.add("discrete.semigroup_error", semigroup);
  r.add("discrete.mass_error", mass);
  r.add("discrete.fd_consistency_ratio", fd);
  r.add_check("discrete.semigroup", semigroup <= 1e-10);
  r.add_check("discrete.mass", mass <= 1e-10);
  r.add_check("discrete.comparison", ordered);
  r.add_check("discrete.maximum_principle", bounded);
  r.add_check("discrete.fd_consistency", fd <= 1.0);

  // two-box closed form: mean +- (a - b)/2 e^{-16 alpha t}
  double two_box = 0.0;
  for (double t : {0.0, 0.01, 0.05, 0.2}) {
    const std::vector<double> ab{0.8, 0.3};
    const auto sol = solve_discrete_heat(ab, alpha, t);
    const double dev = 0.25 * std::exp(-16.0 * alpha * t);
    two_box = std::max({two_box, std::abs(sol[0] - (0.55 + dev)), std::abs(sol[1] - (0.55 - dev))});
  }
  r.add("discrete.two_box_error", two_box);
  r.add_check("discrete.two_box_closed_form", two_box <= 1e-12);

  // continuous solver
  const Profile sine = sine_profile(0.5, 0.25, 1);
  const Profile bump = bump_profile(0.3, 0.4, 0.5, 2.0);
  double decay = 0.0, cmass = 0.0, csemi = 0.0;
  bool cordered = true;
  for (double t : {0.0, 0.001, 0.01, 0.05, 0.1}) {
    const FourierOnT f = solve_continuous_heat(sine, alpha, t);
    const double amp = 0.25 * std::exp(-4.0 * std::numbers::pi * std::numbers::pi * alpha * t);
    for (int j = 0; j < 64; ++j) {
      const double u = j / 64.0;
      decay = std::max(decay, std::abs(evaluate(f, u) - (0.5 + amp * std::sin(kTwoPi * u))));
    }
    const FourierOnT g = solve_continuous_heat(bump, alpha, t);
    const FourierOnT g0 = solve_continuous_heat(bump, alpha, 0.0);
    cmass = std::max({cmass, std::abs(f.mean - 0.5), std::abs(g.mean - g0.mean)});
    const FourierOnT via = evolve(solve_continuous_heat(bump, alpha, t / 2), alpha, t / 2);
    for (int j = 0; j < 64; ++j) {
      const double u = j / 64.0;
      csemi = std::max(csemi, std::abs(evaluate(via, u) - evaluate(g, u)));
    }
  }
  // comparison with the constant solutions 0.3 and 0.7 that bracket the bump
  for (double t : {0.01, 0.1}) {
    const FourierOnT g = solve_continuous_heat(bump, alpha, t);
    for (int j = 0; j < 256; ++j) {
      const double v = evaluate(g, j / 256.0);
      cordered = cordered && v >= 0.3 - 1e-12 && v <= 0.7 + 1e-12;
    }
  }
  r.add("continuous.single_mode_error", decay);
  r.add("continuous.mass_error", cmass);
  r.add("continuous.semigroup_error", csemi);
  r.add_check("continuous.single_mode_decay", decay <= 1e-10);
  r.add_check("continuous.mass", cmass <= 1e-10);
  r.add_check("continuous.semigroup", csemi <= 1e-10);
  r.add_check("continuous.comparison", cordered);
  return r;
}

}  // namespace slowbond
