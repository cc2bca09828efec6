#include "slowbond/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slowbond/errors.hpp"

namespace slowbond {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_unit(double u) {
  double r = u - std::floor(u);
  return r >= 1.0 ? 0.0 : r;
}

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

Profile::Profile(std::string name, Evaluator evaluator, double epsilon0, double kappa,
                 Evaluator second_derivative)
    : name_(std::move(name)),
      evaluator_(std::move(evaluator)),
      epsilon0_(epsilon0),
      kappa_(kappa),
      second_derivative_(std::move(second_derivative)) {
  if (!evaluator_) throw UsageError("Profile: empty evaluator");
  if (!std::isfinite(kappa_) || kappa_ < 0.0)
    throw UsageError("Profile: kappa must be finite and nonnegative");
}

double Profile::operator()(double u) const { return evaluator_(wrap_unit(u)); }

double Profile::second_derivative(double u) const {
  if (!second_derivative_)
    throw UsageError("profile '" + name_ + "' has no second derivative");
  return second_derivative_(wrap_unit(u));
}

void Profile::check_admissible(std::size_t grid_points) const {
  if (!(epsilon0_ > 0.0 && epsilon0_ < 0.5)) {
    std::ostringstream os;
    os << "profile '" << name_ << "': epsilon0 = " << epsilon0_ << " not in (0, 1/2)";
    throw DomainError(os.str());
  }
  const double slack = 1e-12;
  const double h = 1.0 / static_cast<double>(grid_points);
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double u = static_cast<double>(j) * h;
    const double g = (*this)(u);
    if (!(g >= epsilon0_ - slack && g <= 1.0 - epsilon0_ + slack)) {
      std::ostringstream os;
      os << "profile '" << name_ << "': gamma(" << u << ") = " << g
         << " violates margin epsilon0 = " << epsilon0_;
      throw DomainError(os.str());
    }
    for (std::size_t stride : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
      const double eps = static_cast<double>(stride) * h;
      const double diff = std::abs((*this)(u + eps) - g);
      if (diff > eps * kappa_ * (1.0 + 1e-9) + slack) {
        std::ostringstream os;
        os << "profile '" << name_ << "': Lipschitz bound kappa = " << kappa_
           << " violated at u = " << u << " (|dgamma| = " << diff << ", eps = " << eps
           << ")";
        throw DomainError(os.str());
      }
    }
  }
}

bool Profile::is_admissible(std::size_t grid_points) const {
  try {
    check_admissible(grid_points);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

Profile constant_profile(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw UsageError("constant profile must lie in [0,1]");
  std::ostringstream name;
  name << "constant(" << c << ")";
  const double eps0 = std::min(c, 1.0 - c);
  return Profile(
      name.str(), [c](double) { return c; }, eps0, 0.0, [](double) { return 0.0; });
}

Profile sine_profile(double offset, double amplitude, int frequency) {
  if (frequency < 1) throw UsageError("sine profile frequency must be >= 1");
  const double lo = offset - std::abs(amplitude);
  const double hi = offset + std::abs(amplitude);
  if (lo < 0.0 || hi > 1.0) throw UsageError("sine profile leaves [0,1]");
  const double omega = kTwoPi * frequency;
  std::ostringstream name;
  name << "sine(" << offset << "," << amplitude << "," << frequency << ")";
  return Profile(
      name.str(),
      [=](double u) { return offset + amplitude * std::sin(omega * u); },
      std::min(lo, 1.0 - hi), omega * std::abs(amplitude),
      [=](double u) { return -omega * omega * amplitude * std::sin(omega * u); });
}

Profile bump_profile(double base, double height, double center, double concentration) {
  if (concentration < 0.0) throw UsageError("bump concentration must be >= 0");
  const double lo = std::min(base, base + height * std::exp(-2.0 * concentration));
  const double hi = std::max(base + height, base + height * std::exp(-2.0 * concentration));
  if (lo < 0.0 || hi > 1.0) throw UsageError("bump profile leaves [0,1]");
  auto value = [=](double u) {
    return base + height * std::exp(concentration * (std::cos(kTwoPi * (u - center)) - 1.0));
  };
  auto second = [=](double u) {
    const double phi = kTwoPi * (u - center);
    const double e = std::exp(concentration * (std::cos(phi) - 1.0));
    const double s = std::sin(phi);
    return -height * concentration * kTwoPi * kTwoPi * e *
           (std::cos(phi) - concentration * s * s);
  };
  // max |gamma'| over a fine grid, padded so the declared bound holds between
  // grid points
  double kappa = 0.0;
  constexpr int kGrid = 100000;
  for (int j = 0; j < kGrid; ++j) {
    const double phi = kTwoPi * j / kGrid;
    const double d = std::abs(height * concentration * kTwoPi * std::sin(phi) *
                              std::exp(concentration * (std::cos(phi) - 1.0)));
    kappa = std::max(kappa, d);
  }
  kappa *= 1.001;
  std::ostringstream name;
  name << "bump(" << base << "," << height << "," << center << "," << concentration << ")";
  return Profile(name.str(), value, std::min(lo, 1.0 - hi), kappa, second);
}

Profile make_profile(const std::string& kind, const std::map<std::string, double>& params) {
  Profile p = [&] {
    if (kind == "constant") return constant_profile(param_or(params, "c", 0.5));
    if (kind == "sine")
      return sine_profile(param_or(params, "offset", 0.5), param_or(params, "amplitude", 0.25),
                          static_cast<int>(param_or(params, "frequency", 1.0)));
    if (kind == "bump")
      return bump_profile(param_or(params, "base", 0.3), param_or(params, "height", 0.4),
                          param_or(params, "center", 0.5),
                          param_or(params, "concentration", 2.0));
    throw UsageError("unknown profile '" + kind + "' (expected constant, sine or bump)");
  }();
  // explicit metadata overrides
  auto e = params.find("epsilon0");
  auto k = params.find("kappa");
  if (e != params.end() || k != params.end()) {
    const double eps0 = e != params.end() ? e->second : p.epsilon0();
    const double kap = k != params.end() ? k->second : p.kappa();
    Profile::Evaluator second;
    if (p.has_second_derivative()) second = [p](double u) { return p.second_derivative(u); };
    return Profile(p.name(), [p](double u) { return p(u); }, eps0, kap, second);
  }
  return p;
}

TestFunction::TestFunction(std::string name, Evaluator value, Evaluator second_derivative)
    : name_(std::move(name)),
      value_(std::move(value)),
      second_derivative_(std::move(second_derivative)) {
  if (!value_) throw UsageError("TestFunction: empty evaluator");
}

double TestFunction::second_derivative(double u) const {
  if (!second_derivative_)
    throw UsageError("test function '" + name_ + "' has no second derivative");
  return second_derivative_(u);
}

bool TestFunction::is_periodic(double tol) const {
  const double at0 = value_(0.0);
  const double near1 = value_(1.0 - 1e-9);
  const double at1 = value_(1.0);
  return std::abs(at0 - at1) <= tol && std::abs(at0 - near1) <= 1e-6;
}

TestFunction constant_test_function(double c) {
  std::ostringstream name;
  name << c;
  return TestFunction(name.str(), [c](double) { return c; }, [](double) { return 0.0; });
}

TestFunction make_test_function(const std::string& name) {
  if (name == "1" || name == "one") return constant_test_function(1.0);
  if (name == "sin(2pi u)" || name == "sin1")
    return TestFunction(
        "sin(2pi u)", [](double u) { return std::sin(kTwoPi * u); },
        [](double u) { return -kTwoPi * kTwoPi * std::sin(kTwoPi * u); });
  if (name == "cos(2pi u)" || name == "cos1")
    return TestFunction(
        "cos(2pi u)", [](double u) { return std::cos(kTwoPi * u); },
        [](double u) { return -kTwoPi * kTwoPi * std::cos(kTwoPi * u); });
  if (name == "sin(4pi u)" || name == "sin2")
    return TestFunction(
        "sin(4pi u)", [](double u) { return std::sin(2.0 * kTwoPi * u); },
        [](double u) { return -4.0 * kTwoPi * kTwoPi * std::sin(2.0 * kTwoPi * u); });
  throw UsageError("unknown test function '" + name + "'");
}

std::vector<std::string> test_function_catalog() {
  return {"1", "sin(2pi u)", "cos(2pi u)", "sin(4pi u)"};
}

}  // namespace slowbond
