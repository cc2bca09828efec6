#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace slowbond {

/// Initial density profile gamma : T -> [0,1] with user-declared margin
/// epsilon0 and Lipschitz constant kappa. The metadata is only checked by
/// check_admissible(); profiles such as gamma == 1 are legal to construct.
class Profile {
 public:
  using Evaluator = std::function<double(double)>;

  Profile(std::string name, Evaluator evaluator, double epsilon0, double kappa,
          Evaluator second_derivative = {});

  double operator()(double u) const;
  const std::string& name() const { return name_; }
  double epsilon0() const { return epsilon0_; }
  double kappa() const { return kappa_; }
  bool has_second_derivative() const { return static_cast<bool>(second_derivative_); }
  double second_derivative(double u) const;

  /// Verifies eps0 in (0,1/2), eps0 <= gamma <= 1-eps0 and the Lipschitz
  /// bound on a grid of `grid_points` points. Throws DomainError.
  void check_admissible(std::size_t grid_points = 10000) const;
  bool is_admissible(std::size_t grid_points = 10000) const;

 private:
  std::string name_;
  Evaluator evaluator_;
  double epsilon0_;
  double kappa_;
  Evaluator second_derivative_;
};

/// Catalog entries. epsilon0 and kappa are derived from the parameters.
Profile constant_profile(double c);
/// offset + amplitude * sin(2 pi frequency u)
Profile sine_profile(double offset, double amplitude, int frequency = 1);
/// base + height * exp(concentration * (cos(2 pi (u - center)) - 1))
Profile bump_profile(double base, double height, double center, double concentration);

/// Builds a catalog profile from "constant", "sine" or "bump" plus named
/// parameters; unspecified parameters take catalog defaults.
Profile make_profile(const std::string& kind, const std::map<std::string, double>& params);

/// Smooth periodic test function G with its second derivative.
class TestFunction {
 public:
  using Evaluator = std::function<double(double)>;

  TestFunction(std::string name, Evaluator value, Evaluator second_derivative = {});

  double operator()(double u) const { return value_(u); }
  double second_derivative(double u) const;
  bool has_second_derivative() const { return static_cast<bool>(second_derivative_); }
  const std::string& name() const { return name_; }

  /// Grid check that G(0) matches the limit at 1.
  bool is_periodic(double tol = 1e-9) const;

 private:
  std::string name_;
  Evaluator value_;
  Evaluator second_derivative_;
};

TestFunction constant_test_function(double c);
/// Catalog names: "1", "sin(2pi u)", "cos(2pi u)", "sin(4pi u)". Aliases
/// "one", "sin1", "cos1", "sin2" are accepted.
TestFunction make_test_function(const std::string& name);
std::vector<std::string> test_function_catalog();

}  // namespace slowbond
