#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "slowbond/profiles.hpp"

namespace slowbond {

struct DiscreteOnTk {
  std::vector<double> values;
};

struct FourierMode {
  int frequency;  // m >= 1
  double cosine;  // coefficient of cos(2 pi m u)
  double sine;    // coefficient of sin(2 pi m u)
};

struct FourierOnT {
  double mean = 0.0;
  std::vector<FourierMode> modes;
  /// Estimated sum of |coefficients| beyond the cutoff (at the same time).
  double tail_bound = 0.0;
};

using DensityField = std::variant<DiscreteOnTk, FourierOnT>;

/// Exact solution of d/dt rho = alpha * Delta_k rho on T_k through the
/// circulant eigenbasis; mode m decays at rate 4 alpha k^2 sin^2(pi m / k).
std::vector<double> solve_discrete_heat(std::span<const double> rho0, double alpha, double t);

inline constexpr int kDefaultFourierCutoff = 64;

/// Fourier solution of d/dt rho = alpha rho'' on T started from gamma.
/// Coefficients come from periodic trapezoidal quadrature; throws
/// DomainError if gamma is not admissible.
FourierOnT solve_continuous_heat(const Profile& gamma, double alpha, double t,
                                 int cutoff = kDefaultFourierCutoff);

/// Fourier field evolved further by time dt.
FourierOnT evolve(const FourierOnT& field, double alpha, double dt);

struct Point {
  double u;
};
struct BoxId {
  std::size_t index;
};

/// Pointwise value. Querying a discrete field at a point needs
/// `interpolate` (nearest box to the left); querying a Fourier field by
/// index is always a usage error.
double evaluate(const DensityField& field, Point p, bool interpolate = false);
double evaluate(const DensityField& field, BoxId i);

double evaluate(const FourierOnT& field, double u);
/// rho''(u)
double second_derivative(const FourierOnT& field, double u);
/// integral of G(u) rho(u) over T (periodic trapezoid, spectrally accurate).
double integrate_against(const FourierOnT& field, const TestFunction& G,
                         std::size_t points = 4096);
double total_mass(const DensityField& field);

/// CSV "index,value" for discrete fields, "u,value" on `grid` points for
/// Fourier fields.
void write_csv(std::ostream& out, const DensityField& field, std::size_t grid = 256);

}  // namespace slowbond

#include "slowbond/report.hpp"

namespace slowbond {

/// Semigroup, mass conservation, comparison principle, finite-difference
/// consistency and single-mode decay checks for both solvers.
Report pde_property_checks(double alpha = 1.0, std::uint64_t seed = 1);

}  // namespace slowbond
