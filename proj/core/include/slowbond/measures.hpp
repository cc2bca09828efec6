#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "slowbond/lattice.hpp"
#include "slowbond/profiles.hpp"

namespace slowbond {

struct Atom {
  double position;  // in [0,1)
  double mass;      // in [0,1]
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite atomic measure on the continuous torus with total mass <= 1.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  /// Atoms must have distinct positions in [0,1); throws UsageError.
  explicit EmpiricalMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;

  /// CSV with header "position,mass".
  void write_csv(std::ostream& out) const;

 private:
  std::vector<Atom> atoms_;
};

/// Mass eta(x)/(nk) at x/(nk) for each occupied site.
EmpiricalMeasure empirical_Pi(const LatticeSpec& spec, const Configuration& eta);
/// Mass (box average)/(nk) at x/(nk) for every site.
EmpiricalMeasure empirical_Pi_tilde(const LatticeSpec& spec, const Configuration& eta);
/// One atom per box: mass (box average)/k at i/k.
EmpiricalMeasure empirical_pi(const LatticeSpec& spec, const Configuration& eta);

double pair(const EmpiricalMeasure& m, const TestFunction& G);

/// Per-box densities (1/n) sum_{x in box i} eta(x).
std::vector<double> box_averages(const LatticeSpec& spec, const Configuration& eta);

/// gamma-bar(i) = k * integral of gamma over [i/k, (i+1)/k], adaptive
/// Gauss-Kronrod with absolute tolerance 1e-10. Throws NumericError when
/// the error estimate stays above tolerance.
std::vector<double> box_average_profile(const Profile& gamma, std::size_t k);

/// (Delta_k rho)(i) = k^2 [rho(i+1) + rho(i-1) - 2 rho(i)], periodic.
std::vector<double> discrete_laplacian(std::span<const double> rho);

}  // namespace slowbond
