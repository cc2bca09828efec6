#include "slowbond/measures.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <ostream>
#include <sstream>

#include "slowbond/errors.hpp"
#include "slowbond/format.hpp"

namespace slowbond {

EmpiricalMeasure::EmpiricalMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  double mass = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.position >= 0.0 && a.position < 1.0))
      throw UsageError("EmpiricalMeasure: atom position outside [0,1)");
    if (!(a.mass >= 0.0 && a.mass <= 1.0))
      throw UsageError("EmpiricalMeasure: atom mass outside [0,1]");
    mass += a.mass;
  }
  if (mass > 1.0 + 1e-12) throw UsageError("EmpiricalMeasure: total mass exceeds one");
  std::vector<double> pos;
  pos.reserve(atoms_.size());
  for (const auto& a : atoms_) pos.push_back(a.position);
  std::sort(pos.begin(), pos.end());
  if (std::adjacent_find(pos.begin(), pos.end()) != pos.end())
    throw UsageError("EmpiricalMeasure: atom positions must be distinct");
}

double EmpiricalMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.mass;
  return m;
}

void EmpiricalMeasure::write_csv(std::ostream& out) const {
  out << "position,mass\n";
  for (const auto& a : atoms_) out << format_double(a.position) << ',' << format_double(a.mass) << '\n';
}

std::vector<double> box_averages(const LatticeSpec& spec, const Configuration& eta) {
  if (eta.size() != spec.sites()) throw UsageError("configuration size does not match spec");
  std::vector<double> avg(spec.k());
  const double n = static_cast<double>(spec.n());
  for (BoxIndex i = 0; i < spec.k(); ++i)
    avg[i] = static_cast<double>(eta.count_range(i * spec.n(), spec.n())) / n;
  return avg;
}

EmpiricalMeasure empirical_Pi(const LatticeSpec& spec, const Configuration& eta) {
  if (eta.size() != spec.sites()) throw UsageError("configuration size does not match spec");
  const double nk = static_cast<double>(spec.sites());
  std::vector<Atom> atoms;
  for (Site x = 0; x < spec.sites(); ++x)
    if (eta[x]) atoms.push_back({static_cast<double>(x) / nk, 1.0 / nk});
  return EmpiricalMeasure(std::move(atoms));
}

EmpiricalMeasure empirical_Pi_tilde(const LatticeSpec& spec, const Configuration& eta) {
  const auto avg = box_averages(spec, eta);
  const double nk = static_cast<double>(spec.sites());
  std::vector<Atom> atoms;
  atoms.reserve(spec.sites());
  for (Site x = 0; x < spec.sites(); ++x)
    atoms.push_back({static_cast<double>(x) / nk, avg[x / spec.n()] / nk});
  return EmpiricalMeasure(std::move(atoms));
}

EmpiricalMeasure empirical_pi(const LatticeSpec& spec, const Configuration& eta) {
  const auto avg = box_averages(spec, eta);
  const double k = static_cast<double>(spec.k());
  std::vector<Atom> atoms;
  atoms.reserve(spec.k());
  for (BoxIndex i = 0; i < spec.k(); ++i)
    atoms.push_back({static_cast<double>(i) / k, avg[i] / k});
  return EmpiricalMeasure(std::move(atoms));
}

double pair(const EmpiricalMeasure& m, const TestFunction& G) {
  double acc = 0.0;
  for (const auto& a : m.atoms()) acc += a.mass * G(a.position);
  return acc;
}

std::vector<double> box_average_profile(const Profile& gamma, std::size_t k) {
  if (k < 1) throw UsageError("box_average_profile: k must be >= 1");
  using boost::math::quadrature::gauss_kronrod;
  constexpr double kTol = 1e-10;
  std::vector<double> out(k);
  const double kd = static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = static_cast<double>(i) / kd;
    const double b = static_cast<double>(i + 1) / kd;
    double err = 0.0;
    const double integral = gauss_kronrod<double, 31>::integrate(
        [&gamma](double u) { return gamma(u); }, a, b, 15, 1e-13, &err);
    if (!(err <= kTol)) {
      std::ostringstream os;
      os << "box_average_profile: quadrature error estimate " << err << " on box " << i
         << " exceeds " << kTol;
      throw NumericError(os.str());
    }
    out[i] = kd * integral;
  }
  return out;
}

std::vector<double> discrete_laplacian(std::span<const double> rho) {
  const std::size_t k = rho.size();
  if (k < 1) throw UsageError("discrete_laplacian: empty vector");
  const double k2 = static_cast<double>(k) * static_cast<double>(k);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double right = rho[(i + 1) % k];
    const double left = rho[(i + k - 1) % k];
    out[i] = k2 * (right + left - 2.0 * rho[i]);
  }
  return out;
}

}  // namespace slowbond
