#include "slowbond/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "slowbond/errors.hpp"

namespace slowbond {

LatticeSpec::LatticeSpec(std::size_t n, std::size_t k, double alpha, double beta)
    : n_(n), k_(k), alpha_(alpha), beta_(beta) {
  if (n < 2) throw UsageError("LatticeSpec: n must be >= 2");
  if (k < 1) throw UsageError("LatticeSpec: k must be >= 1");
  if (!std::isfinite(alpha) || alpha <= 0.0)
    throw UsageError("LatticeSpec: alpha must be positive and finite");
  if (!std::isfinite(beta) || beta < 0.0)
    throw UsageError("LatticeSpec: beta must be finite and >= 0");
  slow_rate_ = alpha_ * std::pow(static_cast<double>(n_), -beta_);
}

double LatticeSpec::total_rate() const {
  return static_cast<double>(k_ * (n_ - 1)) + static_cast<double>(k_) * slow_rate_;
}

Configuration::Configuration(std::size_t sites)
    : sites_(sites), count_(0), words_((sites + 63) / 64, 0) {}

Configuration::Configuration(std::span<const int> occupancy)
    : Configuration(occupancy.size()) {
  for (Site x = 0; x < occupancy.size(); ++x) {
    if (occupancy[x] != 0 && occupancy[x] != 1)
      throw UsageError("Configuration: occupancy entries must be 0 or 1");
    set(x, occupancy[x] == 1);
  }
}

Configuration Configuration::from_index(std::size_t sites, std::uint64_t index) {
  if (sites > 64) throw UsageError("Configuration::from_index: more than 64 sites");
  Configuration c(sites);
  if (sites < 64) index &= (std::uint64_t{1} << sites) - 1;
  if (!c.words_.empty()) c.words_[0] = index;
  c.count_ = static_cast<std::size_t>(std::popcount(index));
  return c;
}

std::uint64_t Configuration::to_index() const {
  if (sites_ > 64) throw UsageError("Configuration::to_index: more than 64 sites");
  return words_.empty() ? 0 : words_[0];
}

bool Configuration::at(Site x) const {
  if (x >= sites_)
    throw IndexError("site " + std::to_string(x) + " outside torus of " +
                     std::to_string(sites_) + " sites");
  return (*this)[x];
}

void Configuration::set(Site x, bool occupied) {
  if (x >= sites_)
    throw IndexError("site " + std::to_string(x) + " outside torus of " +
                     std::to_string(sites_) + " sites");
  const bool cur = (*this)[x];
  if (cur == occupied) return;
  words_[x >> 6] ^= std::uint64_t{1} << (x & 63);
  if (occupied)
    ++count_;
  else
    --count_;
}

std::size_t Configuration::count_range(Site first, std::size_t length) const {
  if (first + length > sites_) throw IndexError("count_range: range exceeds torus");
  std::size_t total = 0;
  Site x = first;
  const Site end = first + length;
  while (x < end) {
    const std::size_t word = x >> 6;
    const unsigned offset = x & 63;
    const std::size_t span = std::min<std::size_t>(64 - offset, end - x);
    std::uint64_t bits = words_[word] >> offset;
    if (span < 64) bits &= (std::uint64_t{1} << span) - 1;
    total += static_cast<std::size_t>(std::popcount(bits));
    x += span;
  }
  return total;
}

std::vector<int> Configuration::occupancy() const {
  std::vector<int> out(sites_);
  for (Site x = 0; x < sites_; ++x) out[x] = (*this)[x] ? 1 : 0;
  return out;
}

TimeScaleRegime make_subcritical(double theta) {
  if (!std::isfinite(theta) || theta <= 0.0)
    throw UsageError("Subcritical regime requires theta > 0");
  return Subcritical{theta};
}

double conductance(const LatticeSpec& spec, Site x) {
  if (x >= spec.sites())
    throw IndexError("conductance: bond index " + std::to_string(x) + " out of range");
  return spec.is_slow_bond(x) ? spec.slow_rate() : 1.0;
}

BoxIndex box_index(const LatticeSpec& spec, Site x) {
  if (x >= spec.sites())
    throw IndexError("box_index: site " + std::to_string(x) + " out of range");
  return x / spec.n();
}

Configuration swap(const Configuration& config, Site x) {
  if (x >= config.size())
    throw IndexError("swap: site " + std::to_string(x) + " out of range");
  Configuration out = config;
  out.swap_in_place(x);
  return out;
}

double generator_apply(const LatticeSpec& spec, const ConfigFunction& f,
                       const Configuration& eta) {
  if (eta.size() != spec.sites())
    throw UsageError("generator_apply: configuration size does not match spec");
  const double base = f(eta);
  double acc = 0.0;
  Configuration scratch = eta;
  for (Site x = 0; x < spec.sites(); ++x) {
    if (!scratch.swap_in_place(x)) continue;  // f(eta^{x,x+1}) == f(eta)
    acc += conductance(spec, x) * (f(scratch) - base);
    scratch.swap_in_place(x);
  }
  return acc;
}

}  // namespace slowbond
