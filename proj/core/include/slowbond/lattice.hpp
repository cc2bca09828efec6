#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace slowbond {

using Site = std::size_t;
using BoxIndex = std::size_t;

/// Static model parameters: k boxes of n sites on the discrete torus of nk
/// sites. Bond (x, x+1) has conductance alpha * n^-beta when x is the last
/// site of a box, and 1 otherwise.
class LatticeSpec {
 public:
  LatticeSpec(std::size_t n, std::size_t k, double alpha, double beta);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  std::size_t sites() const { return n_ * k_; }
  /// alpha * n^-beta
  double slow_rate() const { return slow_rate_; }
  bool is_slow_bond(Site x) const { return x % n_ == n_ - 1; }
  /// Sum of all bond conductances (the constant total jump rate).
  double total_rate() const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;

 private:
  std::size_t n_;
  std::size_t k_;
  double alpha_;
  double beta_;
  double slow_rate_;
};

/// Occupation state on the torus, packed 64 sites per word, with a cached
/// particle count.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t sites);
  explicit Configuration(std::span<const int> occupancy);

  /// Site 0 is the least significant bit; requires sites <= 64.
  static Configuration from_index(std::size_t sites, std::uint64_t index);
  std::uint64_t to_index() const;

  std::size_t size() const { return sites_; }
  std::size_t particle_count() const { return count_; }

  bool operator[](Site x) const { return (words_[x >> 6] >> (x & 63)) & 1u; }
  bool at(Site x) const;
  void set(Site x, bool occupied);

  /// Exchanges the occupations of x and (x+1) mod size in place. Returns
  /// true when the configuration changed.
  bool swap_in_place(Site x) {
    const Site y = (x + 1 == sites_) ? 0 : x + 1;
    // branchless: whether the two sites differ is a coin flip in typical runs
    const std::uint64_t a = (words_[x >> 6] >> (x & 63)) & 1u;
    const std::uint64_t b = (words_[y >> 6] >> (y & 63)) & 1u;
    const std::uint64_t differ = a ^ b;
    words_[x >> 6] ^= differ << (x & 63);
    words_[y >> 6] ^= differ << (y & 63);
    return differ != 0;
  }

  /// Number of particles in sites [first, first + length).
  std::size_t count_range(Site first, std::size_t length) const;
  std::vector<int> occupancy() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::size_t sites_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Time scale k^2 n^(2+theta).
struct Subcritical {
  double theta;
  friend bool operator==(const Subcritical&, const Subcritical&) = default;
};

/// Time scale k^2 n^(1+beta).
struct Critical {
  friend bool operator==(const Critical&, const Critical&) = default;
};

using TimeScaleRegime = std::variant<Subcritical, Critical>;

TimeScaleRegime make_subcritical(double theta);

double conductance(const LatticeSpec& spec, Site x);
BoxIndex box_index(const LatticeSpec& spec, Site x);

/// Returns the configuration with sites x and x+1 (mod nk) exchanged.
Configuration swap(const Configuration& config, Site x);

using ConfigFunction = std::function<double(const Configuration&)>;

/// Unaccelerated generator: sum_x xi_{x,x+1} [f(eta^{x,x+1}) - f(eta)].
double generator_apply(const LatticeSpec& spec, const ConfigFunction& f,
                       const Configuration& eta);

}  // namespace slowbond
