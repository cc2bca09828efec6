#include "slowbond/simulator.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <ostream>
#include <sstream>

#include "slowbond/format.hpp"
#include "slowbond/measures.hpp"
#include "slowbond/parallel.hpp"

namespace slowbond {

double speedup_factor(const LatticeSpec& spec, const TimeScaleRegime& regime) {
  const double n = static_cast<double>(spec.n());
  const double k = static_cast<double>(spec.k());
  if (const auto* sub = std::get_if<Subcritical>(&regime))
    return k * k * std::pow(n, 2.0 + sub->theta);
  return k * k * std::pow(n, 1.0 + spec.beta());
}

std::string regime_label(const TimeScaleRegime& regime) {
  if (const auto* sub = std::get_if<Subcritical>(&regime))
    return "subcritical(theta=" + format_double(sub->theta) + ")";
  return "critical";
}

EdgeSampler::EdgeSampler(const LatticeSpec& spec)
    : n_(spec.n()), k_(spec.k()), total_rate_(spec.total_rate()) {
  const double kd = static_cast<double>(k_);
  p_slow_ = kd * spec.slow_rate() / total_rate_;
  inv_p_slow_k_ = kd / p_slow_;
  inv_p_normal_k_ = kd / (1.0 - p_slow_);
  nm1_ = static_cast<double>(n_ - 1);
}

SimState make_state(Configuration initial, std::uint64_t seed) {
  SimState s;
  s.config = std::move(initial);
  s.rng = Rng(seed);
  s.seed = seed;
  return s;
}

EventRecord step(SimState& state, const EdgeSampler& sampler) {
  const double h = -std::log1p(-uniform01(state.rng)) / sampler.total_rate();
  state.micro_time += h;
  ++state.events;
  const Site x = sampler.sample(uniform01(state.rng));
  const bool changed = state.config.swap_in_place(x);
  return {x, changed, h};
}

void throw_budget_exceeded(const SimState& state, std::uint64_t budget) {
  std::ostringstream os;
  os << "event budget of " << budget << " exceeded (run seed " << state.seed
     << ", micro time " << state.micro_time << ")";
  throw ResourceError(os.str());
}

void audit_conservation(const SimState& state) {
  const std::size_t counted = state.config.count_range(0, state.config.size());
  if (counted != state.config.particle_count()) {
    std::ostringstream os;
    os << "particle count changed from " << state.config.particle_count() << " to " << counted
       << " (run seed " << state.seed << ", event " << state.events << ")";
    throw ConsistencyError(os.str());
  }
}

void run_until(SimState& state, const LatticeSpec& spec, const TimeScaleRegime& regime,
               double macro_t, std::uint64_t budget) {
  const double speedup = speedup_factor(spec, regime);
  const double target = macro_t * speedup;
  if (!(target >= state.micro_time))
    throw UsageError("run_until: macro time " + format_double(macro_t) +
                     " precedes the current state");
  if (target == state.micro_time) return;
  // Only the configuration at the target is observed, so the holding times
  // need not be drawn: the number of clock rings in the interval is Poisson
  // and the rung edges are independent of it.
  const EdgeSampler sampler(spec);
  std::poisson_distribution<std::uint64_t> rings(sampler.total_rate() * (target - state.micro_time));
  const std::uint64_t count = rings(state.rng);
  if (count > budget - std::min(budget, state.events)) {
    state.events += count;
    throw_budget_exceeded(state, budget);
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    if ((++state.events & kConservationAuditMask) == 0) audit_conservation(state);
    state.config.swap_in_place(sampler.sample(uniform01(state.rng)));
  }
  state.micro_time = target;
}

Configuration sample_initial(const LatticeSpec& spec, const Profile& gamma, Rng& rng) {
  Configuration c(spec.sites());
  const double nk = static_cast<double>(spec.sites());
  for (Site x = 0; x < spec.sites(); ++x) {
    const double p = gamma(static_cast<double>(x) / nk);
    if (uniform01(rng) < p) c.set(x, true);
  }
  return c;
}

void ReplicaPlan::validate() const {
  if (replicas < 1) throw UsageError("ReplicaPlan: replicas must be positive");
  for (std::size_t j = 0; j < macro_times.size(); ++j) {
    if (!(macro_times[j] >= 0.0) || !std::isfinite(macro_times[j]))
      throw UsageError("ReplicaPlan: macro times must be finite and nonnegative");
    if (j > 0 && macro_times[j] < macro_times[j - 1])
      throw UsageError("ReplicaPlan: macro times must be sorted");
  }
  if (const auto* sub = std::get_if<Subcritical>(&regime); sub && !(sub->theta > 0.0))
    throw UsageError("ReplicaPlan: subcritical regime requires theta > 0");
}

Estimate summarize(std::vector<double> samples) {
  Estimate e;
  const std::size_t r = samples.size();
  if (r == 0) return e;
  e.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(r);
  if (r >= 2) {
    double ss = 0.0;
    for (double v : samples) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(r - 1)) / std::sqrt(static_cast<double>(r));
  }
  e.samples = std::move(samples);
  return e;
}

std::vector<std::vector<double>> simulate_box_averages(const LatticeSpec& spec,
                                                       const ReplicaPlan& plan,
                                                       const Profile& gamma,
                                                       std::size_t replica,
                                                       std::uint64_t* events) {
  const std::uint64_t seed = derive_seed(plan.base_seed, replica);
  Rng init_rng(seed);
  Configuration initial = sample_initial(spec, gamma, init_rng);
  SimState state = make_state(std::move(initial), mix64(seed));
  state.seed = seed;
  std::vector<std::vector<double>> out;
  out.reserve(plan.macro_times.size());
  for (double t : plan.macro_times) {
    run_until(state, spec, plan.regime, t, plan.event_budget);
    out.push_back(box_averages(spec, state.config));
  }
  if (events) *events = state.events;
  return out;
}

BoxAverageRun run_box_averages(const LatticeSpec& spec, const ReplicaPlan& plan,
                               const Profile& gamma) {
  plan.validate();
  BoxAverageRun run;
  run.macro_times = plan.macro_times;
  run.k = spec.k();
  run.values.resize(plan.replicas);
  run.events.resize(plan.replicas);
  parallel_for(plan.replicas, [&](std::size_t r) {
    run.values[r] = simulate_box_averages(spec, plan, gamma, r, &run.events[r]);
  });
  return run;
}

Estimate BoxAverageRun::box_estimate(std::size_t j, std::size_t i) const {
  std::vector<double> s;
  s.reserve(values.size());
  for (const auto& rep : values) s.push_back(rep.at(j).at(i));
  return summarize(std::move(s));
}

std::vector<double> BoxAverageRun::pairing_samples(std::size_t j, const TestFunction& G) const {
  std::vector<double> s;
  s.reserve(values.size());
  const double kd = static_cast<double>(k);
  for (const auto& rep : values) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += rep.at(j)[i] / kd * G(static_cast<double>(i) / kd);
    s.push_back(acc);
  }
  return s;
}

void BoxAverageRun::write_csv(std::ostream& out) const {
  out << "replica,macro_time,box_index,box_average\n";
  for (std::size_t r = 0; r < values.size(); ++r)
    for (std::size_t j = 0; j < macro_times.size(); ++j)
      for (std::size_t i = 0; i < k; ++i)
        out << r << ',' << format_double(macro_times[j]) << ',' << i << ','
            << format_double(values[r][j][i]) << '\n';
}

std::vector<double> mixing_weights(const LatticeSpec& spec, const TestFunction& G) {
  const std::size_t n = spec.n();
  const double nk = static_cast<double>(spec.sites());
  std::vector<double> w(spec.sites());
  for (BoxIndex i = 0; i < spec.k(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += G(static_cast<double>(i * n + j) / nk);
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j)
      w[i * n + j] = (G(static_cast<double>(i * n + j) / nk) - mean) / nk;
  }
  return w;
}

std::vector<double> replacement_weights(const LatticeSpec& spec, const TestFunction& G) {
  const std::size_t n = spec.n();
  const double kd = static_cast<double>(spec.k());
  const double two_over_n = 2.0 / static_cast<double>(n);
  std::vector<double> w(spec.sites());
  for (BoxIndex i = 0; i < spec.k(); ++i) {
    const double scale = kd * G(static_cast<double>(i) / kd);
    for (std::size_t j = 0; j < n; ++j) {
      const double endpoint = (j == 0 ? 1.0 : 0.0) + (j == n - 1 ? 1.0 : 0.0);
      w[i * n + j] = scale * (endpoint - two_over_n);
    }
  }
  return w;
}

double integrated_statistic(const LatticeSpec& spec, const TimeScaleRegime& regime,
                            const std::vector<double>& weights, SimState& state,
                            double macro_t, std::uint64_t budget) {
  if (weights.size() != spec.sites()) throw UsageError("statistic weights have wrong size");
  if (!(macro_t >= 0.0)) throw UsageError("statistic time must be nonnegative");
  const double speedup = speedup_factor(spec, regime);
  const double start = state.micro_time;
  const double target = start + macro_t * speedup;
  const std::size_t nk = spec.sites();
  // vacancy time per site, settled lazily at each flip
  std::vector<double> vacant(nk, 0.0);
  std::vector<double> last(nk, start);
  auto flip = [&](Site x, double now) {
    if (state.config[x]) {  // was empty until now
      vacant[x] += now - last[x];
    }
    last[x] = now;
  };
  if (macro_t > 0.0) {
    EdgeSampler sampler(spec);
    advance_micro(state, sampler, target, budget, [&](Site x, double now) {
      flip(x, now);
      flip(x + 1 == nk ? 0 : x + 1, now);
    });
  }
  const double end = state.micro_time;
  // integral of sum_x c_x eta = -sum_x c_x * vacancy, per box to keep the
  // full configuration exactly zero
  double total = 0.0;
  const std::size_t n = spec.n();
  for (BoxIndex i = 0; i < spec.k(); ++i) {
    double box = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Site x = i * n + j;
      double v = vacant[x];
      if (!state.config[x]) v += end - last[x];
      box += weights[x] * v;
    }
    total -= box;
  }
  return total / speedup;
}

namespace {

Estimate integrated_estimate(const ReplicaPlan& plan, const LatticeSpec& spec,
                             const Profile& gamma, const std::vector<double>& weights,
                             double t) {
  std::vector<double> samples(plan.replicas);
  parallel_for(plan.replicas, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(plan.base_seed, r);
    Rng init_rng(seed);
    SimState state = make_state(sample_initial(spec, gamma, init_rng), mix64(seed));
    state.seed = seed;
    samples[r] = std::abs(
        integrated_statistic(spec, plan.regime, weights, state, t, plan.event_budget));
  });
  return summarize(std::move(samples));
}

}  // namespace

Estimate mixing_statistic(const ReplicaPlan& plan, const LatticeSpec& spec,
                          const Profile& gamma, const TestFunction& G, double t) {
  plan.validate();
  if (!std::holds_alternative<Subcritical>(plan.regime))
    throw UsageError("mixing_statistic requires a subcritical regime");
  return integrated_estimate(plan, spec, gamma, mixing_weights(spec, G), t);
}

Estimate replacement_statistic(const ReplicaPlan& plan, const LatticeSpec& spec,
                               const Profile& gamma, const TestFunction& G, double t) {
  plan.validate();
  if (!std::holds_alternative<Critical>(plan.regime))
    throw UsageError("replacement_statistic requires the critical regime");
  return integrated_estimate(plan, spec, gamma, replacement_weights(spec, G), t);
}

void write_statistic_csv(std::ostream& out, const std::string& statistic, const Estimate& e,
                         const LatticeSpec& spec, const TimeScaleRegime& regime,
                         std::uint64_t seed, bool header) {
  if (header) out << "statistic,estimate,stderr,n,k,regime,seed\n";
  out << statistic << ',' << format_double(e.mean) << ',' << format_double(e.std_error) << ','
      << spec.n() << ',' << spec.k() << ',' << regime_label(regime) << ',' << seed << '\n';
}

}  // namespace slowbond
