#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "slowbond/errors.hpp"
#include "slowbond/format.hpp"
#include "slowbond/harness.hpp"

namespace slowbond {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw UsageError("config: '" + key + "' expects an integer, got '" + s + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& s) {
  try {
    return parse_double(s);
  } catch (const std::exception&) {
    throw UsageError("config: '" + key + "' expects a number, got '" + s + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw UsageError("config: '" + key + "' expects true/false, got '" + s + "'");
}

std::pair<std::size_t, std::size_t> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw UsageError("config: sizes are written NxK, got '" + s + "'");
  return {parse_integer<std::size_t>("sizes", trim(s.substr(0, x))),
          parse_integer<std::size_t>("sizes", trim(s.substr(x + 1)))};
}

}  // namespace

ExperimentSpec parse_experiment_config(std::istream& in) {
  ExperimentSpec spec;
  std::set<std::string> seen;
  bool tolerance_set = false;
  std::string regime;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

    if (key == "experiment") {
      spec.kind = parse_experiment_kind(value);
    } else if (key == "name" || key == "label") {
      spec.label = value;
    } else if (key == "sizes") {
      spec.sizes.clear();
      for (const auto& s : split_list(value)) spec.sizes.push_back(parse_size(s));
    } else if (key == "regime") {
      if (value != "critical" && value != "subcritical")
        throw UsageError("config: regime must be 'critical' or 'subcritical'");
      regime = value;
    } else if (key == "theta") {
      spec.theta = parse_real(key, value);
    } else if (key == "alpha") {
      spec.alpha = parse_real(key, value);
    } else if (key == "beta") {
      spec.beta = parse_real(key, value);
    } else if (key == "profile") {
      spec.profile = value;
    } else if (key.rfind("profile.", 0) == 0) {
      spec.profile_params[key.substr(8)] = parse_real(key, value);
    } else if (key == "macro_times") {
      spec.macro_times.clear();
      for (const auto& s : split_list(value)) spec.macro_times.push_back(parse_real(key, s));
    } else if (key == "replicas") {
      spec.replicas = parse_integer<std::size_t>(key, value);
    } else if (key == "base_seed") {
      spec.base_seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "test_functions") {
      spec.test_functions = split_list(value);
    } else if (key == "event_budget") {
      spec.event_budget = parse_integer<std::uint64_t>(key, value);
    } else if (key == "tolerance") {
      spec.tolerance = parse_real(key, value);
      tolerance_set = true;
    } else if (key == "plot") {
      spec.plot = parse_bool(key, value);
    } else {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (regime == "critical" && spec.theta)
    throw UsageError("config: theta given together with regime = critical");
  if (regime == "subcritical" && !spec.theta)
    throw UsageError("config: regime = subcritical needs a theta");
  if (!tolerance_set && spec.kind == ExperimentKind::DiscreteHeat) spec.tolerance = 0.03;
  return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_experiment_config(in);
}

}  // namespace slowbond
