#include "slowbond/report.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "slowbond/errors.hpp"
#include "slowbond/format.hpp"

namespace slowbond {

void Report::add(const std::string& name, double value) {
  if (name.find('=') != std::string::npos || name.find('\n') != std::string::npos)
    throw UsageError("report entry names may not contain '=' or newlines");
  entries_.emplace_back(name, value);
}

void Report::add_check(const std::string& name, bool passed) {
  add(name, passed ? 1.0 : 0.0);
  checks_.emplace_back(name, passed);
}

void Report::merge(const std::string& prefix, const Report& other) {
  std::vector<std::string> check_names;
  for (const auto& [name, ok] : other.checks_) check_names.push_back(name);
  for (const auto& [name, value] : other.entries_) {
    const std::string full = prefix.empty() ? name : prefix + "." + name;
    if (std::find(check_names.begin(), check_names.end(), name) != check_names.end())
      add_check(full, value != 0.0);
    else
      add(full, value);
  }
}

bool Report::has(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == name; });
}

double Report::get(const std::string& name) const {
  for (const auto& [n, v] : entries_)
    if (n == name) return v;
  throw UsageError("report has no entry '" + name + "'");
}

bool Report::all_passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const auto& c) { return c.second; });
}

std::vector<std::string> Report::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& [name, ok] : checks_)
    if (!ok) out.push_back(name);
  return out;
}

void Report::write(std::ostream& out) const {
  if (!title_.empty()) out << "# " << title_ << '\n';
  for (const auto& [name, value] : entries_) out << name << " = " << format_double(value) << '\n';
}

Report Report::parse(std::istream& in) {
  Report r;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (r.title_.empty() && line.size() > 2) r.title_ = line.substr(2);
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw UsageError("malformed report line: " + line);
    r.entries_.emplace_back(line.substr(0, eq), parse_double(line.substr(eq + 3)));
  }
  return r;
}

}  // namespace slowbond
