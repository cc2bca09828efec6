#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace slowbond {

/// Structured text report: one "name = value" line per scalar, in
/// insertion order. Boolean checks are stored as 1/0 and also tracked so
/// that all_passed() can gate exit codes.
class Report {
 public:
  Report() = default;
  explicit Report(std::string title) : title_(std::move(title)) {}

  void add(const std::string& name, double value);
  void add_check(const std::string& name, bool passed);
  /// Copies entries of `other` with `prefix` + "." prepended.
  void merge(const std::string& prefix, const Report& other);

  bool has(const std::string& name) const;
  double get(const std::string& name) const;  // throws UsageError if absent
  bool all_passed() const;
  std::vector<std::string> failed_checks() const;

  const std::string& title() const { return title_; }
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

  void write(std::ostream& out) const;
  static Report parse(std::istream& in);

 private:
  std::string title_;
  std::vector<std::pair<std::string, double>> entries_;
  std::vector<std::pair<std::string, bool>> checks_;
};

}  // namespace slowbond
