#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dga {

// Raised when an operation's input violates its precondition ("reject ... with a diagnostic").
class Rejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Check {
  std::string name;
  bool ok = true;
  std::string detail;
};

// Ordered list of named pass/fail checks.
class Report {
 public:
  void add(std::string name, bool ok, std::string detail = {});
  void merge(const std::string& prefix, const Report& other);
  bool ok() const;
  const std::vector<Check>& checks() const { return checks_; }
  std::vector<Check> failures() const;
  std::string text() const;
  // throws Rejected naming the first failure
  void require(const std::string& context) const;

 private:
  std::vector<Check> checks_;
};

}  // namespace dga
