#include "dgalg/report.hpp"

#include <sstream>

namespace dga {

void Report::add(std::string name, bool ok, std::string detail) {
  checks_.push_back(Check{std::move(name), ok, std::move(detail)});
}

void Report::merge(const std::string& prefix, const Report& other) {
  for (auto& c : other.checks_) checks_.push_back(Check{prefix + c.name, c.ok, c.detail});
}

bool Report::ok() const {
  for (auto& c : checks_)
    if (!c.ok) return false;
  return true;
}

std::vector<Check> Report::failures() const {
  std::vector<Check> f;
  for (auto& c : checks_)
    if (!c.ok) f.push_back(c);
  return f;
}

std::string Report::text() const {
  std::ostringstream os;
  for (auto& c : checks_) {
    os << (c.ok ? "ok   " : "FAIL ") << c.name;
    if (!c.detail.empty()) os << "  [" << c.detail << "]";
    os << "\n";
  }
  return os.str();
}

void Report::require(const std::string& context) const {
  for (auto& c : checks_)
    if (!c.ok) throw Rejected(context + ": " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
}

}  // namespace dga
