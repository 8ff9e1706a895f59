#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "dgalg/workspace.hpp"
#include "json.hpp"

namespace dga {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Result of one command: ordered sections of values plus the named checks.
struct Doc {
  std::string command;
  std::string subject;
  std::deque<std::pair<std::string, Json>> sections;
  Report checks;

  Json& section(const std::string& title);
  bool ok() const { return checks.ok(); }
  Json to_json() const;
  std::string text() const;
};

// Fixed description of the sign and basis conventions; embedded in every report.
Json conventions();

const std::vector<std::string>& command_names();
// ws may be null only for selftest
Doc run_command(const Workspace* ws, const std::string& command, const Options& o);
// every task of the workspace, concurrently; assembled in declaration order
Doc run_tasks(const Workspace& ws);

// Every basis-level sign identity on one (V, M, M2): primitives, Atiyah bimodules, chi, the duality map,
// Baer additivity, and (for V with positive generators) the square-zero constructions.
Report identity_suite(const AnchoredModule& v, const Bimodule& m, const Bimodule& m2);

struct PerturbationCase {
  std::string label;
  size_t checks = 0;
  bool ok = true;
  std::string first_failure;
};
// identity_suite on `count` random (V, M, M2) over FIX-ETA and FIX-DUAL alternately
std::vector<PerturbationCase> perturbation_suite(unsigned long seed, int count);

// Seeded property suites over the built-in fixtures; deterministic for a fixed seed.
Doc selftest(unsigned long seed, int perturbations = 100);


}  // namespace dga
