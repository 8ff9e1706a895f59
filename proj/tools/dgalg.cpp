// Command-line driver; talks to the library only through dgalg.h.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dgalg.h"
#include "json.hpp"

namespace {

struct Args {
  std::string workspace;
  std::optional<int> order;
  std::vector<int> window;
  std::string module, anchored, cdga;
  std::optional<unsigned long> seed;
  int perturbations = 100;
};

void print_error(dg_status s, bool json) {
  static const char* kinds[] = {"ok", "parse", "semantic", "check", "usage", "internal"};
  if (json) {
    nlohmann::ordered_json j;
    j["ok"] = false;
    j["error"] = {{"kind", kinds[s]}, {"line", dg_last_error_line()}, {"message", dg_last_error()}};
    std::cout << j.dump(2) << "\n";
  }
  std::cerr << "error (" << kinds[s] << "): " << dg_last_error() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dgalg: exact computations with free dg-Lie algebroids"};
  app.require_subcommand(1);
  std::string format = "text", outdir;
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--output-dir", outdir, "also write the report to DIR/<command>.<txt|json> (env DGALG_OUTPUT_DIR)");
  app.set_version_flag("--version", std::string(dg_version()));

  Args a;
  auto ws_opt = [&](CLI::App* s) { s->add_option("workspace", a.workspace, "workspace file")->required(); };
  auto anchored = [&](CLI::App* s) { s->add_option("--anchored", a.anchored, "anchored module (default: first)"); };
  auto order = [&](CLI::App* s, bool req) {
    auto o = s->add_option("--order", a.order, "truncation order N");
    if (req) o->required();
  };
  auto module = [&](CLI::App* s, bool req) {
    auto o = s->add_option("--module", a.module, "module name");
    if (req) o->required();
  };

  auto* validate = app.add_subcommand("validate", "cdga, module and algebroid axioms");
  ws_opt(validate);
  for (const char* n : {"derivations", "kaehler"}) {
    auto* s = app.add_subcommand(n, std::string(n) + " of a cdga");
    ws_opt(s);
    s->add_option("--cdga", a.cdga, "cdga (default: first)");
  }
  auto* sigma = app.add_subcommand("sigma", "Atiyah bimodule, its dual, chi and the duality map");
  ws_opt(sigma);
  anchored(sigma);
  module(sigma, false);
  for (const char* n : {"envelope", "jet"}) {
    auto* s = app.add_subcommand(n, std::string("truncated ") + n + " tower");
    ws_opt(s);
    anchored(s);
    order(s, true);
  }
  for (const char* n : {"hkr", "connection"}) {
    auto* s = app.add_subcommand(n, n == std::string("hkr") ? "HKR class and Baer additivity" : "derived connection");
    ws_opt(s);
    anchored(s);
    module(s, true);
  }
  auto* formality = app.add_subcommand("formality", "filtration splitting through order N");
  ws_opt(formality);
  anchored(formality);
  module(formality, true);
  order(formality, true);
  auto* sqzero = app.add_subcommand("sqzero", "square-zero extension, A-dagger, extension theorem");
  ws_opt(sqzero);
  anchored(sqzero);
  auto* bar = app.add_subcommand("bar", "bar complexes against jets and envelope");
  ws_opt(bar);
  anchored(bar);
  order(bar, true);
  bar->add_option("--window", a.window, "degree window a b")->expected(2)->required();
  auto* selftest = app.add_subcommand("selftest", "seeded property suites");
  selftest->add_option("--seed", a.seed, "seed")->required();
  selftest->add_option("--perturbations", a.perturbations, "number of random perturbations")
      ->check(CLI::Range(0, 100000));
  auto* tasks = app.add_subcommand("tasks", "run the tasks declared in the workspace");
  ws_opt(tasks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : DG_ERR_USAGE;
  }
  const bool json = format == "json";
  if (outdir.empty())
    if (const char* env = std::getenv("DGALG_OUTPUT_DIR")) outdir = env;

  const std::string command = app.get_subcommands().front()->get_name();
  dg_report* report = nullptr;
  dg_status st;
  if (command == "selftest") {
    st = dg_selftest(*a.seed, a.perturbations, &report);
  } else {
    dg_workspace* ws = nullptr;
    st = dg_workspace_load(a.workspace.c_str(), &ws);
    if (st != DG_OK) {
      print_error(st, json);
      return st;
    }
    nlohmann::json o = nlohmann::json::object();
    if (a.order) o["order"] = *a.order;
    if (!a.window.empty()) o["window"] = a.window;
    if (!a.module.empty()) o["module"] = a.module;
    if (!a.anchored.empty()) o["anchored"] = a.anchored;
    if (!a.cdga.empty()) o["cdga"] = a.cdga;
    st = dg_run(ws, command.c_str(), o.dump().c_str(), &report);
    dg_workspace_free(ws);
  }
  if (!report) {
    print_error(st, json);
    return st;
  }
  char* out = json ? dg_report_json(report, 2) : dg_report_text(report);
  std::string body = out;
  if (json) body += "\n";
  dg_string_free(out);
  dg_report_free(report);
  std::cout << body;
  if (!outdir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    auto path = std::filesystem::path(outdir) / (command + (json ? ".json" : ".txt"));
    std::ofstream f(path);
    f << body;
    if (!f) {
      std::cerr << "error: cannot write " << path.string() << "\n";
      return DG_ERR_INTERNAL;
    }
  }
  return st;
}
