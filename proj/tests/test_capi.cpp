// Exercises the shared library through dgalg.h only, and the CLI as a subprocess.
#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "dgalg.h"
#include "doctest.h"
#include "json.hpp"

namespace {

const std::string fixtures = FIXTURE_DIR;
const std::string cli = DGALG_CLI;

struct Run {
  int status = -1;
  std::string out;
};

Run shell(const std::string& args) {
  Run r;
  std::string cmd = cli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  dg_string_free(s);
  return out;
}

dg_workspace* load(const std::string& name) {
  dg_workspace* ws = nullptr;
  REQUIRE(dg_workspace_load((fixtures + "/" + name).c_str(), &ws) == DG_OK);
  return ws;
}

}  // namespace

TEST_CASE("commands are listed") {
  std::vector<std::string> names;
  for (size_t i = 0; i < dg_command_count(); ++i) names.push_back(dg_command_name(i));
  for (const char* c : {"validate", "envelope", "hkr", "connection", "formality", "sqzero", "bar", "selftest"})
    CHECK(std::find(names.begin(), names.end(), c) != names.end());
  CHECK(dg_command_name(dg_command_count()) == nullptr);
  CHECK(std::string(dg_version()).size() > 0);
}

TEST_CASE("load errors") {
  dg_workspace* ws = nullptr;
  CHECK(dg_workspace_parse("cdga A\n  basis 1:0\n  bogus\nend\n", "mem", &ws) == DG_ERR_PARSE);
  CHECK(dg_last_error_line() == 3);
  CHECK(std::string(dg_last_error()).find("line 3") != std::string::npos);
  CHECK(ws == nullptr);
  CHECK(dg_workspace_parse("cdga A\n  basis 1:0 e:-1\n  unit 1\n  mul e e = 1\nend\n", "mem", &ws) ==
        DG_ERR_SEMANTIC);
  CHECK(dg_workspace_load("/nonexistent/file.dga", &ws) == DG_ERR_PARSE);
  CHECK(dg_workspace_load(nullptr, &ws) == DG_ERR_USAGE);
}

TEST_CASE("run statuses") {
  dg_workspace* ws = load("fix_eta.dga");
  dg_report* r = nullptr;
  CHECK(dg_run(ws, "validate", "{}", &r) == DG_OK);
  REQUIRE(r);
  CHECK(dg_report_ok(r) == 1);
  CHECK(dg_report_check_count(r) > 0);
  CHECK(dg_report_failure_count(r) == 0);
  dg_report_free(r);

  // the library defaults the order to 3 (the CLI insists on --order)
  r = nullptr;
  CHECK(dg_run(ws, "envelope", "{}", &r) == DG_OK);
  CHECK(take(dg_report_text(r)).find("2, 4, 6, 8") != std::string::npos);
  dg_report_free(r);
  r = nullptr;
  CHECK(dg_run(ws, "envelope", R"({"order": 9})", &r) == DG_ERR_USAGE);
  CHECK(r == nullptr);
  CHECK(dg_run(ws, "hkr", R"({"module": "nope"})", &r) == DG_ERR_USAGE);
  CHECK(dg_run(ws, "envelope", R"({"order": 2, "colour": 1})", &r) == DG_ERR_USAGE);
  CHECK(dg_run(ws, "envelope", "not json", &r) == DG_ERR_USAGE);
  CHECK(dg_run(ws, "frobnicate", "{}", &r) == DG_ERR_USAGE);
  CHECK(dg_selftest(0, -1, &r) == DG_ERR_USAGE);
  dg_workspace_free(ws);

  // square-zero side rejects a degree-0 generator
  ws = load("fix_dual.dga");
  CHECK(dg_run(ws, "sqzero", "{}", &r) == DG_ERR_SEMANTIC);
  CHECK(dg_run(ws, "sqzero", R"({"anchored": "V1"})", &r) == DG_OK);
  dg_report_free(r);
  dg_workspace_free(ws);
}

TEST_CASE("json report shape") {
  dg_workspace* ws = load("fix_eta.dga");
  dg_report* r = nullptr;
  REQUIRE(dg_run(ws, "hkr", R"({"module": "M"})", &r) == DG_OK);
  auto j = nlohmann::json::parse(take(dg_report_json(r, 2)));
  CHECK(j["command"] == "hkr");
  CHECK(j["ok"] == true);
  CHECK(j.contains("conventions"));
  CHECK(j["conventions"].is_object());
  CHECK(j["conventions"].size() > 0);
  CHECK(j["sections"].is_object());
  CHECK(j["failures"].is_array());
  std::string text = take(dg_report_text(r));
  CHECK(text.find("result: PASS") != std::string::npos);
  CHECK(text.find("nonsplit") != std::string::npos);
  dg_report_free(r);
  dg_workspace_free(ws);
}

TEST_CASE("reports are deterministic") {
  dg_workspace* ws = load("fix_eta.dga");
  auto once = [&] {
    dg_report* r = nullptr;
    REQUIRE(dg_run(ws, "bar", R"({"order": 2, "window": [-3, 2]})", &r) == DG_OK);
    std::string s = take(dg_report_json(r, 0));
    dg_report_free(r);
    return s;
  };
  CHECK(once() == once());
  dg_report *a = nullptr, *b = nullptr;
  REQUIRE(dg_selftest(3, 4, &a) == DG_OK);
  REQUIRE(dg_selftest(3, 4, &b) == DG_OK);
  CHECK(take(dg_report_text(a)) == take(dg_report_text(b)));
  dg_report_free(a);
  dg_report_free(b);
  dg_workspace_free(ws);
}

TEST_CASE("cli exit codes") {
  CHECK(shell("validate " + fixtures + "/fix_eta.dga").status == 0);
  auto e = shell("envelope " + fixtures + "/fix_eta.dga --order 3");
  CHECK(e.status == 0);
  CHECK(e.out.find("2, 4, 6, 8") != std::string::npos);
  CHECK(shell("envelope " + fixtures + "/fix_eta.dga").status == DG_ERR_USAGE);
  CHECK(shell("hkr " + fixtures + "/fix_eta.dga --module nope").status == DG_ERR_USAGE);
  CHECK(shell("sqzero " + fixtures + "/fix_dual.dga").status == DG_ERR_SEMANTIC);
  CHECK(shell("validate /nonexistent.dga").status == DG_ERR_PARSE);
  CHECK(shell("no-such-command").status == DG_ERR_USAGE);
  auto j = shell("--format json hkr " + fixtures + "/fix_eta.dga --module M");
  CHECK(j.status == 0);
  CHECK(nlohmann::json::parse(j.out)["command"] == "hkr");
  auto err = shell("--format json sqzero " + fixtures + "/fix_dual.dga");
  CHECK(err.status == DG_ERR_SEMANTIC);
  CHECK(nlohmann::json::parse(err.out)["error"]["kind"] == "semantic");
  auto t = shell("tasks " + fixtures + "/fix_dual.dga");
  CHECK(t.status == 0);
  CHECK(t.out.find("result: PASS") != std::string::npos);
}
