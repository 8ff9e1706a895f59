#include <cstring>
#include <string>

#include "dgalg.h"
#include "dgalg/commands.hpp"

struct dg_workspace {
  dga::Workspace ws;
};
struct dg_report {
  dga::Doc doc;
};

namespace {

thread_local std::string last_error;
thread_local int last_line = 0;

dg_status fail(dg_status s, const std::string& msg, int line = 0) {
  last_error = msg;
  last_line = line;
  return s;
}

// Maps exceptions to status codes; f returns the status on success.
template <class F>
dg_status guarded(F&& f) {
  try {
    last_error.clear();
    last_line = 0;
    return f();
  } catch (const dga::ParseError& e) {
    return fail(DG_ERR_PARSE, e.what(), e.line());
  } catch (const dga::UsageError& e) {
    return fail(DG_ERR_USAGE, e.what());
  } catch (const dga::SemanticError& e) {
    return fail(DG_ERR_SEMANTIC, e.what());
  } catch (const dga::Rejected& e) {
    return fail(DG_ERR_SEMANTIC, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(DG_ERR_USAGE, std::string("options: ") + e.what());
  } catch (const std::exception& e) {
    return fail(DG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DG_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

dga::Options options_from(const char* text) {
  dga::Options o;
  if (!text || !*text) return o;
  auto j = nlohmann::json::parse(text);
  if (!j.is_object()) throw dga::UsageError("options must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "order") {
      o.order = v.get<int>();
    } else if (k == "window") {
      if (!v.is_array() || v.size() != 2) throw dga::UsageError("window must be [lo, hi]");
      o.window = dga::Window{v[0].get<int>(), v[1].get<int>()};
    } else if (k == "module") {
      o.module = v.get<std::string>();
    } else if (k == "anchored") {
      o.anchored = v.get<std::string>();
    } else if (k == "cdga") {
      o.cdga = v.get<std::string>();
    } else if (k == "seed") {
      if (!v.is_number_unsigned()) throw dga::UsageError("seed must be a nonnegative integer");
      o.seed = v.get<unsigned long>();
    } else {
      throw dga::UsageError("unknown option '" + k + "'");
    }
  }
  return o;
}

dg_status finish(dga::Doc&& d, dg_report** out) {
  bool ok = d.ok();
  *out = new dg_report{std::move(d)};
  return ok ? DG_OK : DG_ERR_CHECK_FAILED;
}

}  // namespace

extern "C" {

const char* dg_version(void) { return "1.0.0"; }
const char* dg_last_error(void) { return last_error.c_str(); }
int dg_last_error_line(void) { return last_line; }

dg_status dg_workspace_load(const char* path, dg_workspace** out) {
  if (!path || !out) return fail(DG_ERR_USAGE, "null argument");
  return guarded([&] {
    *out = new dg_workspace{dga::load_workspace(path)};
    return DG_OK;
  });
}

dg_status dg_workspace_parse(const char* text, const char* label, dg_workspace** out) {
  if (!text || !out) return fail(DG_ERR_USAGE, "null argument");
  return guarded([&] {
    *out = new dg_workspace{dga::parse_workspace(text, label ? label : "<memory>")};
    return DG_OK;
  });
}

void dg_workspace_free(dg_workspace* ws) { delete ws; }

size_t dg_command_count(void) { return dga::command_names().size(); }
const char* dg_command_name(size_t i) {
  const auto& n = dga::command_names();
  return i < n.size() ? n[i].c_str() : nullptr;
}

dg_status dg_run(const dg_workspace* ws, const char* command, const char* options_json, dg_report** out) {
  if (!command || !out) return fail(DG_ERR_USAGE, "null argument");
  *out = nullptr;
  return guarded([&] {
    dga::Options o = options_from(options_json);
    return finish(dga::run_command(ws ? &ws->ws : nullptr, command, o), out);
  });
}

dg_status dg_selftest(unsigned long seed, int perturbations, dg_report** out) {
  if (!out) return fail(DG_ERR_USAGE, "null argument");
  *out = nullptr;
  if (perturbations < 0) return fail(DG_ERR_USAGE, "perturbations must be nonnegative");
  return guarded([&] { return finish(dga::selftest(seed, perturbations), out); });
}

int dg_report_ok(const dg_report* r) { return r && r->doc.ok() ? 1 : 0; }
size_t dg_report_check_count(const dg_report* r) { return r ? r->doc.checks.checks().size() : 0; }
size_t dg_report_failure_count(const dg_report* r) { return r ? r->doc.checks.failures().size() : 0; }
char* dg_report_text(const dg_report* r) { return r ? dup(r->doc.text()) : nullptr; }
char* dg_report_json(const dg_report* r, int indent) { return r ? dup(r->doc.to_json().dump(indent)) : nullptr; }
void dg_report_free(dg_report* r) { delete r; }
void dg_string_free(char* s) { delete[] s; }

}  // extern "C"
