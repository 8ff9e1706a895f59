#include "dgalg/commands.hpp"

#include <future>
#include <sstream>

#include "dgalg/hkrconn.hpp"

namespace dga {

Json& Doc::section(const std::string& title) {
  for (auto& [t, j] : sections)
    if (t == title) return j;
  sections.emplace_back(title, Json::object());
  return sections.back().second;
}

Json conventions() {
  Json c = Json::object();
  c["arithmetic"] = "exact rationals";
  c["shift"] = "(M[k])^n = M^(n+k)";
  c["cone"] = "cone(f)^n = target^n + source^(n+1), d(t, s) = (dt + f s, -ds)";
  c["koszul"] = "(f (x) g)(a (x) b) = (-1)^(|g||a|) f(a) (x) g(b)";
  c["dual"] = "left dual, phi(a k) = a phi(k), (d phi)(k) = (-1)^|k| (d_A phi(k) - phi(dk))";
  c["free basis"] = "a_i e_l at index l*dim(A) + i";
  c["tensor basis"] = "x|y at index i*dim(Y) + j";
  c["atiyah basis"] = "Sigma_V = A + V (A first); Sigma_V^* = V^* + A (V^* first)";
  c["square-zero basis"] = "B = A + s V^* (A first), a . s(phi) = (-1)^|a| s(a phi)";
  c["connection action"] = "column v*dim(M~) + m holds nabla_v(m)";
  return c;
}

namespace {

void render(std::ostream& os, const Json& j, int indent) {
  const std::string pad(indent, ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_object()) {
      os << pad << it.key() << ":\n";
      render(os, v, indent + 2);
      continue;
    }
    os << pad << it.key() << ": ";
    if (v.is_string()) {
      os << v.get<std::string>();
    } else if (v.is_boolean()) {
      os << (v.get<bool>() ? "yes" : "no");
    } else if (v.is_array()) {
      bool first = true;
      for (auto& e : v) {
        os << (first ? "" : ", ") << (e.is_string() ? e.get<std::string>() : e.dump());
        first = false;
      }
    } else {
      os << v.dump();
    }
    os << "\n";
  }
}

}  // namespace

Json Doc::to_json() const {
  Json j = Json::object();
  j["command"] = command;
  j["subject"] = subject;
  j["conventions"] = conventions();
  Json s = Json::object();
  for (auto& [t, v] : sections) s[t] = v;
  j["sections"] = s;
  Json cs = Json::array();
  for (auto& c : checks.checks()) cs.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  j["checks"] = cs;
  j["ok"] = ok();
  Json f = Json::array();
  for (auto& c : checks.failures()) f.push_back({{"name", c.name}, {"detail", c.detail}});
  j["failures"] = f;
  return j;
}

std::string Doc::text() const {
  std::ostringstream os;
  os << "dgalg " << command;
  if (!subject.empty()) os << " [" << subject << "]";
  os << "\nconventions:\n";
  render(os, conventions(), 2);
  for (auto& [t, v] : sections) {
    os << "== " << t << "\n";
    render(os, v, 2);
  }
  os << "checks:\n";
  for (auto& c : checks.checks()) {
    os << (c.ok ? "  ok   " : "  FAIL ") << c.name;
    if (!c.detail.empty()) os << "  [" << c.detail << "]";
    os << "\n";
  }
  auto f = checks.failures();
  os << "result: " << (f.empty() ? "PASS" : "FAIL") << " (" << checks.checks().size() << " checks, " << f.size()
     << " failed)\n";
  for (auto& c : f) os << "failure: " << c.name << (c.detail.empty() ? "" : " :: " + c.detail) << "\n";
  return os.str();
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> n{"validate", "derivations", "kaehler", "sigma",  "envelope", "jet",     "hkr",
                                          "connection", "formality", "sqzero",  "bar",      "selftest", "tasks"};
  return n;
}

namespace {

std::string dims_of(const GradedSpace& s) { return dims_str(s.dims()); }

const WsCdga& pick_cdga(const Workspace& ws, const Options& o) {
  if (o.cdga) {
    if (auto c = ws.find_cdga(*o.cdga)) return *c;
    throw UsageError("unknown cdga '" + *o.cdga + "'");
  }
  if (o.anchored)
    if (auto v = ws.find_anchored(*o.anchored)) return *ws.find_cdga(v->over);
  if (ws.cdgas.empty()) throw UsageError("workspace declares no cdga");
  return ws.cdgas.front();
}

const WsAnchored& pick_anchored(const Workspace& ws, const Options& o) {
  if (o.anchored) {
    if (auto v = ws.find_anchored(*o.anchored)) return *v;
    throw UsageError("unknown anchored module '" + *o.anchored + "'");
  }
  for (auto& v : ws.anchored)
    if (!o.cdga || v.over == *o.cdga) return v;
  throw UsageError("workspace declares no anchored module" + (o.cdga ? " over " + *o.cdga : std::string()));
}

const WsModule& pick_module(const Workspace& ws, const Options& o, const WsAnchored& v) {
  if (!o.module) throw UsageError("--module is required");
  auto m = ws.find_module(*o.module);
  if (!m) throw UsageError("unknown module '" + *o.module + "'");
  if (m->over != v.over)
    throw UsageError("module " + m->name + " is over " + m->over + " but " + v.name + " is over " + v.over);
  return *m;
}

std::vector<const WsModule*> modules_over(const Workspace& ws, const std::string& a, bool free_only) {
  std::vector<const WsModule*> r;
  for (auto& m : ws.modules)
    if (m.over == a && (!free_only || (m.M.free && check_triangular_free(m.M).ok()))) r.push_back(&m);
  return r;
}

int order_of(const Options& o, int dflt) {
  int n = o.order.value_or(dflt);
  if (n < 0 || n > 6) throw UsageError("--order must lie in 0..6");
  return n;
}

Json matrix_json(const Mat& m) { return m.str(); }

void cmd_validate(const Workspace& ws, Doc& doc) {
  for (auto& c : ws.cdgas) {
    auto& s = doc.section("cdga " + c.name);
    s["basis"] = dims_of(c.A->space());
    doc.checks.merge("cdga " + c.name + ": ", validate_cdga(*c.A));
    auto t = derivations(c.A);
    s["derivations"] = dims_of(t.space);
    doc.checks.merge("tangent algebroid of " + c.name + ": ", validate_algebroid(tangent_algebroid(t)));
  }
  for (auto& m : ws.modules) {
    auto& s = doc.section("module " + m.name);
    s["over"] = m.over;
    s["dims"] = dims_of(m.M.space);
    s["symmetric"] = is_symmetric(m.M);
    s["triangular-free"] = m.M.free.has_value() && check_triangular_free(m.M).ok();
    doc.checks.merge("module " + m.name + ": ", validate_bimodule(m.M));
  }
  for (auto& v : ws.anchored) {
    auto& s = doc.section("anchored " + v.name);
    s["over"] = v.over;
    s["dims"] = dims_of(v.V.V.space);
    doc.checks.merge("anchored " + v.name + ": ", validate_anchored(v.V));
    doc.checks.merge("anchored " + v.name + ": ", check_triangular_free(v.V.V));
  }
}

void cmd_derivations(const WsCdga& c, Doc& doc) {
  auto t = derivations(c.A);
  auto& s = doc.section("derivations of " + c.name);
  s["dims"] = dims_of(t.space);
  Json maps = Json::object();
  for (size_t k = 0; k < t.dim(); ++k) {
    Json m = Json::object();
    for (size_t j = 0; j < c.A->dim(); ++j) m[c.A->space().name(j)] = vec_str(t.maps[k].col(j), c.A->space());
    maps[t.space.name(k) + " (deg " + std::to_string(t.space.deg(k)) + ")"] = m;
  }
  s["basis"] = maps;
  Json br = Json::object();
  for (size_t i = 0; i < t.dim(); ++i)
    for (size_t j = 0; j < t.dim(); ++j) {
      Vec b = t.bracket.col(i * t.dim() + j);
      if (!is_zero(b)) br["[" + t.space.name(i) + ", " + t.space.name(j) + "]"] = vec_str(b, t.space);
    }
  s["nonzero brackets"] = br.empty() ? Json("none") : br;
  doc.checks.merge("derivations: ", validate_derivations(t));
}

void cmd_kaehler(const WsCdga& c, Doc& doc) {
  auto k = kaehler(c.A);
  auto& s = doc.section("Kaehler differentials of " + c.name);
  s["dims"] = dims_of(k.module.space);
  Json u = Json::object();
  for (size_t j = 0; j < c.A->dim(); ++j) u["d" + c.A->space().name(j)] = vec_str(k.universal.col(j), k.module.space);
  s["universal derivation"] = u;
  doc.checks.merge("kaehler: ", validate_kaehler(k));
  auto p = pairing_check(derivations(c.A), k);
  s["T_A -> D(Omega) invertible"] = p.iso;
  s["Omega -> D(T_A) invertible"] = p.reverse_iso;
  doc.checks.merge("pairing: ", p.report);
}

void cmd_sigma(const Workspace& ws, const WsAnchored& v, const Options& o, Doc& doc) {
  auto at = build_sigma(v.V);
  auto& s = doc.section("Atiyah bimodule of " + v.name);
  s["dims"] = dims_of(at.sigma.space);
  auto nil = nilpotency_index(at.sigma, 6);
  s["nilpotency index"] = nil ? Json(*nil) : Json("> 6");
  doc.checks.merge("Sigma_V: ", at.report);
  auto sd = build_sigma_dual(v.V);
  doc.section("dual Atiyah bimodule")["dims"] = dims_of(sd.sigma.space);
  doc.section("dual Atiyah bimodule")["symmetric"] = is_symmetric(sd.sigma);
  doc.checks.merge("Sigma_V^*: ", sd.report);
  auto chi = chi_involution(sd);
  doc.checks.merge("chi: ", chi.report);
  doc.checks.merge("first jets pushout: ", jets_pushout(v.V).report);
  std::vector<const WsModule*> ms;
  if (o.module)
    ms.push_back(&pick_module(ws, o, v));
  else
    ms = modules_over(ws, v.over, true);
  for (auto* m : ms) {
    auto th = theta_duality(v.V, m->M);
    doc.section("duality map for " + m->name)["invertible"] = th.invertible;
    doc.checks.merge("duality " + m->name + ": ", th.report);
  }
}

Json filtration_table(const TruncatedEnvelope& u) {
  Json t = Json::object();
  std::vector<size_t> tot;
  for (int n = 0; n <= u.order; ++n) tot.push_back(u.F[n].dim());
  t["dim F^n, n = 0.." + std::to_string(u.order)] = tot;
  Json per = Json::object();
  for (int n = 0; n <= u.order; ++n) per["F^" + std::to_string(n)] = dims_of(u.F[n].space);
  t["graded dims"] = per;
  return t;
}

void cmd_envelope(const WsAnchored& v, int N, Doc& doc) {
  auto u = coequalizer_tower(v.V, N);
  auto& s = doc.section("envelope of " + v.name);
  s = filtration_table(u);
  Json gr = Json::object();
  for (int n = 0; n <= N; ++n) {
    auto nil = nilpotency_index(u.F[n], n + 2);
    gr["n = " + std::to_string(n)] = Json{{"V^(x)n dims", dims_of(u.vpowers[n].space)},
                                          {"Gr^n -> V^(x)n", matrix_json(u.gr_iso[n])},
                                          {"nilpotency index", nil ? Json(*nil) : Json("> " + std::to_string(n + 2))}};
  }
  doc.section("associated graded") = gr;
  doc.checks.merge("envelope: ", u.report);
  doc.checks.merge("relation: ", enveloping_relation_check(u));
  auto p = primitives(envelope_algebra(u));
  doc.section("primitives")["dim"] = p.basis.cols();
  doc.checks.merge("primitives: ", p.report);
}

void cmd_jet(const WsAnchored& v, int N, Doc& doc) {
  auto u = coequalizer_tower(v.V, N);
  auto c = coproduct(u);
  doc.checks.merge("coproduct: ", c.report);
  auto j = jet_tower(u, c);
  auto& s = doc.section("jets of " + v.name);
  std::vector<size_t> tot;
  Json per = Json::object();
  for (int n = 0; n <= N; ++n) {
    tot.push_back(j.levels[n].module.dim());
    per["D(F^" + std::to_string(n) + ")"] = dims_of(j.levels[n].module.space);
  }
  s["dim J^n, n = 0.." + std::to_string(N)] = tot;
  s["graded dims"] = per;
  doc.checks.merge("jets: ", j.report);
}

std::string certificate_str(const std::optional<Vec>& c) {
  if (!c) return "none";
  std::ostringstream os;
  size_t nz = 0;
  for (auto& x : *c) nz += sgn(x) != 0;
  os << "Farkas vector with " << nz << " nonzero entries";
  return os.str();
}

void cmd_hkr(const Workspace& ws, const WsAnchored& v, const WsModule& m, Doc& doc) {
  auto h = hkr_class(v.V, m.M);
  auto& s = doc.section("HKR class of " + m.name);
  s["split"] = h.split;
  s["cocycle"] = matrix_json(h.ext.cocycle);
  s[h.split ? "cobounding map" : "nonvanishing certificate"] =
      h.split ? matrix_json(h.ext.cobound) : Json(certificate_str(h.ext.certificate));
  doc.checks.merge("hkr: ", h.report);
  auto cs = connection_sequence(v.V, m.M);
  s["connection sequence split"] = cs.split;
  doc.checks.add("verdicts agree: HKR class vs connection sequence", cs.split == h.split);
  if (h.split) {
    auto c = connection_from_splitting(v.V, m.M, h);
    doc.checks.merge("connection from splitting: ", c.report);
    auto sp = splitting_from_connection(c);
    doc.checks.merge("splitting from connection: ", sp.report);
    doc.checks.add("splitting from connection cobounds the class", sp.ext.split);
  }
  for (auto* m2 : modules_over(ws, v.over, true)) {
    auto b = baer_additivity_check(v.V, m.M, m2->M);
    doc.section("Baer additivity")[m.name + " + " + m2->name] = b.additive;
    doc.checks.merge("baer " + m.name + "," + m2->name + ": ", b.report);
  }
}

void cmd_connection(const WsAnchored& v, const WsModule& m, Doc& doc) {
  auto h = hkr_class(v.V, m.M);
  auto& s = doc.section("derived connection on " + m.name);
  s["exists"] = h.split;
  auto can = canonical_connection(v.V, m.M);
  s["generator-wise connection is a chain map"] = can.report.ok();
  if (!h.split) {
    s["obstruction certificate"] = certificate_str(h.ext.certificate);
    doc.checks.add("nonexistence certified", h.ext.certificate.has_value());
    return;
  }
  auto c = connection_from_splitting(v.V, m.M, h);
  s["M~ dims"] = dims_of(c.Mt.space);
  s["nabla"] = matrix_json(c.nabla);
  doc.checks.merge("connection: ", c.report);
  auto d = dual_connection(c);
  doc.checks.merge("dual connection: ", d.report);
}

void cmd_formality(const WsAnchored& v, const WsModule& m, int N, Doc& doc) {
  auto f = formality_split(v.V, m.M, N);
  auto& s = doc.section("formality of " + m.name + " through order " + std::to_string(N));
  s["Theta_M = 0"] = f.theta_m_zero;
  s["Theta_(V (x) M) = 0"] = f.theta_vm_zero;
  s["first nonsplit step"] = f.first_nonsplit == 0 ? Json("none") : Json(f.first_nonsplit);
  s["sections built"] = f.sections.size();
  doc.checks.merge("formality: ", f.report);
}

void cmd_sqzero(const Workspace& ws, const WsAnchored& v, Doc& doc) {
  auto sq = build_sqzero(v.V);
  auto& s = doc.section("square-zero extension of " + v.name);
  s["B dims"] = dims_of(sq.B->space());
  s["H(B)"] = dims_str(cohomology(sq.B->space(), sq.B->d()).dims);
  Json d = Json::object();
  for (size_t i = 0; i < sq.B->dim(); ++i) d["d " + sq.B->space().name(i)] = vec_str(sq.B->d().col(i), sq.B->space());
  s["differential"] = d;
  doc.checks.merge("B: ", sq.report);
  doc.checks.merge("B: ", validate_cdga(*sq.B));
  auto ad = build_a_dagger(sq);
  doc.section("A-dagger")["dims"] = dims_of(ad.Ad->space());
  doc.section("A-dagger")["literal product reading bilinear"] = ad.literal_reading_ok;
  doc.checks.merge("A-dagger: ", ad.report);
  auto mu = module_to_connection(sq, unit_bimodule(sq.B));
  doc.checks.merge("B as B-module -> connection: ", mu.report);
  for (auto* m : modules_over(ws, v.over, true)) {
    auto h = hkr_class(v.V, m->M);
    auto& r = doc.section("extension theorem on " + m->name);
    r["connection exists"] = h.split;
    if (!h.split) continue;
    auto c = connection_from_splitting(v.V, m->M, h);
    auto cm = connection_to_module(sq, c);
    r["B-module dims"] = dims_of(cm.T.space);
    doc.checks.merge(m->name + " connection -> module: ", cm.report);
    auto mc = module_to_connection(sq, cm.T);
    doc.checks.merge(m->name + " module -> connection: ", mc.report);
    doc.checks.add(m->name + " round trip equivalent", round_trip(sq, c).equivalent);
  }
}

void cmd_bar(const WsAnchored& v, int N, Window w, Doc& doc) {
  auto sq = build_sqzero(v.V);
  auto t = bar_tor(sq, N, w);
  auto& s = doc.section("Tor via bar complex");
  s["bar dims"] = dims_of(t.bar.space);
  s["H"] = dims_str(t.h.dims);
  s["certified degrees"] = std::to_string(t.certified.lo) + ".." + std::to_string(t.certified.hi);
  s["H(J^[N])"] = dims_str(t.jet_dims);
  s["comparison iso"] = t.comparison_iso;
  s["multiplicative"] = t.multiplicative;
  doc.checks.merge("tor: ", t.report);
  auto e = bar_ext(sq, N, w);
  auto& x = doc.section("Ext via Hom complex");
  x["Hom dims"] = dims_of(e.space);
  x["H"] = dims_str(e.h.dims);
  x["certified degrees"] = std::to_string(e.certified.lo) + ".." + std::to_string(e.certified.hi);
  x["H(F^N)"] = dims_str(e.envelope_dims);
  x["comparison iso"] = e.comparison_iso;
  x["multiplicative"] = e.multiplicative;
  x["unit to unit"] = e.unit_to_unit;
  doc.checks.merge("ext: ", e.report);
}

}  // namespace

Doc run_command(const Workspace* ws, const std::string& cmd, const Options& o) {
  Doc doc;
  doc.command = cmd;
  if (cmd == "selftest") return selftest(o.seed.value_or(0));
  if (!ws) throw UsageError("command '" + cmd + "' needs a workspace");
  if (cmd == "tasks") return run_tasks(*ws);
  if (cmd == "validate") {
    doc.subject = ws->label;
    cmd_validate(*ws, doc);
    return doc;
  }
  if (cmd == "derivations" || cmd == "kaehler") {
    auto& c = pick_cdga(*ws, o);
    doc.subject = c.name;
    cmd == "derivations" ? cmd_derivations(c, doc) : cmd_kaehler(c, doc);
    return doc;
  }
  bool known = false;
  for (auto& n : command_names()) known |= n == cmd;
  if (!known) throw UsageError("unknown command '" + cmd + "'");
  auto& v = pick_anchored(*ws, o);
  doc.subject = v.name + " over " + v.over;
  if (cmd == "sigma") {
    cmd_sigma(*ws, v, o, doc);
  } else if (cmd == "envelope") {
    cmd_envelope(v, order_of(o, 3), doc);
  } else if (cmd == "jet") {
    cmd_jet(v, order_of(o, 3), doc);
  } else if (cmd == "hkr" || cmd == "connection" || cmd == "formality") {
    auto& m = pick_module(*ws, o, v);
    doc.subject += ", module " + m.name;
    if (cmd == "hkr")
      cmd_hkr(*ws, v, m, doc);
    else if (cmd == "connection")
      cmd_connection(v, m, doc);
    else
      cmd_formality(v, m, order_of(o, 3), doc);
  } else if (cmd == "sqzero") {
    cmd_sqzero(*ws, v, doc);
  } else if (cmd == "bar") {
    int N = order_of(o, 3);
    cmd_bar(v, N, o.window.value_or(Window{-N - 1, N}), doc);
  }
  return doc;
}

Doc run_tasks(const Workspace& ws) {
  Doc all;
  all.command = "tasks";
  all.subject = ws.label;
  auto& list = all.section("tasks");
  if (ws.tasks.empty()) list["none"] = "workspace declares no tasks";
  std::vector<std::future<Doc>> jobs;
  for (auto& t : ws.tasks) {
    if (t.command == "tasks" || t.command == "selftest")
      throw UsageError("line " + std::to_string(t.line) + ": a task cannot run '" + t.command + "'");
    jobs.push_back(std::async(std::launch::async, [&ws, &t] { return run_command(&ws, t.command, t.options); }));
  }
  for (size_t k = 0; k < jobs.size(); ++k) {
    const auto& t = ws.tasks[k];
    try {
      Doc d = jobs[k].get();
      for (auto& [title, v] : d.sections) all.sections.emplace_back(t.name + ": " + title, v);
      all.checks.merge(t.name + ": ", d.checks);
      all.section("tasks")[t.name] = t.command + (d.ok() ? " PASS" : " FAIL");
    } catch (const std::exception& e) {
      all.checks.add(t.name + ": task runs", false, e.what());
      all.section("tasks")[t.name] = t.command + " ERROR";
    }
  }
  return all;
}

}  // namespace dga
