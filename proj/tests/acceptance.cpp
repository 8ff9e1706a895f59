// One line per acceptance criterion. argv[1]: path of the dgalg executable (criterion 8).
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "dgalg/commands.hpp"
#include "dgalg/workspace.hpp"
#include "oracles.hpp"

using namespace dga;

namespace {

const std::string fixture_dir = FIXTURE_DIR;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double s) {
  std::ostringstream o;
  o.precision(2);
  o << std::fixed << s << " s";
  return o.str();
}

std::vector<Workspace> shipped() {
  return {load_workspace(fixture_dir + "/fix_eta.dga"), load_workspace(fixture_dir + "/fix_dual.dga")};
}

Outcome identities() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  struct Fx {
    std::string name;
    AnchoredModule v;
    Bimodule m;
  };
  std::vector<Fx> fx{{"FIX-ETA", eta_anchored(), eta_cone()},
                     {"FIX-DUAL", dual_anchored(), dual_cone()},
                     {"FIX-DUAL |v|=1", dual_positive_anchored(), dual_cone()}};
  size_t checks = 0;
  for (auto& f : fx) {
    Report r = identity_suite(f.v, f.m, free_rank(f.v.A(), 2));
    checks += r.checks().size();
    if (!r.ok()) o.fail(f.name + ": " + r.failures().front().name);
  }
  auto pcs = perturbation_suite(0, 100);
  for (size_t k = 0; k < pcs.size(); ++k) {
    checks += pcs[k].checks;
    if (!pcs[k].ok) o.fail("perturbation " + std::to_string(k) + ": " + pcs[k].first_failure);
  }
  double s = seconds_since(t0);
  if (s >= 60) o.fail("took " + fmt(s));
  if (o.ok) o.detail = std::to_string(checks) + " exact checks, 3 fixtures + 100 perturbations, " + fmt(s);
  return o;
}

Outcome structure() {
  Outcome o;
  auto u = coequalizer_tower(eta_anchored(), 3);
  if (!u.report.ok()) o.fail(u.report.failures().front().name);
  std::string dims;
  for (int n = 0; n <= 3; ++n) {
    dims += (n ? ", " : "") + std::to_string(u.F[n].dim());
    if (u.F[n].dim() != 2 * (size_t)(n + 1)) o.fail("dim F^" + std::to_string(n) + " = " + std::to_string(u.F[n].dim()));
    if (!inverse(u.gr_iso[n])) o.fail("Gr^" + std::to_string(n) + " map not invertible");
    auto idx = nilpotency_index(u.F[n], n + 1);
    if (!idx || *idx > n) o.fail("nilpotency index of F^" + std::to_string(n));
  }
  if (o.ok) o.detail = "dim F^0..3 = " + dims + ", Gr^n isomorphisms invertible, nilpotency <= n";
  return o;
}

Outcome duality() {
  Outcome o;
  int count = 0;
  for (auto v : {eta_anchored(), dual_anchored()})
    for (int r : {1, 2}) {
      auto th = theta_duality(v, free_rank(v.A(), r));
      ++count;
      if (!th.invertible) o.fail(v.A()->name() + " rank " + std::to_string(r) + ": not invertible");
      if (!th.report.ok()) o.fail(v.A()->name() + " rank " + std::to_string(r) + ": " + th.report.failures().front().name);
    }
  if (o.ok) o.detail = std::to_string(count) + " cases invertible, diagram commutes";
  return o;
}

Outcome hkr() {
  Outcome o;
  int cases = 0, nonsplit = 0;
  for (auto& ws : shipped())
    for (auto& av : ws.anchored)
      for (auto& wm : ws.modules) {
        const std::string tag = ws.label.substr(ws.label.rfind('/') + 1) + " " + av.name + " " + wm.name;
        bool oracle = oracles::connection_exists(av.V, wm.M);
        auto h = hkr_class(av.V, wm.M);
        ++cases;
        if (h.split != oracle) o.fail(tag + ": ext verdict disagrees with the oracle");
        if (connection_sequence(av.V, wm.M).split != oracle) o.fail(tag + ": connection sequence disagrees");
        if (h.split) {
          auto c = connection_from_splitting(av.V, wm.M, h);
          if (!c.report.ok() || !validate_connection(c).ok()) o.fail(tag + ": connection from splitting");
          auto sp = splitting_from_connection(c);
          if (!sp.report.ok() || !sp.ext.split) o.fail(tag + ": splitting from connection");
        } else {
          ++nonsplit;
          if (!h.ext.certificate) o.fail(tag + ": nonsplit without certificate");
          bool threw = false;
          try {
            connection_from_splitting(av.V, wm.M, h);
          } catch (const std::exception&) {
            threw = true;
          }
          if (!threw) o.fail(tag + ": connection built on a nonsplit sequence");
        }
      }
  if (nonsplit == 0) o.fail("no certified nonsplit fixture");
  if (o.ok)
    o.detail = std::to_string(cases) + " workspace pairs agree three ways with the oracle, " + std::to_string(nonsplit) +
               " certified nonsplit";
  return o;
}

Outcome baer() {
  Outcome o;
  int cases = 0;
  for (auto& ws : shipped())
    for (auto& av : ws.anchored)
      for (auto& m1 : ws.modules)
        for (auto& m2 : ws.modules) {
          auto b = baer_additivity_check(av.V, m1.M, m2.M);
          ++cases;
          if (!b.additive || !b.report.ok())
            o.fail(av.name + " " + m1.name + " " + m2.name + ": " +
                   (b.report.ok() ? std::string("not additive") : b.report.failures().front().name));
        }
  if (o.ok) o.detail = std::to_string(cases) + " pairs, cocycle identity up to an explicit coboundary";
  return o;
}

Outcome formality() {
  Outcome o;
  int cases = 0, with_sections = 0;
  for (auto& ws : shipped())
    for (auto& av : ws.anchored)
      for (auto& wm : ws.modules) {
        const std::string tag = av.name + " " + wm.name;
        auto f = formality_split(av.V, wm.M, 3);
        ++cases;
        if (!f.report.ok()) o.fail(tag + ": " + f.report.failures().front().name);
        bool classes = f.theta_m_zero && f.theta_vm_zero;
        bool f2_splits = f.first_nonsplit == 0 || f.first_nonsplit > 2;
        if (classes != f2_splits) o.fail(tag + ": verdict differs from the obstruction pair");
        if (f.theta_m_zero != hkr_class(av.V, wm.M).split) o.fail(tag + ": Theta_M differs from the HKR verdict");
        if (!classes) continue;
        if (f.sections.size() != 4) {
          o.fail(tag + ": sections missing");
          continue;
        }
        ++with_sections;
        auto u = coequalizer_tower(av.V, 3);
        for (int n = 1; n <= 3; ++n) {
          Mat gr = tensor_A_maps(f.filtered[n], f.graded[n], u.F[n], wm.M, u.gr_map[n], 0,
                                 Mat::identity(wm.M.dim()), 0);
          if (gr * f.sections[n] != Mat::identity(f.graded[n].module.dim()))
            o.fail(tag + ": projection o section != id at n = " + std::to_string(n));
        }
      }
  if (o.ok)
    o.detail = std::to_string(cases) + " cases match the obstruction pair, " + std::to_string(with_sections) +
               " with sections through N = 3";
  return o;
}

Outcome koszul() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto sq = build_sqzero(eta_anchored());
  std::string summary;
  for (int N = 1; N <= 3; ++N) {
    Window w{-N - 1, N};
    auto t = bar_tor(sq, N, w);
    auto e = bar_ext(sq, N, w);
    const std::string tag = "N = " + std::to_string(N) + ": ";
    if (!t.report.ok()) o.fail(tag + "tor " + t.report.failures().front().name);
    if (!e.report.ok()) o.fail(tag + "ext " + e.report.failures().front().name);
    if (!t.comparison_iso || !t.multiplicative) o.fail(tag + "tor comparison");
    if (!e.comparison_iso || !e.multiplicative || !e.unit_to_unit) o.fail(tag + "ext comparison");
    int ct = 0, ce = 0;
    for (int i = std::max(w.lo, t.certified.lo); i <= std::min(w.hi, t.certified.hi); ++i, ++ct)
      if (oracles::dim_at(t.h.dims, i) != oracles::dim_at(t.jet_dims, i))
        o.fail(tag + "H^" + std::to_string(i) + " of bar vs jets");
    for (int i = std::max(w.lo, e.certified.lo); i <= std::min(w.hi, e.certified.hi); ++i, ++ce)
      if (oracles::dim_at(e.h.dims, i) != oracles::dim_at(e.envelope_dims, i))
        o.fail(tag + "H^" + std::to_string(i) + " of Hom vs envelope");
    if (ct == 0 || ce == 0) o.fail(tag + "empty certified window");
    summary += (N > 1 ? "; " : "") + std::string("N=") + std::to_string(N) + " tor " + std::to_string(ct) +
               " degrees, ext " + std::to_string(ce) + " degrees";
  }
  double s = seconds_since(t0);
  if (s >= 300) o.fail("took " + fmt(s));
  if (o.ok) o.detail = summary + ", multiplicative isos, " + fmt(s);
  return o;
}

struct Captured {
  int status = -1;
  std::string out;
};

Captured capture(const std::string& cmd) {
  Captured c;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return c;
  std::array<char, 1 << 14> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) c.out.append(buf.data(), n);
  int st = pclose(p);
  c.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return c;
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.fail("no dgalg executable given");
    return o;
  }
  const std::string cmd = "'" + cli + "' selftest --seed 0";
  auto a = capture(cmd), b = capture(cmd);
  if (a.status != 0 || b.status != 0) o.fail("selftest exit status " + std::to_string(a.status) + "/" + std::to_string(b.status));
  if (a.out != b.out) o.fail("reports differ");
  if (a.out.empty()) o.fail("empty report");
  if (o.ok) o.detail = "two runs, " + std::to_string(a.out.size()) + " identical bytes";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"identities on fixtures and 100 perturbations under 60 s", identities},
      {"filtration dims 2(n+1), Gr isomorphisms, nilpotency", structure},
      {"duality map invertible for rank 1 and 2", duality},
      {"HKR class, connection and splitting agree", hkr},
      {"Baer additivity on all fixture pairs", baer},
      {"formality verdict and sections", formality},
      {"bar complexes against jets and envelope, N = 1..3", koszul},
      {"selftest --seed 0 is byte-identical", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.ok;
    std::cout << "criterion " << k + 1 << ": " << (o.ok ? "PASS" : "FAIL") << " : " << criteria[k].first << " ("
              << o.detail << ")" << std::endl;
  }
  std::cout << (failed ? "acceptance: FAIL (" + std::to_string(failed) + " of 8)" : std::string("acceptance: PASS (8 of 8)"))
            << std::endl;
  return failed ? 1 : 0;
}
