#include <random>

#include "dgalg/commands.hpp"
#include "dgalg/fixtures.hpp"
#include "dgalg/hkrconn.hpp"

namespace dga {

namespace {

bool positive_generators(const AnchoredModule& v) {
  for (int d : v.V.free->degs)
    if (d <= 0) return false;
  return true;
}

std::string describe_anchored(const AnchoredModule& v) {
  std::string s = describe(v.V) + ", anchor";
  const auto& A = *v.A();
  for (size_t l = 0; l < v.V.free->gens.size(); ++l) {
    Mat r = v.anchor(v.V.free->gens[l]);
    for (size_t j = 0; j < A.dim(); ++j) {
      Vec c = r.col(j);
      if (!is_zero(c)) s += " " + v.V.free->names[l] + "(" + A.space().name(j) + ")=" + vec_str(c, A.space());
    }
  }
  return s;
}

}  // namespace

Report identity_suite(const AnchoredModule& v, const Bimodule& m, const Bimodule& m2) {
  Report r;
  CdgaPtr A = v.A();
  r.merge("primitives of U: ", primitives(envelope_algebra(coequalizer_tower(v, 2))).report);
  r.merge("primitives of End(A): ", primitives(endomorphism_algebra(A)).report);
  r.merge("primitives of A: ", primitives(cdga_as_anchored_algebra(A)).report);
  r.merge("Sigma_V: ", build_sigma(v).report);
  auto sd = build_sigma_dual(v);
  r.merge("Sigma_V^*: ", sd.report);
  r.merge("chi: ", chi_involution(sd).report);
  r.merge("duality: ", theta_duality(v, m).report);
  r.merge("baer: ", baer_additivity_check(v, m, m2).report);
  if (!positive_generators(v)) return r;
  auto sq = build_sqzero(v);
  r.merge("B: ", sq.report);
  r.merge("A-dagger: ", build_a_dagger(sq).report);
  for (const Bimodule* x : {&m, &m2}) {
    auto h = hkr_class(v, *x);
    if (!h.split) continue;
    auto c = connection_from_splitting(v, *x, h);
    auto cm = connection_to_module(sq, c);
    r.merge("connection -> B-module: ", cm.report);
    r.merge("B-module -> connection: ", module_to_connection(sq, cm.T).report);
    r.add("round trip equivalent", round_trip(sq, c).equivalent);
  }
  return r;
}

std::vector<PerturbationCase> perturbation_suite(unsigned long seed, int count) {
  std::mt19937 g((std::mt19937::result_type)seed);
  std::vector<PerturbationCase> out;
  for (int k = 0; k < count; ++k) {
    CdgaPtr A = k % 2 == 0 ? fix_eta() : fix_dual();
    bool positive = draw(g, 0, 1) == 1;
    auto v = random_anchored(A, g, positive);
    auto m = random_module(A, g, "M");
    auto m2 = random_module(A, g, "M2");
    PerturbationCase c;
    c.label = A->name() + "; V " + describe_anchored(v) + "; M " + describe(m) + "; M2 " + describe(m2);
    try {
      Report r = identity_suite(v, m, m2);
      c.checks = r.checks().size();
      c.ok = r.ok();
      if (!c.ok) c.first_failure = r.failures().front().name;
    } catch (const std::exception& e) {
      c.ok = false;
      c.first_failure = std::string("exception: ") + e.what();
    }
    out.push_back(c);
  }
  return out;
}

Doc selftest(unsigned long seed, int perturbations) {
  Doc doc;
  doc.command = "selftest";
  doc.subject = "seed " + std::to_string(seed);

  // fixed fixtures
  struct Fx {
    std::string name;
    AnchoredModule v;
    Bimodule cone;
  };
  std::vector<Fx> fx{{"FIX-ETA", eta_anchored(), eta_cone()},
                     {"FIX-DUAL", dual_anchored(), dual_cone()},
                     {"FIX-DUAL positive", dual_positive_anchored(), dual_cone()}};
  for (auto& f : fx) {
    Report r = identity_suite(f.v, f.cone, free_rank(f.v.A(), 2));
    doc.section("identities")[f.name] = std::to_string(r.checks().size()) + " checks";
    doc.checks.merge("identities " + f.name + ": ", r);
  }

  Json cases = Json::object();
  size_t total = 0;
  auto pcs = perturbation_suite(seed, perturbations);
  for (size_t k = 0; k < pcs.size(); ++k) {
    total += pcs[k].checks;
    cases["case " + std::to_string(k)] = pcs[k].label + " :: " + std::to_string(pcs[k].checks) + " checks";
    doc.checks.add("perturbation " + std::to_string(k), pcs[k].ok, pcs[k].first_failure);
  }
  doc.section("perturbations")["count"] = perturbations;
  doc.section("perturbations")["checks"] = total;
  doc.section("perturbations")["cases"] = cases;

  // filtration of the envelope
  {
    auto u = coequalizer_tower(eta_anchored(), 3);
    std::vector<size_t> dims;
    bool pbw = true;
    for (int n = 0; n <= 3; ++n) {
      dims.push_back(u.F[n].dim());
      pbw = pbw && u.F[n].dim() == 2 * (size_t)(n + 1);
    }
    doc.section("envelope FIX-ETA N=3")["dim F^n"] = dims;
    doc.checks.add("envelope FIX-ETA: dim F^n = 2(n+1)", pbw);
    doc.checks.merge("envelope FIX-ETA: ", u.report);
  }

  // duality map, HKR verdicts, Baer additivity, formality
  for (auto& f : fx) {
    CdgaPtr A = f.v.A();
    std::vector<Bimodule> ms{free_rank(A, 1), free_rank(A, 2), f.cone};
    for (auto& m : ms) {
      const std::string tag = f.name + " " + m.tag + ": ";
      auto th = theta_duality(f.v, m);
      doc.checks.merge("duality " + tag, th.report);
      auto h = hkr_class(f.v, m);
      auto cs = connection_sequence(f.v, m);
      doc.checks.add("hkr " + tag + "class and connection sequence agree", h.split == cs.split);
      if (h.split) {
        auto c = connection_from_splitting(f.v, m, h);
        doc.checks.merge("hkr " + tag + "connection: ", c.report);
        doc.checks.merge("hkr " + tag + "splitting: ", splitting_from_connection(c).report);
      } else {
        doc.checks.add("hkr " + tag + "nonsplit certificate", h.ext.certificate.has_value());
      }
      doc.section("hkr verdicts")[f.name + " " + m.tag] = h.split ? "split" : "nonsplit";
      for (auto& m2 : ms) doc.checks.merge("baer " + tag + m2.tag + ": ", baer_additivity_check(f.v, m, m2).report);
      auto fs = formality_split(f.v, m, 3);
      doc.checks.merge("formality " + tag, fs.report);
      doc.checks.add("formality " + tag + "Theta_M verdict matches hkr", fs.theta_m_zero == h.split);
    }
  }

  // bar constructions on FIX-ETA
  {
    auto sq = build_sqzero(eta_anchored());
    auto t = bar_tor(sq, 3, {-4, 0});
    auto e = bar_ext(sq, 3, {-2, 3});
    doc.section("bar FIX-ETA N=3")["Tor"] = dims_str(t.h.dims);
    doc.section("bar FIX-ETA N=3")["J"] = dims_str(t.jet_dims);
    doc.section("bar FIX-ETA N=3")["Ext"] = dims_str(e.h.dims);
    doc.section("bar FIX-ETA N=3")["F"] = dims_str(e.envelope_dims);
    doc.checks.merge("bar tor: ", t.report);
    doc.checks.merge("bar ext: ", e.report);
  }
  return doc;
}

}  // namespace dga
