#include "common.hpp"
#include "doctest.h"
#include "dgalg/hkrconn.hpp"
#include "oracles.hpp"

using namespace testing;

namespace {

bool oracle_connection_exists(const AnchoredModule& v, const Bimodule& m) { return oracles::connection_exists(v, m); }

std::vector<AnchoredModule> anchors() {
  return {eta_anchored(), dual_anchored(), dual_positive_anchored(), with_zero_anchor(eta_anchored()),
          with_zero_anchor(dual_anchored())};
}

std::vector<Bimodule> modules_over(CdgaPtr A) {
  std::vector<Bimodule> out{free_rank(A, 1), free_rank(A, 2)};
  out.push_back(A == fix_eta() || A->name() == fix_eta()->name() ? eta_cone() : dual_cone());
  return out;
}

}  // namespace

TEST_CASE("oracle on the hand fixture") {
  // FIX-ETA cone: nabla_v(e1) = c eta e0 forces e0 = 0 in the chain condition
  CHECK_FALSE(oracle_connection_exists(eta_anchored(), eta_cone()));
  CHECK(oracle_connection_exists(eta_anchored(), free_rank(fix_eta(), 2)));
  CHECK(oracle_connection_exists(with_zero_anchor(eta_anchored()), eta_cone()));
}

TEST_CASE("HKR verdict agrees with the oracle on fixtures") {
  for (auto& v : anchors()) {
    for (auto& m : modules_over(v.A())) {
      INFO(v.A()->name(), " ", v.name, " ", m.tag);
      bool oracle = oracle_connection_exists(v, m);
      auto h = hkr_class(v, m);
      CHECK(h.report.ok());
      CHECK(h.split == oracle);
      CHECK(connection_sequence(v, m).split == oracle);
      if (h.split) {
        auto c = connection_from_splitting(v, m, h);
        CHECK(c.report.ok());
        CHECK(validate_connection(c).ok());
        auto sp = splitting_from_connection(c);
        CHECK(sp.report.ok());
        CHECK(sp.ext.split);
      } else {
        CHECK(h.ext.certificate.has_value());
        CHECK_THROWS(connection_from_splitting(v, m, h));
      }
    }
  }
}

TEST_CASE("HKR verdict agrees with the oracle on random modules") {
  std::mt19937 g(2024);
  int nonsplit = 0;
  for (int round = 0; round < 150; ++round) {
    auto v = anchors()[round % 5];
    auto m = random_module(v.A(), g, "M");
    INFO(v.A()->name(), " ", v.name, " ", describe(m));
    bool oracle = oracle_connection_exists(v, m);
    nonsplit += !oracle;
    CHECK(hkr_class(v, m).split == oracle);
  }
  CHECK(nonsplit > 0);
}

TEST_CASE("shifted eta-cones with random coefficients") {
  // e0 (k), e1 (k - 2), d e1 = c eta e0: nonsplit exactly when c != 0 and the anchor is nonzero
  std::mt19937 g(17);
  auto A = fix_eta();
  for (int round = 0; round < 20; ++round) {
    int k = draw(g, -1, 1), c = draw(g, -3, 3);
    Mat d1(2, 2);
    d1(1, 0) = c;
    auto m = free_module(A, {{"e0", k}, {"e1", k - 2}}, {Mat(2, 2), d1}, "cone");
    for (auto& v : {eta_anchored(), with_zero_anchor(eta_anchored())}) {
      INFO(k, " ", c, " ", v.name);
      bool expect = c == 0 || v.rho[0].is_zero();
      CHECK(oracle_connection_exists(v, m) == expect);
      CHECK(hkr_class(v, m).split == expect);
    }
  }
}

TEST_CASE("canonical connection on A") {
  auto v = eta_anchored();
  auto m = free_rank(fix_eta(), 1);
  auto c = canonical_connection(v, m);
  CHECK(validate_connection(c).ok());
  // nabla_v(eta) = (-1)^{|v||eta|} eta nabla_v(1) + rho(v)(eta) 1 = 1
  CHECK(c.action.col(0 * m.dim() + 1) == unit_vec(2, 0));
  CHECK(is_zero(c.action.col(0)));
  // mu((a, v) (x) 1) = a + nabla_v(1)
  auto sp = splitting_from_connection(c);
  CHECK(sp.report.ok());
  auto dc = dual_connection(c);
  CHECK(dc.report.ok());
  CHECK(validate_connection(dc.connection).ok());
  // the dual of A is A and the dual connection is again canonical
  CHECK(dc.connection.action.col(1) == unit_vec(2, 0));
  CHECK(is_zero(dc.connection.action.col(0)));
}

TEST_CASE("perturbed connection dualizes to minus the transpose") {
  // FIX-DUAL, |v| = 0, rank 1: nabla_v(1) = x (canonical part 0, perturbation omega(1) = x)
  auto v = dual_anchored();
  auto m = free_rank(fix_dual(), 1);
  Mat a = canonical_connection(v, m).action;
  a(1, 0) += 1;
  auto pert = connection_from_action(v, m, m, Mat::identity(2), a);
  REQUIRE(validate_connection(pert).ok());
  auto dual = dual_connection(pert);
  CHECK(dual.report.ok());
  // phi(1) = 1: (nabla*_v phi)(1) = rho(v)(phi(1)) - phi(nabla_v 1) = 0 - x
  auto& dd = dual.dual;
  std::optional<size_t> phi;
  for (size_t k = 0; k < dd.module.dim(); ++k)
    if (dd.functionals[k] * unit_vec(2, 0) == unit_vec(2, 0)) phi = k;
  REQUIRE(phi);
  Mat f = dd.functional(dual.connection.action.col(*phi));
  CHECK(f * unit_vec(2, 0) == Vec{0, -1});
}

TEST_CASE("dual connection twice returns the original") {
  auto v = dual_anchored();
  auto m = dual_cone();
  auto h = hkr_class(v, m);
  REQUIRE(h.split);
  auto c = connection_from_splitting(v, m, h);
  auto d1 = dual_connection(c);
  REQUIRE(d1.report.ok());
  auto d2 = dual_connection(d1.connection);
  REQUIRE(d2.report.ok());
  Mat r = reflexivity_map(m, d1.dual, d2.dual);
  REQUIRE(inverse(r).has_value());
  // nabla2_v(r m) = r nabla_v(m) on every basis pair
  const size_t nm = m.dim(), nd = d2.dual.module.dim();
  for (size_t k = 0; k < v.V.dim(); ++k)
    for (size_t t = 0; t < nm; ++t) {
      Mat block = d2.connection.action.block(0, k * nd, nd, nd);
      CHECK(block * (r * unit_vec(nm, t)) == r * c.action.col(k * nm + t));
    }
}

TEST_CASE("Baer additivity") {
  for (auto& v : anchors()) {
    auto ms = modules_over(v.A());
    for (auto& m1 : ms)
      for (auto& m2 : ms) {
        INFO(v.name, " ", m1.tag, " ", m2.tag);
        auto b = baer_additivity_check(v, m1, m2);
        CHECK(b.report.ok());
        CHECK(b.additive);
      }
  }
}

TEST_CASE("formality") {
  auto z = with_zero_anchor(eta_anchored());
  auto fz = formality_split(z, free_rank(fix_eta(), 1), 3);
  CHECK(fz.report.ok());
  CHECK(fz.theta_m_zero);
  CHECK(fz.theta_vm_zero);
  CHECK(fz.first_nonsplit == 0);
  CHECK(fz.sections.size() == 4);

  auto fa = formality_split(eta_anchored(), free_rank(fix_eta(), 1), 3);
  CHECK(fa.report.ok());
  CHECK(fa.theta_m_zero);
  if (fa.theta_vm_zero) CHECK(fa.sections.size() == 4);

  auto fc = formality_split(eta_anchored(), eta_cone(), 3);
  CHECK(fc.report.ok());
  CHECK_FALSE(fc.theta_m_zero);
  CHECK(fc.first_nonsplit == 1);
  CHECK(fc.sections.empty());
}
