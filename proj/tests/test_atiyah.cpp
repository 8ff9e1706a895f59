#include "common.hpp"
#include "doctest.h"

using namespace testing;

namespace {

Vec cat(const Vec& a, const Vec& b) { return concat({a, b}); }

}  // namespace

TEST_CASE("right action on Sigma_V") {
  SUBCASE("FIX-DUAL: (0, v) x = (x, x v)") {
    auto s = build_sigma(dual_anchored());
    CHECK(s.report.ok());
    CHECK(s.sigma.R(unit_vec(2, 1)) * unit_vec(4, 2) == Vec{0, 1, 0, 1});
  }
  SUBCASE("zero anchor gives the untwisted sum") {
    auto v = with_zero_anchor(eta_anchored());
    auto s = build_sigma(v);
    CHECK(is_symmetric(s.sigma));
    CHECK(nilpotency_index(s.sigma, 2) == 0);
  }
  SUBCASE("right action is associative") {
    for (auto v : {eta_anchored(), dual_anchored()}) {
      auto s = build_sigma(v).sigma;
      const auto& A = *s.A;
      for (size_t a = 0; a < A.dim(); ++a)
        for (size_t b = 0; b < A.dim(); ++b) CHECK(s.right[b] * s.right[a] == s.R(A.mul(a, b)));
    }
  }
}

TEST_CASE("dual Atiyah bimodule on FIX-ETA") {
  auto sd = build_sigma_dual(eta_anchored());
  CHECK(sd.report.ok());
  const size_t nv = sd.vstar.module.dim(), n = sd.sigma.dim();
  REQUIRE(n == nv + 2);
  // rho^*(d eta) is v^*: it pairs with v to 1
  Vec vstar = sd.rho_star_d(1);
  const auto& v = sd.V.V.free->gens[0];
  CHECK(sd.vstar.functional(vstar) * v == unit_vec(2, 0));
  // eta (0, 1) = (v^*, eta)
  CHECK(sd.sigma.L(unit_vec(2, 1)) * unit_vec(n, nv) == cat(vstar, unit_vec(2, 1)));
  // to_dual(theta, a) = [(b, w) -> b a + theta(w)], evaluated on (1, 0) and (0, v)
  auto s = build_sigma(eta_anchored());
  Mat one = sd.sigma_dual.functional(sd.to_dual * unit_vec(n, nv));
  CHECK(one * unit_vec(4, 0) == unit_vec(2, 0));
  CHECK(is_zero(one * unit_vec(4, 2)));
  Mat th = sd.sigma_dual.functional(sd.to_dual * cat(vstar, Vec(2)));
  CHECK(is_zero(th * unit_vec(4, 0)));
  CHECK(th * unit_vec(4, 2) == unit_vec(2, 0));
  CHECK(inverse(sd.to_dual).has_value());
  CHECK(check_morphism(sd.sigma, sd.sigma_dual.module, sd.to_dual, 0).ok());
  CHECK(nilpotency_index(sd.sigma, 2) <= 1);
  CHECK(nilpotency_index(s.sigma, 2) <= 1);
}

TEST_CASE("chi on FIX-ETA") {
  auto sd = build_sigma_dual(eta_anchored());
  auto c = chi_involution(sd);
  CHECK(c.report.ok());
  const size_t nv = sd.vstar.module.dim(), n = sd.sigma.dim();
  Vec vstar = sd.rho_star_d(1);
  // chi(theta, 0) = (-theta, 0)
  for (size_t k = 0; k < nv; ++k) CHECK(c.chi * unit_vec(n, k) == scale(unit_vec(n, k), -1));
  // chi(0, 1) = (0, 1), chi(0, eta) = (v^*, eta)
  CHECK(c.chi * unit_vec(n, nv) == unit_vec(n, nv));
  CHECK(c.chi * unit_vec(n, nv + 1) == cat(vstar, unit_vec(2, 1)));
  CHECK(c.chi * c.chi == Mat::identity(n));
  CHECK(check_morphism(sd.sigma, c.opposite, c.chi, 0).ok());
}

TEST_CASE("first order differential operators") {
  auto k = build_diff1(derivations(fix_k()));
  CHECK(k.sigma.dim() == 1);
  auto dd = build_diff1(derivations(fix_dual()));
  CHECK(dd.sigma.dim() == 3);
  auto de = build_diff1(derivations(fix_eta()));
  CHECK(de.sigma.space.dims() == std::map<int, size_t>{{-1, 1}, {0, 2}, {1, 1}});
  for (auto A : {fix_k(), fix_dual(), fix_eta()}) {
    auto t = derivations(A);
    auto lit = build_sigma(tangent_anchored(t));
    auto d1 = build_diff1(t);
    CHECK(d1.report.ok());
    CHECK(lit.sigma.left == d1.sigma.left);
    CHECK(lit.sigma.right == d1.sigma.right);
    CHECK(lit.sigma.d == d1.sigma.d);
    // D(Diff^{<=1}) by direct count of left-linear functionals
    CHECK(left_dual(d1.sigma).module.dim() == derivations(A).dim() + A->dim());
  }
}

TEST_CASE("first jets") {
  auto k = build_first_jets(fix_k());
  CHECK(k.report.ok());
  CHECK(k.jets.dim() == 1);
  CHECK(k.theta == Mat::identity(1));
  auto d = build_first_jets(fix_dual());
  CHECK(d.report.ok());
  CHECK(d.jets.dim() == 3);
  CHECK(d.ideal.cols() == 1);
  CHECK(kaehler(fix_dual()).module.dim() == 1);
  auto e = build_first_jets(fix_eta());
  CHECK(e.report.ok());
  CHECK(inverse(e.theta).has_value());
}

TEST_CASE("Sigma^* as a pushout of first jets") {
  for (auto v : {eta_anchored(), dual_anchored()}) {
    auto p = jets_pushout(v);
    CHECK(p.report.ok());
    auto sd = build_sigma_dual(v);
    CHECK(p.module.dim() == sd.sigma.dim());
    CHECK(inverse(p.to_sigma_dual).has_value());
    CHECK(check_morphism(p.module, sd.sigma, p.to_sigma_dual, 0).ok());
  }
}

TEST_CASE("duality map Theta") {
  for (auto v : {eta_anchored(), dual_anchored(), dual_positive_anchored()}) {
    auto A = v.A();
    std::vector<Bimodule> ms{free_rank(A, 1), free_rank(A, 2),
                             free_module(A, {{"f0", 0}, {"f1", -1}}, {Mat(2, 2), Mat(2, 2)}, "A+A[1]")};
    for (auto& m : ms) {
      INFO(v.name, " ", A->name(), " ", m.tag);
      auto th = theta_duality(v, m);
      CHECK(th.report.ok());
      CHECK(th.invertible);
      CHECK(rank(th.theta) == th.theta.rows());
    }
  }
  // zero anchor, M = A: a signed permutation
  auto th = theta_duality(with_zero_anchor(eta_anchored()), free_rank(fix_eta(), 1));
  REQUIRE(th.invertible);
  for (size_t i = 0; i < th.theta.rows(); ++i) {
    size_t nz = 0;
    for (size_t j = 0; j < th.theta.cols(); ++j)
      if (th.theta(i, j) != 0) {
        ++nz;
        CHECK((th.theta(i, j) == 1 || th.theta(i, j) == -1));
      }
    CHECK(nz == 1);
  }
}

TEST_CASE("random anchored modules") {
  std::mt19937 g(5);
  for (int round = 0; round < 12; ++round) {
    auto A = round % 2 ? fix_eta() : fix_dual();
    auto v = random_anchored(A, g, round % 3 == 0);
    auto m = random_module(A, g, "M");
    INFO(describe(v.V), " / ", describe(m));
    CHECK(validate_anchored(v).ok());
    auto s = build_sigma(v);
    CHECK(s.report.ok());
    auto sd = build_sigma_dual(v);
    CHECK(sd.report.ok());
    CHECK(chi_involution(sd).report.ok());
    auto th = theta_duality(v, m);
    CHECK(th.report.ok());
    CHECK(th.invertible);
  }
}
