#include "common.hpp"
#include "doctest.h"
#include "dgalg/sqzero.hpp"

using namespace testing;

namespace {

using Dims = std::map<int, size_t>;

// drops zero entries, which some dimension maps carry for every window degree
Dims nonzero(const Dims& d) {
  Dims out;
  for (auto& [k, v] : d)
    if (v) out[k] = v;
  return out;
}

Vec in_b(const SquareZero& sq, size_t a) { return sq.incl * unit_vec(sq.na(), a); }

}  // namespace

TEST_CASE("square-zero extension of FIX-ETA") {
  auto sq = build_sqzero(eta_anchored());
  CHECK(sq.report.ok());
  CHECK(validate_cdga(*sq.B).ok());
  CHECK(sq.B->space().dims() == Dims{{-1, 2}, {0, 2}});
  // d(eta) = s v^*, where v^* = rho^*(d eta)
  Vec svstar = sq.iota * sq.rho_star_d[1];
  CHECK(sq.vstar.functional(sq.rho_star_d[1]) * eta_anchored().V.free->gens[0] == unit_vec(2, 0));
  CHECK(sq.B->d() * in_b(sq, 1) == svstar);
  CHECK(cohomology(sq.B->complex()).dims == Dims{{-1, 1}, {0, 1}});
  CHECK(sq.pi * in_b(sq, 1) == unit_vec(2, 1));
  // pi is a chain algebra map, incl is an algebra map but not a chain map
  CHECK(sq.pi * sq.B->d() == fix_eta()->d() * sq.pi);
  CHECK(sq.B->d() * sq.incl != sq.incl * fix_eta()->d());
}

TEST_CASE("zero anchor gives the trivial extension") {
  auto sq = build_sqzero(with_zero_anchor(eta_anchored()));
  CHECK(sq.report.ok());
  CHECK(validate_cdga(*sq.B).ok());
  CHECK(sq.B->d().is_zero());
  auto sd = build_sqzero(dual_positive_anchored());
  CHECK(validate_cdga(*sd.B).ok());
}

TEST_CASE("generators in degree <= 0 are rejected") {
  CHECK_THROWS_AS(build_sqzero(dual_anchored()), Rejected);
  CHECK_THROWS_AS(build_sqzero(with_zero_anchor(dual_anchored())), Rejected);
}

TEST_CASE("d squares to zero on random positive extensions") {
  std::mt19937 g(31);
  for (int round = 0; round < 10; ++round) {
    auto A = round % 2 ? fix_eta() : fix_dual();
    auto v = random_anchored(A, g, true);
    INFO(describe(v.V));
    auto sq = build_sqzero(v);
    CHECK(sq.report.ok());
    CHECK(validate_cdga(*sq.B).ok());
    CHECK((sq.B->d() * sq.B->d()).is_zero());
  }
}

TEST_CASE("A-dagger") {
  auto sq = build_sqzero(eta_anchored());
  auto ad = build_a_dagger(sq);
  CHECK(ad.report.ok());
  CHECK(validate_cdga(*ad.Ad).ok());
  CHECK_FALSE(ad.literal_reading_ok);
  const size_t nb = sq.B->dim();
  // sigma(eta) = (eta, -v^*)
  CHECK(ad.sigma * unit_vec(2, 1) == concat({in_b(sq, 1), scale(sq.rho_star_d[1], -1)}));
  // theta_v(sigma(eta)) = 1 = d/d eta (eta)
  CHECK(ad.theta[0] * (ad.sigma * unit_vec(2, 1)) == unit_vec(2, 0));
  // theta_v o sigma = rho(v) on all of A
  CHECK(ad.theta[0] * ad.sigma == eta_anchored().rho[0]);
  CHECK(ad.to_a * ad.sigma == Mat::identity(2));
  CHECK(is_quasi_iso(ad.Ad->complex(), fix_eta()->complex(), ad.to_a));
  CHECK(ad.Ad->dim() == nb + sq.vstar.module.dim());

  auto z = build_a_dagger(build_sqzero(with_zero_anchor(eta_anchored())));
  CHECK(z.report.ok());
  // sigma(a) = (a, 0)
  for (size_t a = 0; a < 2; ++a) {
    Vec col = z.sigma.col(a);
    CHECK(is_zero(Vec(col.begin() + nb, col.end())));
  }
}

TEST_CASE("B-modules and connections") {
  auto sq = build_sqzero(eta_anchored());
  SUBCASE("B itself carries the canonical connection on A") {
    auto mc = module_to_connection(sq, unit_bimodule(sq.B));
    CHECK(mc.report.ok());
    CHECK(mc.M.dim() == 2);
    CHECK(validate_connection(mc.connection).ok());
    auto can = canonical_connection(eta_anchored(), free_rank(fix_eta(), 1));
    auto pushed = strict_connection(mc.connection);
    REQUIRE(pushed.has_value());
    // nabla_v(eta) = 1 up to the identification M = A
    CHECK(rank(pushed->action) == rank(can.action));
  }
  SUBCASE("canonical connection gives back B") {
    auto can = canonical_connection(eta_anchored(), free_rank(fix_eta(), 1));
    auto cm = connection_to_module(sq, can);
    CHECK(cm.report.ok());
    CHECK(cm.T.dim() == sq.B->dim());
    auto inv = search_invertible(bimodule_maps(cm.T, unit_bimodule(sq.B), 0, true));
    CHECK(inv.found);
  }
  SUBCASE("direct sums are blockwise") {
    auto T = direct_sum(unit_bimodule(sq.B), unit_bimodule(sq.B));
    auto mc = module_to_connection(sq, T);
    CHECK(mc.report.ok());
    CHECK(mc.M.dim() == 4);
  }
  SUBCASE("pullback along pi has the zero connection part") {
    auto T = pullback_module(sq, free_rank(fix_eta(), 1), "A via pi");
    CHECK(validate_bimodule(T).ok());
  }
}

TEST_CASE("round trips on split fixtures") {
  for (auto v : {eta_anchored(), dual_positive_anchored(), with_zero_anchor(eta_anchored())}) {
    auto sq = build_sqzero(v);
    std::vector<Bimodule> ms{free_rank(v.A(), 1), free_rank(v.A(), 2)};
    if (v.A()->name() == fix_dual()->name()) ms.push_back(dual_cone());
    if (v.rho[0].is_zero() && v.A()->name() == fix_eta()->name()) ms.push_back(eta_cone());
    for (auto& m : ms) {
      INFO(v.name, " ", m.tag);
      auto h = hkr_class(v, m);
      REQUIRE(h.split);
      auto c = connection_from_splitting(v, m, h);
      auto cm = connection_to_module(sq, c);
      CHECK(cm.report.ok());
      CHECK(validate_bimodule(cm.T).ok());
      auto back = module_to_connection(sq, cm.T);
      CHECK(back.report.ok());
      CHECK(round_trip(sq, c).equivalent);
    }
  }
}

TEST_CASE("bar complexes on FIX-ETA at N = 3") {
  auto sq = build_sqzero(eta_anchored());
  auto t = bar_tor(sq, 3, {-4, 0});
  CHECK(t.report.ok());
  CHECK(nonzero(t.jet_dims) == Dims{{-4, 1}, {-3, 2}, {-2, 2}, {-1, 2}, {0, 1}});
  CHECK(t.comparison_iso);
  CHECK(t.multiplicative);
  CHECK(t.certified.lo == -2);
  for (int i = t.certified.lo; i <= std::min(0, t.certified.hi); ++i) {
    INFO(i);
    size_t hb = t.h.dims.count(i) ? t.h.dims.at(i) : 0;
    size_t hj = t.jet_dims.count(i) ? t.jet_dims.at(i) : 0;
    CHECK(hb == hj);
  }
  auto e = bar_ext(sq, 3, {-2, 3});
  CHECK(e.report.ok());
  CHECK(nonzero(e.envelope_dims) == Dims{{-1, 1}, {0, 2}, {1, 2}, {2, 2}, {3, 1}});
  CHECK(e.comparison_iso);
  CHECK(e.multiplicative);
  CHECK(e.unit_to_unit);
  CHECK(e.certified.hi == 1);
}

TEST_CASE("bar complexes at low order") {
  auto sq = build_sqzero(eta_anchored());
  auto t0 = bar_tor(sq, 0, {0, 0});
  CHECK(t0.h.dims.at(0) == t0.jet_dims.at(0));
  for (int n = 1; n <= 2; ++n) {
    INFO(n);
    CHECK(bar_tor(sq, n, {-n - 1, n}).report.ok());
    CHECK(bar_ext(sq, n, {-n - 1, n}).report.ok());
  }
  // zero anchor: weight-by-weight agreement with the tensor coalgebra
  auto sz = build_sqzero(with_zero_anchor(eta_anchored()));
  auto tz = bar_tor(sz, 2, {-3, 0});
  CHECK(tz.report.ok());
  CHECK_FALSE(tz.iweight_dims.empty());
  auto ez = bar_ext(sz, 2, {-1, 2});
  CHECK(ez.report.ok());
}

TEST_CASE("bar on FIX-DUAL with a degree-1 generator") {
  // B / k sits in degrees <= 0 (x and s v^* in degree 0), so the bar complex is finite in each degree
  auto sq = build_sqzero(dual_positive_anchored());
  CHECK(bar_tor(sq, 1, {-2, 0}).report.ok());
  CHECK(bar_ext(sq, 1, {-1, 1}).report.ok());
}
