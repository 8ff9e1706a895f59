#include "common.hpp"
#include "doctest.h"
#include "dgalg/workspace.hpp"

using namespace testing;

namespace {

// Q[t]/(t^2) (x) Lambda(e), |t| = 0, |e| = -1, d e = t
CdgaPtr koszul_pair() {
  auto ws = parse_workspace(R"(
cdga K
  basis 1:0 t:0 e:-1 te:-1
  unit 1
  mul t e = te
  d e = t
end
)",
                            "koszul");
  return ws.cdgas.front().A;
}

std::map<int, size_t> dims_of(const Derivations& t) { return t.space.dims(); }

}  // namespace

TEST_CASE("fixture algebras satisfy the cdga axioms") {
  CHECK(validate_cdga(*fix_eta()).ok());
  CHECK(validate_cdga(*fix_dual()).ok());
  CHECK(validate_cdga(*fix_k()).ok());
  CHECK(validate_cdga(*koszul_pair()).ok());
}

TEST_CASE("broken tables are caught") {
  Mat mult = fix_dual()->mult();
  mult(1, 1 * 2 + 1) = 1;  // x x = x, fine; then break commutativity
  mult(0, 0 * 2 + 1) = 1;  // 1 x = 1 + x
  Cdga bad("bad", fix_dual()->space(), mult, 0, Mat(2, 2));
  CHECK_FALSE(validate_cdga(bad).ok());
  // a positive-degree class is rejected
  Cdga pos("pos", GradedSpace({"1", "y"}, {0, 1}), [] {
    Mat m(2, 4);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(1, 2) = 1;
    return m;
  }(), 0, Mat(2, 2));
  CHECK_FALSE(validate_cdga(pos).ok());
}

TEST_CASE("derivations match the hand count") {
  // FIX-ETA: D(eta) = c eta (degree 0) or c 1 (degree 1); FIX-DUAL: D(x) = c x only (D(x^2) = 2x D(x) = 0)
  auto te = derivations(fix_eta());
  CHECK(dims_of(te) == std::map<int, size_t>{{0, 1}, {1, 1}});
  auto tx = derivations(fix_dual());
  CHECK(dims_of(tx) == std::map<int, size_t>{{0, 1}});
  CHECK(validate_derivations(te).ok());
  CHECK(validate_derivations(tx).ok());
  auto tk = derivations(koszul_pair());
  CHECK(validate_derivations(tk).ok());
}

TEST_CASE("random combinations of derivations: commutators are derivations, [d, -] squares to zero") {
  auto A = koszul_pair();
  auto T = derivations(A);
  std::mt19937 g(21);
  for (int trial = 0; trial < 30; ++trial) {
    int p = draw(g, -1, 1), q = draw(g, -1, 1);
    Mat D(A->dim(), A->dim()), E(A->dim(), A->dim());
    for (size_t k = 0; k < T.dim(); ++k) {
      if (T.space.deg(k) == p) D += T.maps[k].scaled(draw(g, -3, 3));
      if (T.space.deg(k) == q) E += T.maps[k].scaled(draw(g, -3, 3));
    }
    CHECK(is_derivation(*A, D, p));
    Mat c = commutator(D, p, E, q);
    CHECK(is_derivation(*A, c, p + q));
    // graded antisymmetry
    CHECK(c == commutator(E, q, D, p).scaled(-sign_of((long long)p * q)));
    Mat dD = commutator(A->d(), 1, D, p);
    CHECK(commutator(A->d(), 1, dD, p + 1).is_zero());
  }
}

TEST_CASE("Kaehler differentials and the pairing with derivations") {
  for (auto A : {fix_eta(), fix_dual(), koszul_pair()}) {
    auto k = kaehler(A);
    CHECK(validate_kaehler(k).ok());
    auto p = pairing_check(derivations(A), k);
    CHECK(p.report.ok());
    CHECK(p.iso);
  }
  // Omega for FIX-ETA is free on d eta: degrees -1 (d eta) and -2 (eta d eta)
  CHECK(kaehler(fix_eta()).module.space.dims() == std::map<int, size_t>{{-2, 1}, {-1, 1}});
}
