#include "common.hpp"
#include "doctest.h"

using namespace testing;

TEST_CASE("rank plus nullity, kernel and solve on random matrices") {
  std::mt19937 g(11);
  for (int trial = 0; trial < 50; ++trial) {
    size_t r = draw(g, 1, 5), c = draw(g, 1, 5);
    Mat m = random_mat(r, c, g);
    Mat k = kernel(m);
    CHECK(rank(m) + k.cols() == c);
    CHECK((m * k).is_zero());
    Vec x = random_vec(c, g);
    Vec b = m * x;
    auto y = solve(m, b);
    REQUIRE(y);
    CHECK(m * *y == b);
  }
}

TEST_CASE("inverse and Farkas certificate") {
  std::mt19937 g(12);
  int inverted = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Mat m = random_mat(3, 3, g);
    auto inv = inverse(m);
    CHECK(inv.has_value() == (rank(m) == 3));
    if (inv) {
      ++inverted;
      CHECK(m * *inv == Mat::identity(3));
    }
  }
  CHECK(inverted > 0);
  Mat a(2, 1);
  a(0, 0) = 1;
  a(1, 0) = 1;
  Vec b{Q(1), Q(2)};
  CHECK_FALSE(solve(a, b));
  auto y = farkas_certificate(a, b);
  REQUIRE(y);
  CHECK(sgn((*y)[0] * a(0, 0) + (*y)[1] * a(1, 0)) == 0);
  CHECK(sgn((*y)[0] * b[0] + (*y)[1] * b[1]) != 0);
}

TEST_CASE("rationals round trip through text") {
  CHECK(qstr(parse_q("-6/4")) == "-3/2");
  CHECK(qstr(parse_q("7")) == "7");
  CHECK_THROWS(parse_q("1/0"));
  CHECK_THROWS(parse_q("x"));
}

TEST_CASE("shift moves degrees down: (M[k])^n = M^(n+k)") {
  GradedSpace s({"a", "b", "c"}, {0, 1, 1});
  Mat d(3, 3);
  d(1, 0) = 1;
  Complex c(s, d);
  Complex c1 = shift(c, 1);
  CHECK(c1.space().dims().at(-1) == 1);
  CHECK(c1.space().dims().at(0) == 2);
  CHECK(c1.d() == d.scaled(-1));
  Complex c2 = shift(c, 2);
  CHECK(c2.d() == d);
}

TEST_CASE("cohomology of small complexes") {
  // 0 -> Q -> Q^2 -> Q -> 0 with d = (1, 1) and (1, -1): exact in the middle
  GradedSpace s({"x", "y1", "y2", "z"}, {0, 1, 1, 2});
  Mat d(4, 4);
  d(1, 0) = 1;
  d(2, 0) = 1;
  d(3, 1) = 1;
  d(3, 2) = -1;
  auto h = cohomology(s, d);
  CHECK(h.total() == 0);
  Mat d0(4, 4);
  auto h0 = cohomology(s, d0);
  CHECK(h0.dims.at(1) == 2);
  CHECK(h0.total() == 4);
  Mat bad(4, 4);
  bad(1, 0) = 1;
  bad(3, 1) = 1;
  CHECK_THROWS(Complex(s, bad));
}

TEST_CASE("cone of the identity is acyclic; cone of zero splits") {
  GradedSpace s({"a", "b", "c"}, {-1, 0, 0});
  Mat d(3, 3);
  d(1, 0) = 2;
  Complex c(s, d);
  auto ci = cone(c, c, Mat::identity(3));
  CHECK(cohomology(ci.complex).total() == 0);
  auto cz = cone(c, c, Mat(3, 3));
  auto hc = cohomology(c);
  auto hz = cohomology(cz.complex);
  // H(cone 0)^n = H^n + H^(n+1)
  for (int n = -3; n <= 2; ++n) {
    size_t lhs = hz.dims.count(n) ? hz.dims.at(n) : 0;
    size_t rhs = (hc.dims.count(n) ? hc.dims.at(n) : 0) + (hc.dims.count(n + 1) ? hc.dims.at(n + 1) : 0);
    CHECK(lhs == rhs);
  }
  // d(t, s) = (dt + f s, -ds)
  CHECK(ci.complex.d().block(0, 3, 3, 3) == Mat::identity(3));
  CHECK(ci.complex.d().block(3, 3, 3, 3) == d.scaled(-1));
  Mat notchain(3, 3);
  notchain(2, 1) = 1;
  CHECK_THROWS(cone(c, c, notchain));
}

TEST_CASE("Koszul sign of tensor maps: (f x g)(f' x g') = (-1)^(|g||f'|) ff' x gg'") {
  std::mt19937 g(7);
  GradedSpace a({"a0", "a1", "a2"}, {0, 1, -1}), b({"b0", "b1"}, {0, 1});
  for (int trial = 0; trial < 30; ++trial) {
    int pf = draw(g, -1, 1), pg = draw(g, -1, 1), pf2 = draw(g, -1, 1), pg2 = draw(g, -1, 1);
    Mat f = random_graded(a, a, pf, g), gg = random_graded(b, b, pg, g);
    Mat f2 = random_graded(a, a, pf2, g), g2 = random_graded(b, b, pg2, g);
    Mat lhs = tensor_maps(a, b, f, pf, gg, pg) * tensor_maps(a, b, f2, pf2, g2, pg2);
    Mat rhs = tensor_maps(a, b, f * f2, pf + pf2, gg * g2, pg + pg2).scaled(sign_of((long long)pg * pf2));
    CHECK(lhs == rhs);
  }
  // basis-level: (id x g)(a1 x b0) = (-1)^(|g||a1|) a1 x g(b0) for odd g
  Mat go(2, 2);
  go(1, 0) = 1;
  Mat t = tensor_maps(a, b, Mat::identity(3), 0, go, 1);
  CHECK(t(1 * 2 + 1, 1 * 2 + 0) == -1);
  CHECK(t(0 * 2 + 1, 0 * 2 + 0) == 1);
}

TEST_CASE("braiding is an involution and a chain map of tensor products") {
  GradedSpace x({"x0", "x1"}, {0, 1}), y({"y0", "y1"}, {-1, 0});
  Mat bxy = braiding(x, y), byx = braiding(y, x);
  CHECK(byx * bxy == Mat::identity(4));
  Mat dx(2, 2), dy(2, 2);
  dx(1, 0) = 1;
  dy(1, 0) = 3;
  Complex cx(x, dx), cy(y, dy);
  CHECK(bxy * tensor_k(cx, cy).d() == tensor_k(cy, cx).d() * bxy);
}

TEST_CASE("homogeneity is enforced") {
  GradedSpace s({"a", "b"}, {0, 1});
  Mat m(2, 2);
  m(0, 1) = 1;
  CHECK_THROWS(GradedMap(s, s, 1, m));
  CHECK_NOTHROW(GradedMap(s, s, -1, m));
}
