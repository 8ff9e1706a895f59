#include "common.hpp"
#include "doctest.h"
#include "dgalg/workspace.hpp"

using namespace testing;

namespace {

const std::string fixtures = FIXTURE_DIR;

int parse_line(const std::string& text) {
  try {
    parse_workspace(text, "t");
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

bool semantic(const std::string& text) {
  try {
    parse_workspace(text, "t");
  } catch (const SemanticError&) {
    return true;
  }
  return false;
}

const char* base = R"(cdga A
  basis 1:0 eta:-1
  unit 1
  mul eta eta = 0
end
)";

}  // namespace

TEST_CASE("FIX-ETA workspace matches the built-in fixtures") {
  auto ws = load_workspace(fixtures + "/fix_eta.dga");
  REQUIRE(ws.cdgas.size() == 1);
  const auto& A = *ws.cdgas[0].A;
  CHECK(A.space() == fix_eta()->space());
  CHECK(A.mult() == fix_eta()->mult());
  CHECK(A.d() == fix_eta()->d());
  auto* v = ws.find_anchored("V");
  REQUIRE(v);
  CHECK(v->V.rho == eta_anchored().rho);
  CHECK(v->V.V.d == eta_anchored().V.d);
  CHECK(ws.find_anchored("V0")->V.rho[0].is_zero());
  auto* m = ws.find_module("M");
  REQUIRE(m);
  CHECK(m->M.left == eta_cone().left);
  CHECK(m->M.right == eta_cone().right);
  CHECK(m->M.d == eta_cone().d);
  CHECK(m->M.space.dims() == eta_cone().space.dims());
  CHECK(ws.find_module("A2")->M.dim() == 4);
  CHECK(ws.tasks.size() == 7);
  CHECK(ws.tasks[1].command == "envelope");
  CHECK(ws.tasks[1].options.order == 3);
  CHECK(ws.tasks[3].options.module == "M");
}

TEST_CASE("FIX-DUAL workspace matches the built-in fixtures") {
  auto ws = load_workspace(fixtures + "/fix_dual.dga");
  const auto& A = *ws.cdgas[0].A;
  CHECK(A.mult() == fix_dual()->mult());
  CHECK(ws.find_anchored("V")->V.rho == dual_anchored().rho);
  CHECK(ws.find_anchored("V1")->V.V.space.dims() == dual_positive_anchored().V.space.dims());
  CHECK(ws.find_module("P")->M.d == dual_cone().d);
  CHECK(ws.tasks.back().options.anchored == "V1");
}

TEST_CASE("general module form") {
  // A itself, written out with explicit actions
  std::string text = std::string(base) + R"(
module U over A
  basis u:0 w:-1
  act eta u = w
  d u = 0
end
)";
  auto ws = parse_workspace(text, "t");
  auto& u = ws.find_module("U")->M;
  CHECK(validate_bimodule(u).ok());
  CHECK(is_symmetric(u));
  CHECK(u.L(unit_vec(2, 1)) * unit_vec(2, 0) == unit_vec(2, 1));
}

TEST_CASE("terms and coefficients") {
  std::string text = std::string(base) + R"(
module F over A
  free e0:0 e1:-1 e2:-2
  d e1 = 2*e0
  d e2 = -1/2*e1 + 0
end
)";
  auto ws = parse_workspace(text, "t");
  auto& f = ws.find_module("F")->M;
  // basis a_i e_l at l * 2 + i
  CHECK(f.d * unit_vec(6, 2) == scale(unit_vec(6, 0), 2));
  CHECK(f.d * unit_vec(6, 4) == scale(unit_vec(6, 2), Q(-1, 2)));
}

TEST_CASE("parse errors carry the line") {
  CHECK(parse_line(std::string(base) + "bogus line\n") == 6);
  CHECK(parse_line("cdga A\n  basis 1:0 eta:x\nend\n") == 2);
  CHECK(parse_line("cdga A\n  basis 1:0\n  unit 1\n") > 0);  // missing end
  CHECK(parse_line(std::string(base) + "task t envelope --order\n") == 6);
  CHECK(parse_line(std::string(base) + "module M over A\n  free e0:0\n  d e0 = 3*nope\nend\n") == 8);
  CHECK(parse_line("cdga A\n  basis 1:0 x:0\n  unit 1\n  mul x x = 0\n  mul x x = 0\nend\n") == 5);
}

TEST_CASE("semantic errors") {
  // eta eta = 1 breaks degrees
  CHECK(semantic("cdga A\n  basis 1:0 eta:-1\n  unit 1\n  mul eta eta = 1\nend\n"));
  // module over an undeclared algebra
  CHECK(parse_line(std::string(base) + "module M over B\n  free e:0\nend\n") == 6);
  // anchor of the wrong degree: |v| = 0 but d/d eta has degree 1
  CHECK(semantic(std::string(base) + "anchored V over A\n  free v:0\n  anchor v eta = 1\nend\n"));
}

TEST_CASE("flags") {
  auto o = parse_flags({"--order", "2", "--window", "-3", "1", "--module", "M", "--seed", "7"}, 1);
  CHECK(o.order == 2);
  REQUIRE(o.window);
  CHECK(o.window->lo == -3);
  CHECK(o.window->hi == 1);
  CHECK(o.module == "M");
  CHECK(o.seed == 7ul);
  CHECK_THROWS_AS(parse_flags({"--colour", "red"}, 4), ParseError);
}
