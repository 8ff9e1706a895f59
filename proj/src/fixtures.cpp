#include "dgalg/fixtures.hpp"

#include <algorithm>

namespace dga {

AnchoredModule eta_anchored() {
  Mat rho(2, 2);
  rho(0, 1) = 1;
  return free_anchored(fix_eta(), {{"v", 1}}, {Mat(2, 1)}, {rho}, "V");
}

AnchoredModule dual_anchored() {
  Mat rho(2, 2);
  rho(1, 1) = 1;
  return free_anchored(fix_dual(), {{"v", 0}}, {Mat(2, 1)}, {rho}, "V");
}

AnchoredModule dual_positive_anchored() {
  return free_anchored(fix_dual(), {{"v", 1}}, {Mat(2, 1)}, {Mat(2, 2)}, "V1");
}

Bimodule eta_cone() {
  Mat d1(2, 2);
  d1(1, 0) = 1;
  return free_module(fix_eta(), {{"e0", 0}, {"e1", -2}}, {Mat(2, 2), d1}, "M");
}

Bimodule dual_cone() {
  Mat d1(2, 2);
  d1(1, 0) = 1;
  return free_module(fix_dual(), {{"e0", 0}, {"e1", -1}}, {Mat(2, 2), d1}, "P");
}

Bimodule free_rank(CdgaPtr A, int r) {
  std::vector<FreeGen> g;
  for (int k = 0; k < r; ++k) g.push_back({"f" + std::to_string(k), 0});
  return free_module(A, g, std::vector<Mat>(r, Mat(A->dim(), r)), "A" + std::to_string(r));
}

int draw(std::mt19937& g, int lo, int hi) { return lo + (int)(g() % (unsigned)(hi - lo + 1)); }

namespace {

// triangular differential: d e_l = sum over m < l of random multiples of a_i e_m in the right degree
std::vector<Mat> random_differential(const CdgaPtr& A, const std::vector<FreeGen>& gens, std::mt19937& g) {
  const size_t n = A->dim(), m = gens.size();
  std::vector<Mat> dgen(m, Mat(n, m));
  for (size_t l = 0; l < m; ++l)
    for (size_t k = 0; k < l; ++k)
      for (size_t i = 0; i < n; ++i)
        if (A->deg(i) + gens[k].deg == gens[l].deg + 1) dgen[l](i, k) = draw(g, -3, 3);
  return dgen;
}

}  // namespace

AnchoredModule random_anchored(CdgaPtr A, std::mt19937& g, bool positive) {
  auto T = derivations(A);
  for (int attempt = 0;; ++attempt) {
    const int ng = draw(g, 1, 2);
    std::vector<FreeGen> gens;
    for (int k = 0; k < ng; ++k) {
      int deg = positive ? (draw(g, 0, 2) == 2 ? 2 : 1) : draw(g, 0, 1);
      gens.push_back({"v" + std::to_string(k), deg});
    }
    auto dgen = random_differential(A, gens, g);
    std::vector<Mat> rho;
    for (auto& e : gens) {
      Mat r(A->dim(), A->dim());
      for (size_t k = 0; k < T.dim(); ++k)
        if (T.space.deg(k) == e.deg) r += T.maps[k].scaled(draw(g, -3, 3));
      rho.push_back(r);
    }
    auto v = free_anchored(A, gens, dgen, rho, "V");
    if (validate_anchored(v).ok() && check_triangular_free(v.V).ok()) return v;
    if (attempt > 100) throw std::logic_error("random_anchored: no valid draw");
  }
}

Bimodule random_module(CdgaPtr A, std::mt19937& g, const std::string& tag) {
  for (int attempt = 0;; ++attempt) {
    const int ng = draw(g, 1, 2);
    std::vector<FreeGen> gens;
    for (int k = 0; k < ng; ++k) gens.push_back({"e" + std::to_string(k), draw(g, -2, 1)});
    auto m = free_module(A, gens, random_differential(A, gens, g), tag);
    if (validate_bimodule(m).ok() && check_triangular_free(m).ok()) return m;
    if (attempt > 100) throw std::logic_error("random_module: no valid draw");
  }
}

std::string describe(const Bimodule& m) {
  std::string s;
  if (!m.free) return dims_str(m.space.dims());
  for (size_t l = 0; l < m.free->names.size(); ++l) {
    s += (l ? " " : "") + m.free->names[l] + ":" + std::to_string(m.free->degs[l]);
    Vec de = m.d * m.free->gens[l];
    if (!is_zero(de)) s += " (d = " + vec_str(de, m.space) + ")";
  }
  return s;
}

}  // namespace dga
