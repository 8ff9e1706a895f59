#include "dgalg/algebra.hpp"

#include <sstream>
#include <tuple>

namespace dga {

Cdga::Cdga(std::string name, GradedSpace space, Mat mult, size_t unit, Mat d)
    : name_(std::move(name)), space_(std::move(space)), mult_(std::move(mult)), unit_(unit), d_(std::move(d)) {
  const size_t n = space_.dim();
  if (mult_.rows() != n || mult_.cols() != n * n) throw Rejected("cdga " + name_ + ": multiplication table has wrong shape");
  if (unit_ >= n) throw Rejected("cdga " + name_ + ": unit index out of range");
  check_homogeneous(tensor(space_, space_), space_, 0, mult_, "multiplication");
  check_homogeneous(space_, space_, 1, d_, "cdga differential");
  lmul_.resize(n, Mat(n, n));
  rmul_.resize(n, Mat(n, n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      lmul_[i].set_col(j, mult_.col(i * n + j));
      rmul_[i].set_col(j, mult_.col(j * n + i));
    }
}

Vec Cdga::mul(const Vec& a, const Vec& b) const { return mult_ * kron(a, b); }

Mat Cdga::lmul(const Vec& a) const {
  Mat m(dim(), dim());
  for (size_t i = 0; i < dim(); ++i)
    if (sgn(a[i]) != 0) m += lmul_[i].scaled(a[i]);
  return m;
}

Mat Cdga::rmul(const Vec& a) const {
  Mat m(dim(), dim());
  for (size_t i = 0; i < dim(); ++i)
    if (sgn(a[i]) != 0) m += rmul_[i].scaled(a[i]);
  return m;
}

Report validate_cdga(const Cdga& a) {
  Report r;
  const size_t n = a.dim();
  const auto& sp = a.space();
  std::string wit;
  auto nm = [&](size_t i) { return sp.name(i); };

  bool ok = true;
  for (size_t i = 0; i < n && ok; ++i)
    for (size_t j = 0; j < n && ok; ++j)
      for (size_t k = 0; k < n && ok; ++k)
        if (a.mul(a.mul(i, j), unit_vec(n, k)) != a.mul(unit_vec(n, i), a.mul(j, k))) {
          ok = false;
          wit = nm(i) + "," + nm(j) + "," + nm(k);
        }
  r.add("associativity", ok, wit);

  ok = true;
  wit.clear();
  for (size_t i = 0; i < n && ok; ++i)
    for (size_t j = 0; j < n && ok; ++j)
      if (a.mul(i, j) != scale(a.mul(j, i), sign_of((long long)sp.deg(i) * sp.deg(j)))) {
        ok = false;
        wit = nm(i) + "," + nm(j);
      }
  r.add("graded commutativity", ok, wit);

  ok = sp.deg(a.unit()) == 0;
  wit.clear();
  for (size_t i = 0; i < n && ok; ++i)
    if (a.mul(a.unit(), i) != unit_vec(n, i) || a.mul(i, a.unit()) != unit_vec(n, i)) {
      ok = false;
      wit = nm(i);
    }
  r.add("unit", ok, wit);

  ok = true;
  wit.clear();
  for (size_t i = 0; i < n && ok; ++i)
    for (size_t j = 0; j < n && ok; ++j) {
      Vec lhs = a.d() * a.mul(i, j);
      Vec rhs = add(a.mul(a.d().col(i), unit_vec(n, j)),
                    scale(a.mul(unit_vec(n, i), a.d().col(j)), sign_of(sp.deg(i))));
      if (lhs != rhs) {
        ok = false;
        wit = nm(i) + "," + nm(j);
      }
    }
  r.add("Leibniz", ok, wit);
  r.add("d^2 = 0", (a.d() * a.d()).is_zero());

  auto h = cohomology(sp, a.d());
  ok = true;
  wit.clear();
  for (auto& [deg, dim] : h.dims)
    if (deg > 0 && dim > 0) {
      ok = false;
      wit = "H^" + std::to_string(deg) + " = " + std::to_string(dim);
    }
  r.add("cohomology in nonpositive degrees", ok, wit);
  return r;
}

static Mat table(size_t n, const std::vector<std::tuple<size_t, size_t, size_t, int>>& entries) {
  Mat m(n, n * n);
  for (auto& [i, j, k, c] : entries) m(k, i * n + j) = c;
  return m;
}

CdgaPtr fix_k() { return std::make_shared<Cdga>("FIX-K", GradedSpace({"1"}, {0}), table(1, {{0, 0, 0, 1}}), 0, Mat(1, 1)); }

CdgaPtr fix_dual() {
  return std::make_shared<Cdga>("FIX-DUAL", GradedSpace({"1", "x"}, {0, 0}),
                                table(2, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}}), 0, Mat(2, 2));
}

CdgaPtr fix_eta() {
  return std::make_shared<Cdga>("FIX-ETA", GradedSpace({"1", "eta"}, {0, -1}),
                                table(2, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}}), 0, Mat(2, 2));
}

bool is_derivation(const Cdga& a, const Mat& D, int p) {
  const size_t n = a.dim();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Vec lhs = D * a.mul(i, j);
      Vec rhs = add(a.mul(D.col(i), unit_vec(n, j)),
                    scale(a.mul(unit_vec(n, i), D.col(j)), sign_of((long long)p * a.deg(i))));
      if (lhs != rhs) return false;
    }
  return true;
}

}  // namespace dga
