#include "dgalg/bimod.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace dga {

Mat Bimodule::L(const Vec& a) const {
  Mat m(dim(), dim());
  for (size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0) m += left[i].scaled(a[i]);
  return m;
}

Mat Bimodule::R(const Vec& a) const {
  Mat m(dim(), dim());
  for (size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0) m += right[i].scaled(a[i]);
  return m;
}

Mat koszul_diag(const GradedSpace& s, int p) {
  Mat m(s.dim(), s.dim());
  for (size_t i = 0; i < s.dim(); ++i) m(i, i) = sign_of((long long)p * s.deg(i));
  return m;
}

Report validate_bimodule(const Bimodule& k) {
  Report r;
  const Cdga& A = *k.A;
  const size_t n = A.dim();
  bool shapes = k.left.size() == n && k.right.size() == n && k.d.rows() == k.dim() && k.d.cols() == k.dim();
  r.add("shapes", shapes);
  if (!shapes) return r;
  std::string wit;
  bool ok = true;
  try {
    for (size_t i = 0; i < n; ++i) {
      check_homogeneous(k.space, k.space, A.deg(i), k.left[i], "left action");
      check_homogeneous(k.space, k.space, A.deg(i), k.right[i], "right action");
    }
    check_homogeneous(k.space, k.space, 1, k.d, "differential");
  } catch (const std::exception& e) {
    ok = false;
    wit = e.what();
  }
  r.add("homogeneity", ok, wit);
  if (!ok) return r;
  Mat id = Mat::identity(k.dim());
  r.add("unit", k.left[A.unit()] == id && k.right[A.unit()] == id);

  auto run = [&](const std::string& name, auto pred) {
    bool good = true;
    std::string w;
    for (size_t i = 0; i < n && good; ++i)
      for (size_t j = 0; j < n && good; ++j)
        if (!pred(i, j)) {
          good = false;
          w = A.space().name(i) + "," + A.space().name(j);
        }
    r.add(name, good, w);
  };
  run("left associativity", [&](size_t i, size_t j) { return k.L(A.mul(i, j)) == k.left[i] * k.left[j]; });
  run("right associativity", [&](size_t i, size_t j) { return k.R(A.mul(i, j)) == k.right[j] * k.right[i]; });
  run("actions commute", [&](size_t i, size_t j) { return k.left[i] * k.right[j] == k.right[j] * k.left[i]; });
  r.add("d^2 = 0", (k.d * k.d).is_zero());
  Mat S = k.space.parity();
  bool lz = true, rz = true;
  std::string lw, rw;
  for (size_t i = 0; i < n; ++i) {
    Vec da = A.d().col(i);
    if (lz && k.d * k.left[i] != k.L(da) + (k.left[i] * k.d).scaled(sign_of(A.deg(i)))) {
      lz = false;
      lw = A.space().name(i);
    }
    if (rz && k.d * k.right[i] != k.right[i] * k.d + k.R(da) * S) {
      rz = false;
      rw = A.space().name(i);
    }
  }
  r.add("left Leibniz", lz, lw);
  r.add("right Leibniz", rz, rw);
  return r;
}

bool is_symmetric(const Bimodule& k) {
  for (size_t i = 0; i < k.A->dim(); ++i)
    if (k.right[i] != k.left[i] * koszul_diag(k.space, k.A->deg(i))) return false;
  return true;
}

Bimodule unit_bimodule(CdgaPtr A) {
  Bimodule k;
  k.A = A;
  k.space = A->space();
  for (size_t i = 0; i < A->dim(); ++i) {
    k.left.push_back(A->lmul(i));
    k.right.push_back(A->rmul(i));
  }
  k.d = A->d();
  k.free = FreeBasis{{"1"}, {0}, {A->one()}};
  k.tag = "A";
  return k;
}

Bimodule symmetric_bimodule(CdgaPtr A, GradedSpace space, std::vector<Mat> left, Mat d, std::string tag) {
  Bimodule k;
  k.A = A;
  k.space = std::move(space);
  k.left = std::move(left);
  k.d = std::move(d);
  for (size_t i = 0; i < A->dim(); ++i) k.right.push_back(k.left[i] * koszul_diag(k.space, A->deg(i)));
  k.tag = std::move(tag);
  return k;
}

Bimodule free_module(CdgaPtr A, const std::vector<FreeGen>& gens, const std::vector<Mat>& dgen, std::string tag) {
  const size_t n = A->dim(), m = gens.size();
  if (dgen.size() != m) throw Rejected("free module: one differential entry per generator required");
  std::vector<std::string> names;
  std::vector<int> degs;
  for (size_t l = 0; l < m; ++l)
    for (size_t i = 0; i < n; ++i) {
      names.push_back(i == A->unit() ? gens[l].name : A->space().name(i) + "." + gens[l].name);
      degs.push_back(A->deg(i) + gens[l].deg);
    }
  GradedSpace sp(names, degs);
  const size_t N = n * m;
  std::vector<Mat> left(n, Mat(N, N));
  for (size_t a = 0; a < n; ++a)
    for (size_t l = 0; l < m; ++l)
      for (size_t i = 0; i < n; ++i) {
        Vec p = A->mul(a, i);
        for (size_t t = 0; t < n; ++t) left[a](l * n + t, l * n + i) = p[t];
      }
  // d(a_i e_l) = d(a_i) e_l + (-1)^{|a_i|} a_i d(e_l)
  Mat d(N, N);
  for (size_t l = 0; l < m; ++l) {
    if (dgen[l].rows() != n || dgen[l].cols() != m) throw Rejected("free module: differential entry has wrong shape");
    Vec de(N);
    for (size_t i = 0; i < n; ++i)
      for (size_t mm = 0; mm < m; ++mm) de[mm * n + i] = dgen[l](i, mm);
    for (size_t i = 0; i < n; ++i) {
      Vec col(N);
      Vec da = A->d().col(i);
      for (size_t t = 0; t < n; ++t) col[l * n + t] += da[t];
      col = add(col, scale(left[i] * de, sign_of(A->deg(i))));
      d.set_col(l * n + i, col);
    }
  }
  check_homogeneous(sp, sp, 1, d, "free module differential");
  Bimodule k = symmetric_bimodule(A, sp, left, d, std::move(tag));
  FreeBasis fb;
  for (size_t l = 0; l < m; ++l) {
    fb.names.push_back(gens[l].name);
    fb.degs.push_back(gens[l].deg);
    fb.gens.push_back(unit_vec(N, l * n + A->unit()));
  }
  k.free = fb;
  return k;
}

Mat free_basis_matrix(const Bimodule& k) {
  if (!k.free) throw Rejected("module " + k.tag + " carries no free basis");
  const size_t n = k.A->dim();
  std::vector<Vec> cols;
  for (auto& g : k.free->gens)
    for (size_t i = 0; i < n; ++i) cols.push_back(k.left[i] * g);
  return Mat::from_cols(k.dim(), cols);
}

Report check_triangular_free(const Bimodule& k) {
  Report r;
  if (!k.free) {
    r.add("free basis present", false, k.tag);
    return r;
  }
  const auto& fb = *k.free;
  bool homog = true;
  for (size_t j = 0; j < fb.gens.size(); ++j) {
    auto dg = k.space.degree_of(fb.gens[j]);
    if (!dg || *dg != fb.degs[j]) homog = false;
  }
  r.add("generators homogeneous", homog);
  Mat G = free_basis_matrix(k);
  bool basis = G.rows() == G.cols() && rank(G) == G.rows();
  r.add("generators form a basis", basis);
  if (!basis || !homog) return r;
  const size_t n = k.A->dim();
  bool tri = true;
  std::string wit;
  for (size_t j = 0; j < fb.gens.size() && tri; ++j) {
    Vec dg = k.d * fb.gens[j];
    Mat lower(k.dim(), j * n);
    for (size_t c = 0; c < j * n; ++c) lower.set_col(c, G.col(c));
    if (!solve(lower, dg)) {
      tri = false;
      wit = fb.names[j];
    }
  }
  r.add("triangular differential", tri, wit);
  return r;
}

Report check_morphism(const Bimodule& k, const Bimodule& k2, const Mat& f, int p, bool left_only, bool chain) {
  Report r;
  bool ok = true;
  std::string w;
  try {
    check_homogeneous(k.space, k2.space, p, f, "morphism");
  } catch (const std::exception& e) {
    ok = false;
    w = e.what();
  }
  r.add("homogeneous", ok, w);
  if (!ok) return r;
  bool l = true, rr = true;
  std::string lw, rw;
  for (size_t i = 0; i < k.A->dim(); ++i) {
    if (l && f * k.left[i] != (k2.left[i] * f).scaled(sign_of((long long)p * k.A->deg(i)))) {
      l = false;
      lw = k.A->space().name(i);
    }
    if (!left_only && rr && f * k.right[i] != k2.right[i] * f) {
      rr = false;
      rw = k.A->space().name(i);
    }
  }
  r.add("left linear", l, lw);
  if (!left_only) r.add("right linear", rr, rw);
  if (chain) r.add("chain map", k2.d * f == (f * k.d).scaled(sign_of(p)));
  return r;
}

Family bimodule_maps(const Bimodule& k, const Bimodule& k2, int p, bool left_only) {
  Family f = homogeneous_family(k.space, k2.space, p);
  return restrict_family(f, [&](const Mat& m) {
    std::vector<Vec> parts;
    for (size_t i = 0; i < k.A->dim(); ++i) {
      parts.push_back(flatten(m * k.left[i] - (k2.left[i] * m).scaled(sign_of((long long)p * k.A->deg(i)))));
      if (!left_only) parts.push_back(flatten(m * k.right[i] - k2.right[i] * m));
    }
    return concat(parts);
  });
}

Family left_linear_maps(const Bimodule& k, const Bimodule& k2, int p) {
  Mat G = free_basis_matrix(k);
  auto Ginv = inverse(G);
  if (!Ginv) throw Rejected("left_linear_maps: free basis of " + k.tag + " is not a basis");
  const size_t n = k.A->dim();
  const auto& fb = *k.free;
  Family out{k2.dim(), k.dim(), {}};
  for (size_t j = 0; j < fb.gens.size(); ++j)
    for (size_t t = 0; t < k2.dim(); ++t) {
      if (k2.deg(t) != fb.degs[j] + p) continue;
      Mat vals(k2.dim(), G.cols());
      Vec e = unit_vec(k2.dim(), t);
      for (size_t i = 0; i < n; ++i)
        vals.set_col(j * n + i, scale(k2.left[i] * e, sign_of((long long)p * k.A->deg(i))));
      out.basis.push_back(vals * *Ginv);
    }
  return out;
}

Bimodule direct_sum(const Bimodule& a, const Bimodule& b) {
  Bimodule k;
  k.A = a.A;
  k.space = direct_sum(a.space, b.space);
  const size_t na = a.dim(), nb = b.dim();
  auto blk = [&](const Mat& x, const Mat& y) {
    Mat m(na + nb, na + nb);
    m.set_block(0, 0, x);
    m.set_block(na, na, y);
    return m;
  };
  for (size_t i = 0; i < a.A->dim(); ++i) {
    k.left.push_back(blk(a.left[i], b.left[i]));
    k.right.push_back(blk(a.right[i], b.right[i]));
  }
  k.d = blk(a.d, b.d);
  if (a.free && b.free) {
    FreeBasis fb;
    for (size_t j = 0; j < a.free->gens.size(); ++j) {
      Vec g(na + nb);
      for (size_t t = 0; t < na; ++t) g[t] = a.free->gens[j][t];
      fb.gens.push_back(g);
      fb.names.push_back(a.free->names[j]);
      fb.degs.push_back(a.free->degs[j]);
    }
    for (size_t j = 0; j < b.free->gens.size(); ++j) {
      Vec g(na + nb);
      for (size_t t = 0; t < nb; ++t) g[na + t] = b.free->gens[j][t];
      fb.gens.push_back(g);
      std::string nm = b.free->names[j];
      while (std::find(fb.names.begin(), fb.names.end(), nm) != fb.names.end()) nm += "'";
      fb.names.push_back(nm);
      fb.degs.push_back(b.free->degs[j]);
    }
    k.free = fb;
  }
  k.tag = "(" + a.tag + " + " + b.tag + ")";
  return k;
}

Quot quotient(const Bimodule& k, const Mat& relations, std::string tag) {
  QuotientSpace qs = quotient_space(k.dim(), relations);
  Quot q;
  q.proj = qs.proj;
  q.lift = qs.lift;
  for (size_t i = 0; i < k.A->dim(); ++i)
    if (!(qs.proj * k.left[i] * relations).is_zero() || !(qs.proj * k.right[i] * relations).is_zero())
      throw Rejected("quotient " + tag + ": relations are not closed under the actions");
  if (!(qs.proj * k.d * relations).is_zero())
    throw Rejected("quotient " + tag + ": relations are not closed under d");
  std::vector<std::string> names;
  std::vector<int> degs;
  for (size_t j : qs.keep) {
    names.push_back(k.space.name(j));
    degs.push_back(k.space.deg(j));
  }
  Bimodule& m = q.module;
  m.A = k.A;
  m.space = GradedSpace(names, degs);
  for (size_t i = 0; i < k.A->dim(); ++i) {
    m.left.push_back(qs.proj * k.left[i] * qs.lift);
    m.right.push_back(qs.proj * k.right[i] * qs.lift);
  }
  m.d = qs.proj * k.d * qs.lift;
  m.tag = std::move(tag);
  return q;
}

Sub submodule(const Bimodule& k, const Mat& span, std::string tag) {
  Mat basis = column_basis(span);
  Coords c(basis);
  Sub s;
  s.inc = basis;
  Bimodule& m = s.module;
  m.A = k.A;
  std::vector<std::string> names;
  std::vector<int> degs;
  for (size_t j = 0; j < basis.cols(); ++j) {
    auto dg = k.space.degree_of(basis.col(j));
    if (!dg) throw Rejected("submodule " + tag + ": spanning vectors must be homogeneous");
    names.push_back(tag + "#" + std::to_string(j));
    degs.push_back(*dg);
  }
  m.space = GradedSpace(names, degs);
  for (size_t i = 0; i < k.A->dim(); ++i) {
    m.left.push_back(c.of(k.left[i] * basis));
    m.right.push_back(c.of(k.right[i] * basis));
  }
  m.d = c.of(k.d * basis);
  m.tag = std::move(tag);
  return s;
}

TensorA tensor_A(const Bimodule& k1, const Bimodule& k2) {
  const size_t n1 = k1.dim(), n2 = k2.dim();
  Mat I1 = Mat::identity(n1), I2 = Mat::identity(n2);
  Mat rel(n1 * n2, 0);
  for (size_t i = 0; i < k1.A->dim(); ++i) rel = Mat::hcat(rel, Mat::kron(k1.right[i], I2) - Mat::kron(I1, k2.left[i]));
  Bimodule big;
  big.A = k1.A;
  big.space = tensor(k1.space, k2.space);
  for (size_t i = 0; i < k1.A->dim(); ++i) {
    big.left.push_back(Mat::kron(k1.left[i], I2));
    big.right.push_back(Mat::kron(I1, k2.right[i]));
  }
  big.d = Mat::kron(k1.d, I2) + tensor_maps(k1.space, k2.space, I1, 0, k2.d, 1);
  Quot q = quotient(big, rel, k1.tag + "(x)" + k2.tag);
  TensorA t{q.module, q.proj, q.lift, n1, n2};
  if (k1.free && k2.free) {
    FreeBasis fb;
    for (size_t a = 0; a < k1.free->gens.size(); ++a)
      for (size_t b = 0; b < k2.free->gens.size(); ++b) {
        fb.gens.push_back(t.of(k1.free->gens[a], k2.free->gens[b]));
        fb.names.push_back(k1.free->names[a] + "|" + k2.free->names[b]);
        fb.degs.push_back(k1.free->degs[a] + k2.free->degs[b]);
      }
    t.module.free = fb;
  }
  return t;
}

Mat tensor_A_maps(const TensorA& src, const TensorA& tgt, const Bimodule& s1, const Bimodule& s2, const Mat& f,
                  int deg_f, const Mat& g, int deg_g) {
  return tgt.proj * tensor_maps(s1.space, s2.space, f, deg_f, g, deg_g) * src.lift;
}

Vec Dual::coords_of(const Mat& phi) const { return (*coords)(flatten(phi)); }

Mat Dual::functional(const Vec& x) const {
  if (functionals.empty()) return Mat();
  Mat m(functionals[0].rows(), functionals[0].cols());
  for (size_t k = 0; k < x.size(); ++k)
    if (sgn(x[k]) != 0) m += functionals[k].scaled(x[k]);
  return m;
}

Dual left_dual(const Bimodule& k) {
  const Cdga& A = *k.A;
  Dual D;
  const size_t na = A.dim(), nk = k.dim();
  std::vector<std::string> names;
  std::vector<int> degs;
  bool named = false;
  // free modules get the basis a * g^* (when it is one)
  if (k.free && check_triangular_free(k).ok()) {
    Mat G = free_basis_matrix(k);
    Mat Ginv = *inverse(G);
    std::vector<Mat> gstar;
    for (size_t j = 0; j < k.free->gens.size(); ++j) {
      Mat vals(na, G.cols());
      for (size_t i = 0; i < na; ++i) vals.set_col(j * na + i, unit_vec(na, i));
      gstar.push_back(vals * Ginv);
    }
    std::vector<Mat> cand;
    std::vector<std::string> cn;
    std::vector<int> cd;
    for (size_t j = 0; j < gstar.size(); ++j)
      for (size_t i = 0; i < na; ++i) {
        cand.push_back(gstar[j] * k.right[i]);
        cn.push_back((i == A.unit() ? "" : A.space().name(i) + ".") + k.free->names[j] + "*");
        cd.push_back(A.deg(i) - k.free->degs[j]);
      }
    std::vector<Vec> flat;
    for (auto& c : cand) flat.push_back(flatten(c));
    Mat F = Mat::from_cols(na * nk, flat);
    if (rank(F) == cand.size()) {
      D.functionals = cand;
      names = cn;
      degs = cd;
      named = true;
      FreeBasis fb;
      for (size_t j = gstar.size(); j-- > 0;) {
        fb.names.push_back(k.free->names[j] + "*");
        fb.degs.push_back(-k.free->degs[j]);
        fb.gens.push_back(unit_vec(cand.size(), j * na + A.unit()));
      }
      D.module.free = fb;
    }
  }
  int kmin = 0, kmax = 0, amin = 0, amax = 0;
  for (size_t i = 0; i < nk; ++i) {
    kmin = std::min(kmin, k.deg(i));
    kmax = std::max(kmax, k.deg(i));
  }
  for (size_t i = 0; i < na; ++i) {
    amin = std::min(amin, A.deg(i));
    amax = std::max(amax, A.deg(i));
  }
  std::vector<Mat> all;
  std::vector<int> alldeg;
  for (int p = amin - kmax; p <= amax - kmin; ++p) {
    Family f = homogeneous_family(k.space, A.space(), p);
    Family lin = restrict_family(f, [&](const Mat& phi) {
      std::vector<Vec> parts;
      for (size_t i = 0; i < na; ++i) parts.push_back(flatten(phi * k.left[i] - A.lmul(i) * phi));
      return concat(parts);
    });
    for (auto& b : lin.basis) {
      all.push_back(b);
      alldeg.push_back(p);
    }
  }
  if (named) {
    if (all.size() != D.functionals.size()) throw std::logic_error("left_dual: free basis count mismatch");
  } else {
    D.functionals = all;
    degs = alldeg;
    for (size_t t = 0; t < all.size(); ++t) names.push_back("f" + std::to_string(t));
  }
  std::vector<Vec> flat;
  for (auto& c : D.functionals) flat.push_back(flatten(c));
  D.flat = Mat::from_cols(na * nk, flat);
  D.coords = std::make_shared<Coords>(D.flat);
  Bimodule& m = D.module;
  m.A = k.A;
  m.space = GradedSpace(names, degs);
  const size_t nd = D.functionals.size();
  Mat S = k.space.parity();
  for (size_t i = 0; i < na; ++i) {
    Mat l(nd, nd), r(nd, nd);
    for (size_t t = 0; t < nd; ++t) {
      l.set_col(t, D.coords_of(D.functionals[t] * k.right[i]));
      r.set_col(t, D.coords_of(A.rmul(i) * D.functionals[t]));
    }
    m.left.push_back(l);
    m.right.push_back(r);
  }
  m.d = Mat(nd, nd);
  for (size_t t = 0; t < nd; ++t) m.d.set_col(t, D.coords_of((A.d() * D.functionals[t] - D.functionals[t] * k.d) * S));
  m.tag = "D(" + k.tag + ")";
  return D;
}

Mat dual_map(const Dual& d2, const Dual& d1, const Mat& f) {
  const size_t n2 = d2.functionals.size();
  Mat m(d1.functionals.size(), n2);
  for (size_t t = 0; t < n2; ++t) m.set_col(t, d1.coords_of(d2.functionals[t] * f));
  return m;
}

Mat reflexivity_map(const Bimodule& k, const Dual& dk, const Dual& ddk) {
  const size_t na = k.A->dim();
  Mat out(ddk.functionals.size(), k.dim());
  for (size_t j = 0; j < k.dim(); ++j) {
    Mat phi(na, dk.functionals.size());
    Vec e = unit_vec(k.dim(), j);
    for (size_t t = 0; t < dk.functionals.size(); ++t)
      phi.set_col(t, scale(dk.functionals[t] * e, sign_of((long long)k.deg(j) * dk.module.deg(t))));
    out.set_col(j, ddk.coords_of(phi));
  }
  return out;
}

Bimodule opposite(const Bimodule& k) {
  Bimodule m;
  m.A = k.A;
  m.space = k.space;
  for (size_t i = 0; i < k.A->dim(); ++i) {
    Mat s = koszul_diag(k.space, k.A->deg(i));
    m.left.push_back(k.right[i] * s);
    m.right.push_back(k.left[i] * s);
  }
  m.d = k.d;
  if (is_symmetric(k)) m.free = k.free;
  m.tag = k.tag + "^op";
  return m;
}

std::optional<int> nilpotency_index(const Bimodule& k, int n_max) {
  std::vector<Mat> delta;
  for (size_t i = 0; i < k.A->dim(); ++i) delta.push_back(k.left[i] - k.right[i] * koszul_diag(k.space, k.A->deg(i)));
  Mat W = Mat::identity(k.dim());
  for (int n = 0; n <= n_max; ++n) {
    Mat next(k.dim(), 0);
    for (auto& dl : delta) next = Mat::hcat(next, dl * W);
    W = column_basis(next);
    if (W.cols() == 0) return n;
  }
  return std::nullopt;
}

Invertibility search_invertible(const Family& f, unsigned seed) {
  Invertibility out;
  if (f.rows != f.cols) {
    out.note = "non-square";
    return out;
  }
  const size_t n = f.rows;
  if (n == 0) {
    out.found = true;
    out.witness = Mat(0, 0);
    return out;
  }
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (size_t b = 0; b < f.size(); ++b)
    if (rank(f.basis[b]) == n) {
      out.found = true;
      out.witness = f.basis[b];
      return out;
    }
  for (int trial = 0; trial < 40 && f.size() > 0; ++trial) {
    Vec x(f.size());
    for (auto& c : x) c = coef(rng);
    Mat m = f.combine(x);
    if (rank(m) == n) {
      out.found = true;
      out.witness = m;
      return out;
    }
  }
  // certificates that every member is singular
  Mat images(n, 0);
  for (auto& b : f.basis) images = Mat::hcat(images, b);
  if (rank(images) < n) {
    out.note = "all members miss a common direction in the target";
    return out;
  }
  Mat stacked(0, n);
  for (auto& b : f.basis) stacked = Mat::vcat(stacked, b);
  if (rank(stacked) < n) {
    out.note = "all members share a kernel vector";
    return out;
  }
  // the determinant has degree <= n in each coefficient; a full grid decides it
  const size_t k = f.size();
  double pts = 1;
  for (size_t i = 0; i < k; ++i) pts *= double(n + 1);
  if (pts <= 20000) {
    Vec x(k);
    std::vector<size_t> idx(k, 0);
    while (true) {
      for (size_t i = 0; i < k; ++i) x[i] = Q(long(idx[i]));
      Mat m = f.combine(x);
      if (rank(m) == n) {
        out.found = true;
        out.witness = m;
        return out;
      }
      size_t i = 0;
      while (i < k && ++idx[i] > n) idx[i++] = 0;
      if (i == k) break;
    }
    out.note = "determinant vanishes on a full interpolation grid";
    return out;
  }
  out.certain = false;
  out.note = "no invertible member found by sampling";
  return out;
}

Report validate_short_exact(const ShortExact& s, bool as_left_modules) {
  Report r;
  r.add("inclusion injective", rank(s.inc) == s.sub.dim());
  r.add("projection surjective", rank(s.proj) == s.quo.dim());
  r.add("composite zero", (s.proj * s.inc).is_zero());
  r.add("dimensions add", s.mid.dim() == s.sub.dim() + s.quo.dim());
  r.merge("inclusion ", check_morphism(s.sub, s.mid, s.inc, 0, as_left_modules));
  r.merge("projection ", check_morphism(s.mid, s.quo, s.proj, 0, as_left_modules));
  return r;
}

static Family splitting_family(const ShortExact& s, bool as_left, const Bimodule& from, const Bimodule& to) {
  return as_left ? left_linear_maps(from, to, 0) : bimodule_maps(from, to, 0, false);
}

Mat degreewise_splitting(const ShortExact& s, bool as_left_modules) {
  if (as_left_modules) {
    Mat G = free_basis_matrix(s.quo);
    Mat Ginv = *inverse(G);
    const size_t n = s.quo.A->dim();
    Mat vals(s.mid.dim(), G.cols());
    for (size_t j = 0; j < s.quo.free->gens.size(); ++j) {
      auto x = solve(s.proj, s.quo.free->gens[j]);
      if (!x) throw Rejected("ext_class: projection is not surjective");
      Vec pre = *x;
      for (size_t t = 0; t < pre.size(); ++t)
        if (s.mid.deg(t) != s.quo.free->degs[j]) pre[t] = 0;
      for (size_t i = 0; i < n; ++i) vals.set_col(j * n + i, s.mid.left[i] * pre);
    }
    return vals * Ginv;
  }
  Family f = bimodule_maps(s.quo, s.mid, 0, false);
  Mat id = Mat::identity(s.quo.dim());
  FamilySolve sol = solve_family(f, [&](const Mat& m) { return flatten(s.proj * m); }, flatten(id));
  if (!sol.solution) throw Rejected("ext_class: no degreewise bimodule splitting exists");
  return *sol.solution;
}

FamilySolve cobound(const ShortExact& s, bool as_left_modules, const Mat& c) {
  Family f = splitting_family(s, as_left_modules, s.quo, s.sub);
  return solve_family(f, [&](const Mat& h) { return flatten(h * s.quo.d - s.sub.d * h); }, flatten(c));
}

ExtWitness ext_class_with_splitting(const ShortExact& s, bool as_left_modules, const Mat& splitting) {
  ExtWitness w;
  if (as_left_modules) {
    Report tf = check_triangular_free(s.quo);
    if (!tf.ok()) throw Rejected("ext_class: third term " + s.quo.tag + " is not triangular-free: " + tf.failures()[0].name);
  }
  w.report.merge("sequence ", validate_short_exact(s, as_left_modules));
  w.report.require("ext_class");
  w.splitting = splitting;
  w.report.add("splitting is a section", s.proj * splitting == Mat::identity(s.quo.dim()));
  w.report.merge("splitting ", check_morphism(s.quo, s.mid, splitting, 0, as_left_modules, false));
  Mat c = s.mid.d * splitting - splitting * s.quo.d;
  Coords sub(s.inc);
  w.cocycle = sub.of(c);
  w.report.merge("cocycle ", check_morphism(s.quo, s.sub, w.cocycle, 1, as_left_modules, false));
  w.report.add("cocycle closed", (s.sub.d * w.cocycle + w.cocycle * s.quo.d).is_zero());
  FamilySolve sol = cobound(s, as_left_modules, w.cocycle);
  w.system = sol.system;
  w.rhs = sol.rhs;
  w.split = sol.solution.has_value();
  if (w.split) {
    w.cobound = *sol.solution;
    Mat chain_split = splitting + s.inc * w.cobound;
    w.report.add("corrected splitting is a chain map", s.mid.d * chain_split == chain_split * s.quo.d);
  } else {
    w.certificate = sol.certificate;
    bool cert = false;
    if (w.certificate) {
      Q dot = 0;
      for (size_t i = 0; i < w.rhs.size(); ++i) dot += (*w.certificate)[i] * w.rhs[i];
      Mat y(1, w.rhs.size());
      for (size_t i = 0; i < w.rhs.size(); ++i) y(0, i) = (*w.certificate)[i];
      cert = sgn(dot) != 0 && (y * w.system).is_zero();
    }
    w.report.add("nonsplit certificate", cert);
  }
  return w;
}

ExtWitness ext_class(const ShortExact& s, bool as_left_modules) {
  if (as_left_modules) {
    Report tf = check_triangular_free(s.quo);
    if (!tf.ok()) throw Rejected("ext_class: third term " + s.quo.tag + " is not triangular-free: " + tf.failures()[0].name);
  }
  return ext_class_with_splitting(s, as_left_modules, degreewise_splitting(s, as_left_modules));
}

}  // namespace dga
