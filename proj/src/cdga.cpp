#include "dgalg/cdga.hpp"

#include <sstream>

namespace dga {

Mat commutator(const Mat& D, int dd, const Mat& E, int de) {
  return D * E - (E * D).scaled(sign_of((long long)dd * de));
}

Mat Derivations::map(const Vec& x) const {
  Mat m(A->dim(), A->dim());
  for (size_t k = 0; k < x.size(); ++k)
    if (sgn(x[k]) != 0) m += maps[k].scaled(x[k]);
  return m;
}

// readable name: list of nonzero columns "a->value"
static std::string derivation_name(const Cdga& A, const Mat& D) {
  std::ostringstream os;
  os << "D[";
  bool first = true;
  for (size_t j = 0; j < A.dim(); ++j) {
    Vec c = D.col(j);
    if (is_zero(c)) continue;
    os << (first ? "" : ",") << A.space().name(j) << "->";
    bool f2 = true;
    for (size_t i = 0; i < A.dim(); ++i) {
      if (sgn(c[i]) == 0) continue;
      if (!f2) os << "+";
      if (c[i] != 1) os << qstr(c[i]) << "*";
      os << A.space().name(i);
      f2 = false;
    }
    first = false;
  }
  os << "]";
  return os.str();
}

Derivations derivations(CdgaPtr A) {
  Derivations t;
  t.A = A;
  const size_t n = A->dim();
  int lo = 0, hi = 0;
  for (size_t i = 0; i < n; ++i) {
    lo = std::min(lo, A->deg(i));
    hi = std::max(hi, A->deg(i));
  }
  std::vector<std::string> names;
  std::vector<int> degs;
  for (int p = lo - hi; p <= hi - lo; ++p) {
    Family f = homogeneous_family(A->space(), A->space(), p);
    Family der = restrict_family(f, [&](const Mat& D) {
      std::vector<Vec> parts;
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
          parts.push_back(sub(sub(D * A->mul(i, j), A->mul(D.col(i), unit_vec(n, j))),
                              scale(A->mul(unit_vec(n, i), D.col(j)), sign_of((long long)p * A->deg(i)))));
      return concat(parts);
    });
    for (auto& D : der.basis) {
      t.maps.push_back(D);
      degs.push_back(p);
      std::string nm = derivation_name(*A, D);
      while (std::find(names.begin(), names.end(), nm) != names.end()) nm += "'";
      names.push_back(nm);
    }
  }
  t.space = GradedSpace(names, degs);
  std::vector<Vec> flat;
  for (auto& D : t.maps) flat.push_back(flatten(D));
  t.flat = Mat::from_cols(n * n, flat);
  t.coords = std::make_shared<Coords>(t.flat);
  const size_t m = t.maps.size();
  t.bracket = Mat(m, m * m);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j)
      t.bracket.set_col(i * m + j, t.coords_of(commutator(t.maps[i], degs[i], t.maps[j], degs[j])));
  std::vector<Mat> left;
  for (size_t a = 0; a < n; ++a) {
    Mat l(m, m);
    for (size_t k = 0; k < m; ++k) l.set_col(k, t.coords_of(A->lmul(a) * t.maps[k]));
    left.push_back(l);
  }
  Mat d(m, m);
  for (size_t k = 0; k < m; ++k) d.set_col(k, t.coords_of(commutator(A->d(), 1, t.maps[k], degs[k])));
  t.module = symmetric_bimodule(A, t.space, left, d, "T_A");
  return t;
}

Report validate_derivations(const Derivations& t) {
  Report r;
  const size_t m = t.dim();
  bool der = true;
  for (size_t k = 0; k < m; ++k) der = der && is_derivation(*t.A, t.maps[k], t.space.deg(k));
  r.add("basis elements are derivations", der);
  bool closed = true;
  for (size_t i = 0; i < m && closed; ++i)
    for (size_t j = 0; j < m && closed; ++j) {
      Mat c = commutator(t.maps[i], t.space.deg(i), t.maps[j], t.space.deg(j));
      closed = t.coords->contains(flatten(c));
    }
  r.add("bracket closure", closed);
  bool jac = true;
  auto br = [&](const Mat& X, int dx, const Mat& Y, int dy) { return commutator(X, dx, Y, dy); };
  for (size_t i = 0; i < m && jac; ++i)
    for (size_t j = 0; j < m && jac; ++j)
      for (size_t k = 0; k < m && jac; ++k) {
        int a = t.space.deg(i), b = t.space.deg(j), c = t.space.deg(k);
        const Mat &X = t.maps[i], &Y = t.maps[j], &Z = t.maps[k];
        Mat lhs = br(X, a, br(Y, b, Z, c), b + c);
        Mat rhs = br(br(X, a, Y, b), a + b, Z, c) + br(Y, b, br(X, a, Z, c), a + c).scaled(sign_of((long long)a * b));
        jac = lhs == rhs;
      }
  r.add("Jacobi", jac);
  bool dclosed = true;
  for (size_t k = 0; k < m; ++k)
    dclosed = dclosed && t.coords->contains(flatten(commutator(t.A->d(), 1, t.maps[k], t.space.deg(k))));
  r.add("closed under [d, -]", dclosed);
  r.merge("module ", validate_bimodule(t.module));
  return r;
}

Vec Kaehler::symbol(size_t i, size_t j) const {
  const size_t n = module.A->dim();
  return proj * unit_vec(n * n, i * n + j);
}

Kaehler kaehler(CdgaPtr A) {
  const size_t n = A->dim();
  const size_t N = n * n;
  std::vector<std::string> names;
  std::vector<int> degs;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      names.push_back("d" + A->space().name(i) + (j == A->unit() ? "" : "." + A->space().name(j)));
      degs.push_back(A->deg(i) + A->deg(j));
    }
  Bimodule amb;
  amb.A = A;
  amb.space = GradedSpace(names, degs);
  // (da_i . a_j) a = da_i . (a_j a)
  for (size_t a = 0; a < n; ++a) {
    Mat r(N, N);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        Vec p = A->mul(j, a);
        for (size_t t = 0; t < n; ++t) r(i * n + t, i * n + j) = p[t];
      }
    amb.right.push_back(r);
    amb.left.push_back(r * koszul_diag(amb.space, A->deg(a)));
  }
  // d(da.b) = d(d_A a).b + (-1)^{|a|} da.d_A b
  amb.d = Mat(N, N);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Vec col(N);
      Vec da = A->d().col(i), db = A->d().col(j);
      for (size_t t = 0; t < n; ++t) {
        if (sgn(da[t]) != 0) col[t * n + j] += da[t];
        if (sgn(db[t]) != 0) col[i * n + t] += sign_of(A->deg(i)) * db[t];
      }
      amb.d.set_col(i * n + j, col);
    }
  // Leibniz relations and their right multiples
  std::vector<Vec> gens;
  const size_t u = A->unit();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Vec r(N);
      Vec p = A->mul(i, j);
      for (size_t t = 0; t < n; ++t) r[t * n + u] += p[t];
      r[i * n + j] -= 1;
      r[j * n + i] -= sign_of((long long)A->deg(i) * A->deg(j));
      gens.push_back(r);
    }
  std::vector<Vec> rels;
  for (auto& g : gens)
    for (size_t a = 0; a < n; ++a) rels.push_back(amb.right[a] * g);
  Quot q = quotient(amb, Mat::from_cols(N, rels), "Omega");
  Kaehler k;
  k.module = q.module;
  k.proj = q.proj;
  k.lift = q.lift;
  k.universal = Mat(k.module.dim(), n);
  for (size_t i = 0; i < n; ++i) k.universal.set_col(i, k.symbol(i, u));
  return k;
}

Report validate_kaehler(const Kaehler& k) {
  Report r;
  const Cdga& A = *k.module.A;
  const size_t n = A.dim();
  r.add("d(1) = 0", is_zero(k.universal.col(A.unit())));
  bool ok = true;
  std::string w;
  for (size_t i = 0; i < n && ok; ++i)
    for (size_t j = 0; j < n && ok; ++j) {
      Vec lhs = k.universal * A.mul(i, j);
      Vec rhs = add(k.module.right[j] * k.universal.col(i), k.module.left[i] * k.universal.col(j));
      if (lhs != rhs) {
        ok = false;
        w = A.space().name(i) + "," + A.space().name(j);
      }
    }
  r.add("d(aa') = da.a' + a.da'", ok, w);
  r.add("universal derivation is a chain map", k.universal * A.d() == k.module.d * k.universal);
  r.merge("module ", validate_bimodule(k.module));
  return r;
}

PairingResult pairing_check(const Derivations& t, const Kaehler& o) {
  PairingResult res;
  const Cdga& A = *t.A;
  const size_t n = A.dim();
  const size_t N = n * n;
  // <D_s, da_i . a_j> as an element of A
  auto pair = [&](size_t s, size_t amb) {
    size_t i = amb / n, j = amb % n;
    return A.mul(t.maps[s].col(i), unit_vec(n, j));
  };
  Dual dt = left_dual(t.module);
  Dual dom = left_dual(o.module);
  // Omega -> D(T)
  Mat amb_to_dt(dt.module.dim(), N);
  bool well = true;
  for (size_t a = 0; a < N; ++a) {
    Mat phi(n, t.dim());
    for (size_t s = 0; s < t.dim(); ++s) phi.set_col(s, pair(s, a));
    if (!dt.coords->contains(flatten(phi))) {
      well = false;
      continue;
    }
    amb_to_dt.set_col(a, dt.coords_of(phi));
  }
  res.report.add("pairing functionals are left linear", well);
  if (!well) return res;
  // relations pair to zero: the ambient map kills ker(proj)
  Mat rel = kernel(o.proj);
  res.report.add("pairing descends to Omega", (amb_to_dt * rel).is_zero());
  res.kaehler_to_dual = amb_to_dt * o.lift;
  res.reverse_iso = res.kaehler_to_dual.rows() == res.kaehler_to_dual.cols() && rank(res.kaehler_to_dual) == o.module.dim();
  res.report.merge("Omega -> D(T) ", check_morphism(o.module, dt.module, res.kaehler_to_dual, 0));
  // T -> D(Omega)
  Mat t_to_dom(dom.module.dim(), t.dim());
  bool lin = true;
  for (size_t s = 0; s < t.dim(); ++s) {
    Mat phi(n, o.module.dim());
    for (size_t w = 0; w < o.module.dim(); ++w) {
      Vec amb = o.lift.col(w);
      Vec v(n);
      for (size_t a = 0; a < N; ++a)
        if (sgn(amb[a]) != 0) v = add(v, scale(pair(s, a), amb[a]));
      phi.set_col(w, scale(v, sign_of((long long)t.space.deg(s) * o.module.deg(w))));
    }
    if (!dom.coords->contains(flatten(phi))) {
      lin = false;
      continue;
    }
    t_to_dom.set_col(s, dom.coords_of(phi));
  }
  res.report.add("signed pairing functionals are left linear", lin);
  if (!lin) return res;
  res.tangent_to_dual = t_to_dom;
  res.iso = t_to_dom.rows() == t_to_dom.cols() && rank(t_to_dom) == t.dim();
  res.report.merge("T -> D(Omega) ", check_morphism(t.module, dom.module, t_to_dom, 0));
  res.report.add("T -> D(Omega) isomorphism", res.iso);
  res.report.add("Omega -> D(T) isomorphism", res.reverse_iso);
  return res;
}

}  // namespace dga
