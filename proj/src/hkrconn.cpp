#include "dgalg/hkrconn.hpp"

namespace dga {

namespace {

// tensor_A(tensor_A(a, b), c) <-> a (x)_k b (x)_k c
Mat expand3(const TensorA& inner, const TensorA& outer) {
  return Mat::kron(inner.lift, Mat::identity(outer.n2)) * outer.lift;
}
Mat collapse3(const TensorA& inner, const TensorA& outer) {
  return outer.proj * Mat::kron(inner.proj, Mat::identity(outer.n2));
}
Vec triple(const TensorA& inner, const TensorA& outer, const Vec& x, const Vec& y, const Vec& z) {
  return outer.of(inner.of(x, y), z);
}

bool invertible(const Mat& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

// Left module given by a homogeneous span in `big` modulo homogeneous relations inside that span.
struct LeftSubquotient {
  Bimodule module;
  Mat span;          // columns in big
  Mat to_module;     // span coordinates -> module
  Mat from_module;   // module -> span coordinates
  Coords coords;
  bool ok = true;
};

LeftSubquotient left_subquotient(const Bimodule& big, const Mat& span, const Mat& rel, const std::string& tag) {
  LeftSubquotient s;
  s.span = span;
  s.coords = Coords(span);
  Mat rk = s.coords.of(rel);
  QuotientSpace qs = quotient_space(span.cols(), rk);
  s.to_module = qs.proj;
  s.from_module = qs.lift;
  const size_t n = qs.lift.cols();
  std::vector<std::string> names;
  std::vector<int> degs;
  for (size_t k = 0; k < n; ++k) {
    Vec x = span * qs.lift.col(k);
    names.push_back(tag + std::to_string(k));
    degs.push_back(big.space.degree_of(x).value_or(0));
  }
  auto restrict_map = [&](const Mat& f) {
    Mat in_span = f * span;
    bool inside = true;
    for (size_t c = 0; c < in_span.cols() && inside; ++c) inside = s.coords.contains(in_span.col(c));
    if (!inside) {
      s.ok = false;
      return Mat(n, n);
    }
    Mat fk = s.coords.of(in_span);
    if (!(qs.proj * fk * rk).is_zero()) s.ok = false;
    return Mat(qs.proj * fk * qs.lift);
  };
  std::vector<Mat> left;
  for (size_t a = 0; a < big.A->dim(); ++a) left.push_back(restrict_map(big.left[a]));
  Mat d = restrict_map(big.d);
  s.module = symmetric_bimodule(big.A, GradedSpace(names, degs), left, d, tag);
  return s;
}

// value of the functional pairing <v, phi (x) m> = phi(v) m for every basis t of V^* (x)_A M: (M.dim) x (V.dim)
std::vector<Mat> pairing_table(const Dual& vstar, const TensorA& vm, const Bimodule& m) {
  const size_t nv = vstar.functionals.empty() ? 0 : vstar.functionals[0].cols();
  std::vector<Mat> out;
  for (size_t t = 0; t < vm.module.dim(); ++t) {
    Vec l = vm.lift.col(t);
    Mat e(m.dim(), nv);
    for (size_t k = 0; k < l.size(); ++k) {
      if (sgn(l[k]) == 0) continue;
      const Mat& phi = vstar.functionals[k / m.dim()];
      Vec mk = unit_vec(m.dim(), k % m.dim());
      for (size_t v = 0; v < nv; ++v) {
        Vec val = scale(m.L(phi.col(v)) * mk, l[k]);
        for (size_t r = 0; r < m.dim(); ++r) e(r, v) += val[r];
      }
    }
    out.push_back(e);
  }
  return out;
}

Vec act(const ConnectionTriple& c, size_t v, const Vec& mt) {
  const size_t nmt = c.Mt.dim();
  Vec out(c.M.dim());
  for (size_t k = 0; k < nmt; ++k)
    if (sgn(mt[k]) != 0) out = add(out, scale(c.action.col(v * nmt + k), mt[k]));
  return out;
}

Vec act_v(const ConnectionTriple& c, const Vec& v, const Vec& mt) {
  Vec out(c.M.dim());
  for (size_t k = 0; k < v.size(); ++k)
    if (sgn(v[k]) != 0) out = add(out, scale(act(c, k, mt), v[k]));
  return out;
}

}  // namespace

Mat HkrClass::chain_section() const {
  if (!split) throw Rejected("HKR class is nonzero: no chain section");
  return ext.splitting + seq.inc * ext.cobound;
}

HkrClass hkr_class(const AnchoredModule& v, const Bimodule& m) {
  HkrClass h;
  if (!check_triangular_free(v.V).ok()) throw Rejected("hkr_class: V must be triangular-free");
  Report tf = check_triangular_free(m);
  if (!tf.ok()) throw Rejected("hkr_class: M must be triangular-free (" + tf.failures()[0].name + ")");
  h.sigma = build_sigma(v);
  const Bimodule& S = h.sigma.sigma;
  h.sigma_m = tensor_A(S, m);
  h.v_m = tensor_A(v.V, m);
  h.seq.sub = m;
  h.seq.mid = h.sigma_m.module;
  h.seq.quo = h.v_m.module;
  Vec one = h.sigma.inc_A * v.A()->one();
  h.seq.inc = Mat(h.sigma_m.module.dim(), m.dim());
  for (size_t k = 0; k < m.dim(); ++k) h.seq.inc.set_col(k, h.sigma_m.of(one, unit_vec(m.dim(), k)));
  h.seq.proj = tensor_A_maps(h.sigma_m, h.v_m, S, m, h.sigma.proj_V, 0, Mat::identity(m.dim()), 0);
  h.ext = ext_class(h.seq, true);
  h.split = h.ext.split;
  h.report.merge("ext ", h.ext.report);
  return h;
}

ConnectionTriple connection_from_action(const AnchoredModule& v, const Bimodule& mt, const Bimodule& m, const Mat& q,
                                        const Mat& action) {
  ConnectionTriple c;
  c.V = v;
  c.M = m;
  c.Mt = mt;
  c.q = q;
  c.action = action;
  c.vstar = left_dual(v.V);
  c.vstar_m = tensor_A(c.vstar.module, m);
  auto table = pairing_table(c.vstar, c.vstar_m, m);
  const size_t nv = v.V.dim(), nm = m.dim();
  Mat pair(nm * nv, c.vstar_m.module.dim());
  for (size_t t = 0; t < table.size(); ++t) {
    Vec col(nm * nv);
    for (size_t vi = 0; vi < nv; ++vi)
      for (size_t r = 0; r < nm; ++r) col[vi * nm + r] = table[t](r, vi);
    pair.set_col(t, col);
  }
  c.nabla = Mat(c.vstar_m.module.dim(), mt.dim());
  bool rep = true;
  for (size_t k = 0; k < mt.dim(); ++k) {
    Vec want(nm * nv);
    for (size_t vi = 0; vi < nv; ++vi)
      for (size_t r = 0; r < nm; ++r) want[vi * nm + r] = action(r, vi * mt.dim() + k);
    auto x = solve(pair, want);
    if (!x) {
      rep = false;
      continue;
    }
    c.nabla.set_col(k, *x);
  }
  c.report.add("nabla_v A-linear in v (represented in V^* (x)_A M)", rep);
  c.report.merge("", validate_connection(c));
  return c;
}

ConnectionTriple connection_from_nabla(const AnchoredModule& v, const Bimodule& mt, const Bimodule& m, const Mat& q,
                                       const Mat& nabla) {
  Dual vstar = left_dual(v.V);
  TensorA vm = tensor_A(vstar.module, m);
  auto table = pairing_table(vstar, vm, m);
  const size_t nv = v.V.dim(), nmt = mt.dim();
  Mat action(m.dim(), nv * nmt);
  for (size_t k = 0; k < nmt; ++k)
    for (size_t t = 0; t < vm.module.dim(); ++t) {
      const Q& c = nabla(t, k);
      if (sgn(c) == 0) continue;
      for (size_t vi = 0; vi < nv; ++vi) action.set_col(vi * nmt + k, add(action.col(vi * nmt + k), scale(table[t].col(vi), c)));
    }
  return connection_from_action(v, mt, m, q, action);
}

Mat pigeonnier_map(const ConnectionTriple& c, const Atiyah& s, const TensorA& sigma_mt) {
  const Cdga& A = *c.V.A();
  const size_t na = A.dim(), ns = s.sigma.dim(), nmt = c.Mt.dim();
  Mat amb(c.M.dim(), ns * nmt);
  for (size_t i = 0; i < ns; ++i)
    for (size_t k = 0; k < nmt; ++k) {
      Vec val = i < na ? c.M.left[i] * c.q.col(k) : act(c, i - na, unit_vec(nmt, k));
      amb.set_col(i * nmt + k, val);
    }
  return amb * sigma_mt.lift;
}

Report validate_connection(const ConnectionTriple& c) {
  Report r;
  const Cdga& A = *c.V.A();
  const size_t na = A.dim(), nv = c.V.V.dim(), nmt = c.Mt.dim();
  r.merge("q ", check_morphism(c.Mt, c.M, c.q, 0, true, true));
  r.add("q quasi-isomorphism", is_quasi_iso(c.Mt.complex(), c.M.complex(), c.q));
  bool leib = true, vlin = true, nleib = true;
  std::string w;
  for (size_t vi = 0; vi < nv; ++vi)
    for (size_t a = 0; a < na; ++a)
      for (size_t k = 0; k < nmt; ++k) {
        Vec ek = unit_vec(nmt, k);
        Vec lhs = act(c, vi, c.Mt.left[a] * ek);
        Vec rhs = add(scale(c.M.left[a] * act(c, vi, ek), sign_of((long long)c.V.V.deg(vi) * A.deg(a))),
                      c.M.L(c.V.rho[vi].col(a)) * c.q.col(k));
        if (lhs != rhs && leib) {
          leib = false;
          w = c.V.V.space.name(vi) + "," + A.space().name(a) + "," + c.Mt.space.name(k);
        }
        if (act_v(c, c.V.V.left[a] * unit_vec(nv, vi), ek) != c.M.left[a] * act(c, vi, ek)) vlin = false;
      }
  r.add("Leibniz nabla_v(a m) = (-1)^{|v||a|} a nabla_v(m) + rho(v)(a) q(m)", leib, w);
  r.add("nabla_{a v} = a nabla_v", vlin);
  // the same rule for nabla with values in V^* (x)_A M
  for (size_t a = 0; a < na; ++a) {
    Mat rs(na, nv);
    for (size_t vi = 0; vi < nv; ++vi) rs.set_col(vi, c.V.rho[vi].col(a));
    if (!c.vstar.coords->contains(flatten(rs))) {
      nleib = false;
      break;
    }
    Vec rsd = c.vstar.coords_of(rs);
    for (size_t k = 0; k < nmt && nleib; ++k) {
      Vec lhs = c.nabla * (c.Mt.left[a] * unit_vec(nmt, k));
      Vec rhs = add(c.vstar_m.module.left[a] * c.nabla.col(k), c.vstar_m.of(rsd, c.q.col(k)));
      nleib = lhs == rhs;
    }
  }
  r.add("Leibniz nabla(a m) = a nabla(m) + rho^*(da) (x) q(m)", nleib);
  Atiyah s = build_sigma(c.V);
  TensorA smt = tensor_A(s.sigma, c.Mt);
  const size_t ns = s.sigma.dim();
  Mat amb(c.M.dim(), ns * nmt);
  for (size_t i = 0; i < ns; ++i)
    for (size_t k = 0; k < nmt; ++k)
      amb.set_col(i * nmt + k, i < na ? c.M.left[i] * c.q.col(k) : act(c, i - na, unit_vec(nmt, k)));
  r.add("pigeonnier map well defined on Sigma (x)_A M~", (amb * kernel(smt.proj)).is_zero());
  Mat mu = amb * smt.lift;
  r.merge("pigeonnier map ", check_morphism(smt.module, c.M, mu, 0, true, true));
  Vec one = s.inc_A * A.one();
  bool restr = true;
  for (size_t k = 0; k < nmt; ++k) restr = restr && mu * smt.of(one, unit_vec(nmt, k)) == c.q.col(k);
  r.add("pigeonnier map restricts to q", restr);
  return r;
}

ConnectionTriple canonical_connection(const AnchoredModule& v, const Bimodule& m) {
  if (!m.free) throw Rejected("canonical_connection: M must be free");
  const Cdga& A = *v.A();
  const size_t na = A.dim(), nv = v.V.dim(), nm = m.dim();
  Mat G = free_basis_matrix(m);
  Mat Ginv = *inverse(G);
  Mat action(nm, nv * nm);
  for (size_t vi = 0; vi < nv; ++vi) {
    Mat vals(nm, G.cols());
    for (size_t l = 0; l < m.free->gens.size(); ++l)
      for (size_t i = 0; i < na; ++i) vals.set_col(l * na + i, m.L(v.rho[vi].col(i)) * m.free->gens[l]);
    Mat per = vals * Ginv;
    for (size_t k = 0; k < nm; ++k) action.set_col(vi * nm + k, per.col(k));
  }
  return connection_from_action(v, m, m, Mat::identity(nm), action);
}

ConnectionTriple connection_from_splitting(const AnchoredModule& v, const Bimodule& m, const HkrClass& w) {
  if (!w.split) throw Rejected("connection_from_splitting: the HKR class does not vanish");
  const size_t na = v.A()->dim(), nv = v.V.dim(), nm = m.dim();
  Mat S = w.chain_section();
  Coords in_m(w.seq.inc);
  Mat action(nm, nv * nm);
  // nabla_v(m) = (0, v) (x) m - delta(v (x) m), which lies in M
  for (size_t vi = 0; vi < nv; ++vi)
    for (size_t k = 0; k < nm; ++k) {
      Vec em = unit_vec(nm, k);
      Vec x = sub(w.sigma_m.of(unit_vec(w.sigma.sigma.dim(), na + vi), em), S * w.v_m.of(unit_vec(nv, vi), em));
      action.set_col(vi * nm + k, in_m(x));
    }
  return connection_from_action(v, m, m, Mat::identity(nm), action);
}

HkrSplitting splitting_from_connection(const ConnectionTriple& c) {
  HkrSplitting out;
  Report valid = validate_connection(c);
  if (!valid.ok()) throw Rejected("splitting_from_connection: invalid connection (" + valid.failures()[0].name + ")");
  Atiyah s = build_sigma(c.V);
  TensorA smt = tensor_A(s.sigma, c.Mt);
  out.mu = pigeonnier_map(c, s, smt);
  // the chain of equalities: mu((a,v) a' (x) m) = mu((a,v) (x) a' m) on basis elements
  {
    const Cdga& A = *c.V.A();
    bool chain_eq = true;
    for (size_t i = 0; i < s.sigma.dim() && chain_eq; ++i)
      for (size_t a = 0; a < A.dim() && chain_eq; ++a)
        for (size_t k = 0; k < c.Mt.dim() && chain_eq; ++k) {
          Vec si = unit_vec(s.sigma.dim(), i), ek = unit_vec(c.Mt.dim(), k);
          chain_eq = out.mu * smt.of(s.sigma.right[a] * si, ek) == out.mu * smt.of(si, c.Mt.left[a] * ek);
        }
    out.report.add("mu((a, v) a' (x) m) = mu((a, v) (x) a' m)", chain_eq);
  }
  out.report.merge("mu ", check_morphism(smt.module, c.M, out.mu, 0, true, true));
  HkrClass h = hkr_class(c.V, c.M);
  if (invertible(c.q)) {
    Mat qinv = *inverse(c.q);
    Mat to_mt = tensor_A_maps(h.sigma_m, smt, s.sigma, c.M, Mat::identity(s.sigma.dim()), 0, qinv, 0);
    Mat retraction = c.q * qinv * out.mu * to_mt;  // Sigma (x) M -> M
    out.report.add("retraction of 1 (x) -", retraction * h.seq.inc == Mat::identity(c.M.dim()));
    Mat sec = h.ext.splitting - h.seq.inc * retraction * h.ext.splitting;
    out.section = sec;
    out.ext = ext_class_with_splitting(h.seq, true, sec);
    out.report.merge("ext ", out.ext.report);
    out.report.add("section is a chain map", h.seq.mid.d * sec == sec * h.seq.quo.d);
    out.report.add("cocycle of the section vanishes", out.ext.cocycle.is_zero());
  } else {
    out.ext = h.ext;
    out.report.add("HKR class of M vanishes", h.split);
    if (h.split) out.section = h.chain_section();
  }
  return out;
}

Dual free_dual(const Bimodule& m) {
  Dual d = left_dual(m);
  if (!m.free) return d;
  const Cdga& A = *m.A;
  const size_t na = A.dim();
  Mat G = free_basis_matrix(m);
  Mat Ginv = *inverse(G);
  FreeBasis fb;
  const size_t ng = m.free->gens.size();
  for (size_t r = 0; r < ng; ++r) {
    size_t l = ng - 1 - r;
    Mat vals(na, G.cols());
    for (size_t i = 0; i < na; ++i) vals.set_col(l * na + i, unit_vec(na, i));
    fb.gens.push_back(d.coords_of(vals * Ginv));
    fb.names.push_back(m.free->names[l] + "*");
    fb.degs.push_back(-m.free->degs[l]);
  }
  d.module.free = fb;
  return d;
}

DualConnection dual_connection(const ConnectionTriple& c) {
  DualConnection out;
  if (!invertible(c.q)) throw Rejected("dual_connection: q must be invertible (M~ = M up to isomorphism)");
  Mat qinv = *inverse(c.q);
  out.dual = free_dual(c.M);
  const Dual& D = out.dual;
  const size_t nv = c.V.V.dim(), nm = c.M.dim(), nd = D.module.dim();
  Mat action(nd, nv * nd);
  bool lin = true;
  for (size_t vi = 0; vi < nv; ++vi)
    for (size_t f = 0; f < nd; ++f) {
      const Mat& phi = D.functionals[f];
      Mat psi(phi.rows(), nm);
      for (size_t k = 0; k < nm; ++k) {
        Vec val = sub(c.V.rho[vi] * phi.col(k), phi * act(c, vi, qinv.col(k)));
        psi.set_col(k, scale(val, sign_of((long long)c.V.V.deg(vi) * c.M.deg(k))));
      }
      if (!D.coords->contains(flatten(psi))) {
        lin = false;
        continue;
      }
      action.set_col(vi * nd + f, D.coords_of(psi));
    }
  out.report.add("defining formula yields left-linear functionals", lin);
  out.connection = connection_from_action(c.V, D.module, D.module, Mat::identity(nd), action);
  out.report.merge("dual ", out.connection.report);
  return out;
}

ConnectionSequence connection_sequence(const AnchoredModule& v, const Bimodule& m) {
  ConnectionSequence cs;
  cs.sigma_dual = build_sigma_dual(v);
  const DualAtiyah& sd = cs.sigma_dual;
  cs.vstar_m = tensor_A(sd.vstar.module, m);
  cs.sigma_m = tensor_A(sd.sigma, m);
  cs.seq.sub = cs.vstar_m.module;
  cs.seq.mid = cs.sigma_m.module;
  cs.seq.quo = m;
  cs.seq.inc = tensor_A_maps(cs.vstar_m, cs.sigma_m, sd.vstar.module, m, sd.seq.inc, 0, Mat::identity(m.dim()), 0);
  const size_t ns = sd.sigma.dim(), nm = m.dim();
  Mat amb(nm, ns * nm);
  for (size_t t = 0; t < ns; ++t)
    for (size_t k = 0; k < nm; ++k) amb.set_col(t * nm + k, m.L(sd.seq.proj.col(t)) * unit_vec(nm, k));
  if (!(amb * kernel(cs.sigma_m.proj)).is_zero()) throw std::logic_error("connection_sequence: projection does not descend");
  cs.seq.proj = amb * cs.sigma_m.lift;
  cs.ext = ext_class(cs.seq, true);
  cs.split = cs.ext.split;
  return cs;
}

// ---------------------------------------------------------------------------------------------

BaerCheck baer_additivity_check(const AnchoredModule& v, const Bimodule& m1, const Bimodule& m2) {
  BaerCheck out;
  const Cdga& A = *v.A();
  const size_t na = A.dim();
  HkrClass h1 = hkr_class(v, m1), h2 = hkr_class(v, m2);
  const Atiyah& at = h1.sigma;
  const Bimodule& S = at.sigma;
  const size_t ns = S.dim(), n1 = m1.dim(), n2 = m2.dim(), nv = v.V.dim();
  Vec one = at.inc_A * A.one();
  Mat dagger = Mat::identity(ns);
  for (size_t i = 0; i < na; ++i) dagger(i, i) = Q(1, 2);

  TensorA t1s = tensor_A(m1, S), x1 = tensor_A(t1s.module, m2);
  TensorA t2s = tensor_A(m2, S), x2 = tensor_A(t2s.module, m1);
  TensorA tv1 = tensor_A(v.V, m1), q = tensor_A(tv1.module, m2);
  TensorA ts1 = tensor_A(S, m1), top = tensor_A(ts1.module, m2);
  TensorA m12 = tensor_A(m1, m2);
  auto deg1 = [&](size_t i) { return m1.deg(i); };
  auto deg2 = [&](size_t i) { return m2.deg(i); };
  auto degs = [&](size_t i) { return S.deg(i); };
  auto e1 = [&](size_t i) { return unit_vec(n1, i); };
  auto e2 = [&](size_t i) { return unit_vec(n2, i); };
  auto es = [&](size_t i) { return unit_vec(ns, i); };

  // projections of the two middle terms to V (x) M1 (x) M2
  Mat p1amb(q.module.dim(), n1 * ns * n2), p2amb(q.module.dim(), n2 * ns * n1);
  for (size_t i = 0; i < n1; ++i)
    for (size_t j = 0; j < ns; ++j)
      for (size_t k = 0; k < n2; ++k) {
        Vec pv = at.proj_V * es(j);
        p1amb.set_col((i * ns + j) * n2 + k, scale(triple(tv1, q, pv, e1(i), e2(k)), sign_of((long long)degs(j) * deg1(i))));
      }
  for (size_t k = 0; k < n2; ++k)
    for (size_t j = 0; j < ns; ++j)
      for (size_t i = 0; i < n1; ++i) {
        Vec pv = at.proj_V * es(j);
        p2amb.set_col((k * ns + j) * n1 + i,
                      scale(triple(tv1, q, pv, e1(i), e2(k)), sign_of((long long)deg2(k) * (degs(j) + deg1(i)))));
      }
  Mat ex1 = expand3(t1s, x1), ex2 = expand3(t2s, x2);
  out.report.add("M1 (x) Sigma (x) M2 -> V (x) M1 (x) M2 descends", (p1amb * kernel(collapse3(t1s, x1))).is_zero());
  out.report.add("M2 (x) Sigma (x) M1 -> V (x) M1 (x) M2 descends", (p2amb * kernel(collapse3(t2s, x2))).is_zero());
  Mat p1 = p1amb * ex1, p2 = p2amb * ex2;
  Bimodule sum = direct_sum(x1.module, x2.module);
  const size_t d1 = x1.module.dim(), d2 = x2.module.dim();
  Mat fiber = kernel(Mat::hcat(p1, -p2));
  auto pair = [&](const Vec& a, const Vec& b) {
    Vec o(d1 + d2);
    for (size_t t = 0; t < d1; ++t) o[t] = a[t];
    for (size_t t = 0; t < d2; ++t) o[d1 + t] = b[t];
    return o;
  };
  std::vector<Vec> rels;
  for (size_t i = 0; i < n1; ++i)
    for (size_t k = 0; k < n2; ++k)
      rels.push_back(pair(triple(t1s, x1, e1(i), one, e2(k)),
                          scale(triple(t2s, x2, e2(k), one, e1(i)), -sign_of((long long)deg1(i) * deg2(k)))));
  Mat rel = Mat::from_cols(d1 + d2, rels);
  LeftSubquotient T = left_subquotient(sum, fiber, rel, "T");
  out.report.add("T is a left module", T.ok);
  out.T = T.module;
  auto to_T = [&](const Vec& x) { return T.to_module * T.coords(x); };

  // tau
  const size_t ntop = top.module.dim();
  Mat tau_amb(T.module.dim(), ns * n1 * n2);
  Mat fib_amb(d1 + d2, ns * n1 * n2);
  for (size_t j = 0; j < ns; ++j)
    for (size_t i = 0; i < n1; ++i)
      for (size_t k = 0; k < n2; ++k) {
        Vec sd = dagger * es(j);
        Vec c1 = scale(triple(t1s, x1, e1(i), sd, e2(k)), sign_of((long long)degs(j) * deg1(i)));
        Vec c2 = scale(triple(t2s, x2, e2(k), sd, e1(i)), sign_of((long long)(degs(j) + deg1(i)) * deg2(k)));
        fib_amb.set_col((j * n1 + i) * n2 + k, pair(c1, c2));
      }
  bool in_fiber = true;
  Coords fc(fiber);
  for (size_t c = 0; c < fib_amb.cols() && in_fiber; ++c) in_fiber = fc.contains(fib_amb.col(c));
  out.report.add("tau lands in the fiber product", in_fiber);
  if (!in_fiber) return out;
  for (size_t c = 0; c < fib_amb.cols(); ++c) tau_amb.set_col(c, to_T(fib_amb.col(c)));
  out.report.add("tau well defined on Sigma (x)_A M1 (x)_A M2", (tau_amb * kernel(collapse3(ts1, top))).is_zero());
  out.tau = tau_amb * expand3(ts1, top);

  // the two displayed component computations, on basis elements
  {
    bool f1 = true, f2 = true, g1 = true, g2 = true;
    for (size_t j = 0; j < ns; ++j)
      for (size_t a = 0; a < na; ++a)
        for (size_t i = 0; i < n1; ++i)
          for (size_t k = 0; k < n2; ++k) {
            int s = degs(j), da = A.deg(a), m1d = deg1(i), m2d = deg2(k);
            Vec sd = dagger * es(j);
            Vec th = scale(v.rho.empty() ? Vec(na) : v.anchor(at.proj_V * es(j)) * unit_vec(na, a), Q(1, 2));
            Vec am2 = m2.left[a] * e2(k), m1a = m1.right[a] * e1(i), am1 = m1.left[a] * e1(i);
            Vec th_m1 = m1.L(th) * e1(i), th_m2 = m2.L(th) * e2(k);
            // tau(s (x) m1 (x) a' m2) - tau(s (x) m1 a' (x) m2)
            Vec l1 = sub(scale(triple(t1s, x1, e1(i), sd, am2), sign_of((long long)s * m1d)),
                         scale(triple(t1s, x1, m1a, sd, e2(k)), sign_of((long long)s * (m1d + da))));
            Vec r1 = scale(triple(t1s, x1, th_m1, one, e2(k)), 2 * sign_of((long long)da * m1d));
            f1 = f1 && l1 == r1;
            Vec l2 = sub(scale(triple(t2s, x2, am2, sd, e1(i)), sign_of((long long)(s + m1d) * (da + m2d))),
                         scale(triple(t2s, x2, e2(k), sd, m1a), sign_of((long long)(s + m1d + da) * m2d)));
            Vec r2 = scale(triple(t2s, x2, th_m2, one, e1(i)), -2 * sign_of((long long)m1d * m2d + da * m1d));
            f2 = f2 && l2 == r2;
            // tau(s a' (x) m1 (x) m2) - tau(s (x) a' m1 (x) m2)
            Vec sa = S.right[a] * es(j);
            Vec sad = dagger * sa;
            Vec k1 = sub(scale(triple(t1s, x1, e1(i), sad, e2(k)), sign_of((long long)(s + da) * m1d)),
                         scale(triple(t1s, x1, am1, sd, e2(k)), sign_of((long long)s * (da + m1d))));
            Vec q1 = triple(t1s, x1, th_m1, one, e2(k));
            g1 = g1 && k1 == q1;
            Vec k2 = scale(sub(triple(t2s, x2, e2(k), sad, e1(i)), triple(t2s, x2, e2(k), sd, am1)),
                           sign_of((long long)(s + da + m1d) * m2d));
            Vec q2 = scale(triple(t2s, x2, th_m2, one, e1(i)), -sign_of((long long)m1d * m2d));
            g2 = g2 && k2 == q2;
          }
    out.report.add("tau(s m1 a'm2) - tau(s m1a' m2): first component", f1);
    out.report.add("tau(s m1 a'm2) - tau(s m1a' m2): second component", f2);
    out.report.add("tau(sa' m1 m2) - tau(s a'm1 m2): first component", g1);
    out.report.add("tau(sa' m1 m2) - tau(s a'm1 m2): second component", g2);
  }

  // the two rows
  ShortExact top_seq, bot_seq;
  top_seq.sub = m12.module;
  top_seq.mid = top.module;
  top_seq.quo = q.module;
  top_seq.inc = Mat(ntop, m12.module.dim());
  Mat inc_amb(ntop, n1 * n2), incT_amb(T.module.dim(), n1 * n2);
  for (size_t i = 0; i < n1; ++i)
    for (size_t k = 0; k < n2; ++k) {
      inc_amb.set_col(i * n2 + k, triple(ts1, top, one, e1(i), e2(k)));
      incT_amb.set_col(i * n2 + k, to_T(pair(triple(t1s, x1, e1(i), one, e2(k)), Vec(d2))));
    }
  top_seq.inc = inc_amb * m12.lift;
  Mat ptop_amb(q.module.dim(), ns * n1 * n2);
  for (size_t j = 0; j < ns; ++j)
    for (size_t i = 0; i < n1; ++i)
      for (size_t k = 0; k < n2; ++k) ptop_amb.set_col((j * n1 + i) * n2 + k, triple(tv1, q, at.proj_V * es(j), e1(i), e2(k)));
  top_seq.proj = ptop_amb * expand3(ts1, top);
  bot_seq.sub = m12.module;
  bot_seq.mid = T.module;
  bot_seq.quo = q.module;
  bot_seq.inc = incT_amb * m12.lift;
  Mat first(d1, d1 + d2);
  for (size_t t = 0; t < d1; ++t) first(t, t) = 1;
  bot_seq.proj = p1 * first * T.span * T.from_module;
  out.report.merge("top row ", validate_short_exact(top_seq, true));
  out.report.merge("bottom row ", validate_short_exact(bot_seq, true));
  out.report.merge("tau ", check_morphism(top.module, T.module, out.tau, 0, true, true));
  out.report.add("left square commutes", out.tau * top_seq.inc == bot_seq.inc);
  out.report.add("right square commutes", bot_seq.proj * out.tau == top_seq.proj);
  if (!out.report.ok()) return out;

  ExtWitness wt = ext_class(top_seq, true), wb = ext_class(bot_seq, true);
  out.report.add("rows have the same extension class", cobound(top_seq, true, wt.cocycle - wb.cocycle).solution.has_value());
  // Theta_{M1} (x) id + id (x) Theta_{M2}
  Mat c1 = tensor_A_maps(q, m12, tv1.module, m2, h1.ext.cocycle, 1, Mat::identity(n2), 0);
  TensorA tv2 = tensor_A(v.V, m2);
  Mat c2amb(m12.module.dim(), nv * n1 * n2);
  for (size_t vi = 0; vi < nv; ++vi)
    for (size_t i = 0; i < n1; ++i)
      for (size_t k = 0; k < n2; ++k) {
        Vec inner = h2.ext.cocycle * tv2.of(unit_vec(nv, vi), e2(k));
        c2amb.set_col((vi * n1 + i) * n2 + k,
                      scale(m12.of(e1(i), inner), sign_of((long long)v.V.deg(vi) * deg1(i) + deg1(i))));
      }
  Mat c2 = c2amb * expand3(tv1, q);
  out.additive = cobound(top_seq, true, wt.cocycle - c1 - c2).solution.has_value();
  out.report.add("Theta_{M1 (x) M2} = Theta_{M1} (x) id + id (x) Theta_{M2}", out.additive);
  return out;
}

// ---------------------------------------------------------------------------------------------

FormalitySplit formality_split(const AnchoredModule& v, const Bimodule& m, int order) {
  FormalitySplit out;
  if (order < 0) throw Rejected("formality_split: order must be >= 0");
  HkrClass hm = hkr_class(v, m);
  HkrClass hvm = hkr_class(v, hm.v_m.module);
  out.theta_m_zero = hm.split;
  out.theta_vm_zero = hvm.split;
  TruncatedEnvelope u = coequalizer_tower(v, order);
  const size_t nm = m.dim(), ns = u.F[1].dim();
  const Bimodule& S = u.sigma.sigma;
  // direct ext computation per filtration step
  for (int n = 0; n <= order; ++n) {
    out.filtered.push_back(tensor_A(u.F[n], m));
    out.graded.push_back(tensor_A(u.vpowers[n], m));
  }
  for (int n = 1; n <= order; ++n) {
    ShortExact s;
    s.sub = out.filtered[n - 1].module;
    s.mid = out.filtered[n].module;
    s.quo = out.graded[n].module;
    s.inc = tensor_A_maps(out.filtered[n - 1], out.filtered[n], u.F[n - 1], m, u.incl[n], 0, Mat::identity(nm), 0);
    s.proj = tensor_A_maps(out.filtered[n], out.graded[n], u.F[n], m, u.gr_map[n], 0, Mat::identity(nm), 0);
    ExtWitness w = ext_class(s, true);
    out.report.add("step " + std::to_string(n) + " sequence", w.report.ok());
    if (!w.split && out.first_nonsplit == 0) out.first_nonsplit = n;
  }
  bool classes = out.theta_m_zero && out.theta_vm_zero;
  if (order >= 2)
    out.report.add("F^2 splits iff Theta_M and Theta_{V (x) M} vanish",
                   classes == (out.first_nonsplit == 0 || out.first_nonsplit > 2));
  if (!classes) return out;

  // sections by induction: V (x) X_{n-1} -> Sigma (x) X_{n-1} -> Sigma (x) Y_{n-1}
  std::vector<Bimodule> X{m}, Y{m};
  std::vector<TensorA> xs(1), ys(1);
  std::vector<Mat> sec{Mat::identity(nm)};
  bool all_zero = true;
  for (int n = 1; n <= order; ++n) {
    HkrClass h = hkr_class(v, X[n - 1]);
    all_zero = all_zero && h.split;
    if (!h.split) {
      out.report.add("Theta_{V^(x)" + std::to_string(n - 1) + " (x) M} vanishes", false);
      return out;
    }
    xs.push_back(h.v_m);
    X.push_back(h.v_m.module);
    ys.push_back(tensor_A(S, Y[n - 1]));
    Y.push_back(ys[n].module);
    Mat lift_next = tensor_A_maps(h.sigma_m, ys[n], S, X[n - 1], Mat::identity(ns), 0, sec[n - 1], 0);
    sec.push_back(lift_next * h.chain_section());
  }
  out.report.add("Theta_{V^(x)k (x) M} vanishes for k < N", all_zero);
  // right-nested to left-nested, through the k-level tensors
  std::vector<TensorA> pst(2), vst(2);
  for (int n = 2; n <= order; ++n) {
    pst.push_back(u.steps[n]);
    vst.push_back(tensor_A(u.vpowers[n - 1], v.V));
  }
  Mat EY = Mat::identity(nm), EX = Mat::identity(nm);
  Mat PS = Mat::identity(1), PV = Mat::identity(1);
  out.sections.push_back(Mat::identity(nm));
  bool splits = true, chain = true;
  for (int n = 1; n <= order; ++n) {
    EY = Mat::kron(Mat::identity(ns), EY) * ys[n].lift;
    EX = Mat::kron(Mat::identity(v.V.dim()), EX) * xs[n].lift;
    PS = n == 1 ? Mat::identity(ns) : Mat(pst[n].proj * Mat::kron(PS, Mat::identity(ns)));
    PV = n == 1 ? Mat::identity(v.V.dim()) : Mat(vst[n].proj * Mat::kron(PV, Mat::identity(v.V.dim())));
    TensorA pm = tensor_A(u.powers[n], m);
    Mat Z = pm.proj * Mat::kron(PS, Mat::identity(nm)) * EY;
    Mat W = out.graded[n].proj * Mat::kron(PV, Mat::identity(nm)) * EX;
    auto Winv = inverse(W);
    if (!Winv) {
      splits = false;
      break;
    }
    Mat to_F = tensor_A_maps(pm, out.filtered[n], u.powers[n], m, u.proj[n], 0, Mat::identity(nm), 0);
    Mat s = to_F * Z * sec[n] * *Winv;
    Mat gr = tensor_A_maps(out.filtered[n], out.graded[n], u.F[n], m, u.gr_map[n], 0, Mat::identity(nm), 0);
    splits = splits && gr * s == Mat::identity(out.graded[n].module.dim());
    Report mr = check_morphism(out.graded[n].module, out.filtered[n].module, s, 0, true, true);
    chain = chain && mr.ok();
    out.sections.push_back(s);
  }
  out.report.add("sections compose with the projections to the identity", splits);
  out.report.add("sections are left-linear chain maps", chain);
  return out;
}

}  // namespace dga
