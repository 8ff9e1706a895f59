#include "dgalg/atiyah.hpp"

namespace dga {

Mat AnchoredModule::anchor(const Vec& v) const {
  const size_t n = A()->dim();
  Mat m(n, n);
  for (size_t k = 0; k < v.size(); ++k)
    if (sgn(v[k]) != 0) m += rho[k].scaled(v[k]);
  return m;
}

Report validate_anchored(const AnchoredModule& v) {
  Report r;
  r.merge("V ", validate_bimodule(v.V));
  r.add("V is a left module", is_symmetric(v.V));
  bool shapes = v.rho.size() == v.V.dim();
  r.add("one anchor value per basis vector", shapes);
  if (!shapes) return r;
  const Cdga& A = *v.A();
  bool hom = true;
  std::string hw;
  for (size_t k = 0; k < v.V.dim() && hom; ++k) {
    try {
      check_homogeneous(A.space(), A.space(), v.V.deg(k), v.rho[k], "anchor");
    } catch (const std::exception&) {
      hom = false;
      hw = v.V.space.name(k);
    }
  }
  r.add("anchor has degree 0", hom, hw);
  bool der = true;
  for (size_t k = 0; k < v.V.dim(); ++k) der = der && is_derivation(A, v.rho[k], v.V.deg(k));
  r.add("anchor values are derivations", der);
  bool lin = true;
  std::string w;
  for (size_t i = 0; i < A.dim() && lin; ++i)
    for (size_t k = 0; k < v.V.dim() && lin; ++k)
      if (v.anchor(v.V.left[i].col(k)) != A.lmul(i) * v.rho[k]) {
        lin = false;
        w = A.space().name(i) + "," + v.V.space.name(k);
      }
  r.add("anchor A-linear", lin, w);
  bool chain = true;
  w.clear();
  for (size_t k = 0; k < v.V.dim() && chain; ++k)
    if (v.anchor(v.V.d.col(k)) != commutator(A.d(), 1, v.rho[k], v.V.deg(k))) {
      chain = false;
      w = v.V.space.name(k);
    }
  r.add("anchor chain map", chain, w);
  return r;
}

AnchoredModule free_anchored(CdgaPtr A, const std::vector<FreeGen>& gens, const std::vector<Mat>& dgen,
                             const std::vector<Mat>& rho_gens, std::string name) {
  AnchoredModule v;
  v.V = free_module(A, gens, dgen, name);
  v.name = std::move(name);
  if (rho_gens.size() != gens.size()) throw Rejected("anchored module: one anchor value per generator required");
  const size_t n = A->dim();
  v.rho.resize(v.V.dim());
  for (size_t l = 0; l < gens.size(); ++l)
    for (size_t i = 0; i < n; ++i) v.rho[l * n + i] = A->lmul(i) * rho_gens[l];
  return v;
}

AnchoredModule tangent_anchored(const Derivations& t) { return AnchoredModule{t.module, t.maps, "T_A"}; }

AnchoredModule with_zero_anchor(const AnchoredModule& v) {
  AnchoredModule z = v;
  for (auto& m : z.rho) m = Mat(m.rows(), m.cols());
  z.name = v.name + "0";
  return z;
}

Mat rho_star(const AnchoredModule& v, const Kaehler& om, const Dual& vstar) {
  const Cdga& A = *v.A();
  const size_t n = A.dim(), N = n * n;
  Mat amb(vstar.module.dim(), N);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Mat phi(n, v.V.dim());
      for (size_t k = 0; k < v.V.dim(); ++k) phi.set_col(k, A.rmul(j) * v.rho[k].col(i));
      amb.set_col(i * n + j, vstar.coords_of(phi));
    }
  if (!(amb * kernel(om.proj)).is_zero()) throw std::logic_error("rho^* does not descend to Omega");
  return amb * om.lift;
}

static Mat stack_inc(size_t top, size_t bottom, bool first) {
  Mat m(top + bottom, first ? top : bottom);
  if (first)
    m.set_block(0, 0, Mat::identity(top));
  else
    m.set_block(top, 0, Mat::identity(bottom));
  return m;
}

Atiyah build_sigma(const AnchoredModule& v) {
  Atiyah s;
  s.V = v;
  s.report.merge("anchored ", validate_anchored(v));
  s.report.require("build_sigma");
  CdgaPtr A = v.A();
  const size_t na = A->dim(), nv = v.V.dim(), N = na + nv;
  Bimodule& m = s.sigma;
  m.A = A;
  m.space = direct_sum(A->space(), v.V.space);
  for (size_t i = 0; i < na; ++i) {
    Mat l(N, N), r(N, N);
    l.set_block(0, 0, A->lmul(i));
    l.set_block(na, na, v.V.left[i]);
    r.set_block(0, 0, A->rmul(i));
    for (size_t k = 0; k < nv; ++k)
      for (size_t t = 0; t < na; ++t) r(t, na + k) = v.rho[k](t, i);
    r.set_block(na, na, v.V.left[i] * koszul_diag(v.V.space, A->deg(i)));
    m.left.push_back(l);
    m.right.push_back(r);
  }
  m.d = Mat(N, N);
  m.d.set_block(0, 0, A->d());
  m.d.set_block(na, na, v.V.d);
  m.tag = "Sigma_" + v.name;
  if (v.V.free) {
    FreeBasis fb{{"1"}, {0}, {stack_inc(na, nv, true) * A->one()}};
    for (size_t j = 0; j < v.V.free->gens.size(); ++j) {
      fb.names.push_back(v.V.free->names[j]);
      fb.degs.push_back(v.V.free->degs[j]);
      fb.gens.push_back(stack_inc(na, nv, false) * v.V.free->gens[j]);
    }
    m.free = fb;
  }
  s.inc_A = stack_inc(na, nv, true);
  s.proj_V = stack_inc(na, nv, false).transpose();
  s.seq = ShortExact{unit_bimodule(A), m, v.V, s.inc_A, s.proj_V};
  s.report.merge("Sigma ", validate_bimodule(m));
  s.report.merge("0 -> A -> Sigma -> V -> 0 ", validate_short_exact(s.seq, false));
  if (v.V.free && check_triangular_free(v.V).ok())
    s.report.merge("Sigma triangular-free ", check_triangular_free(m));
  return s;
}

Vec DualAtiyah::rho_star_d(size_t a) const { return rho_star * omega.universal.col(a); }

DualAtiyah build_sigma_dual(const AnchoredModule& v) {
  DualAtiyah s;
  s.V = v;
  CdgaPtr A = v.A();
  s.omega = kaehler(A);
  s.vstar = left_dual(v.V);
  s.rho_star = dga::rho_star(v, s.omega, s.vstar);
  const Bimodule& vs = s.vstar.module;
  const size_t na = A->dim(), nv = vs.dim(), N = na + nv;
  Bimodule& m = s.sigma;
  m.A = A;
  m.space = direct_sum(vs.space, A->space());
  for (size_t i = 0; i < na; ++i) {
    Mat l(N, N), r(N, N);
    l.set_block(0, 0, vs.left[i]);
    Vec rd = s.rho_star_d(i);
    for (size_t j = 0; j < na; ++j) {
      Vec top = vs.right[j] * rd;
      for (size_t t = 0; t < nv; ++t) l(t, nv + j) = top[t];
    }
    l.set_block(nv, nv, A->lmul(i));
    r.set_block(0, 0, vs.right[i]);
    r.set_block(nv, nv, A->rmul(i));
    m.left.push_back(l);
    m.right.push_back(r);
  }
  m.d = Mat(N, N);
  m.d.set_block(0, 0, vs.d);
  m.d.set_block(nv, nv, A->d());
  m.tag = "Sigma*_" + v.name;
  s.seq = ShortExact{vs, m, unit_bimodule(A), stack_inc(nv, na, true), stack_inc(nv, na, false).transpose()};
  s.report.merge("Sigma* ", validate_bimodule(m));
  s.report.merge("0 -> V* -> Sigma* -> A -> 0 ", validate_short_exact(s.seq, false));

  Atiyah sig = build_sigma(v);
  s.sigma_dual = left_dual(sig.sigma);
  const size_t ns = sig.sigma.dim();
  s.to_dual = Mat(s.sigma_dual.module.dim(), N);
  for (size_t t = 0; t < nv; ++t) {
    Mat phi(na, ns);
    phi.set_block(0, na, s.vstar.functionals[t]);
    s.to_dual.set_col(t, s.sigma_dual.coords_of(phi));
  }
  for (size_t j = 0; j < na; ++j) {
    Mat phi(na, ns);
    phi.set_block(0, 0, A->rmul(j));
    s.to_dual.set_col(nv + j, s.sigma_dual.coords_of(phi));
  }
  s.report.merge("Sigma* -> D(Sigma) ", check_morphism(m, s.sigma_dual.module, s.to_dual, 0));
  s.report.add("Sigma* -> D(Sigma) invertible", s.to_dual.rows() == N && rank(s.to_dual) == N);
  return s;
}

Chi chi_involution(const DualAtiyah& s) {
  Chi c;
  const size_t nv = s.vstar.module.dim(), na = s.V.A()->dim(), N = nv + na;
  c.chi = Mat(N, N);
  for (size_t t = 0; t < nv; ++t) c.chi(t, t) = -1;
  for (size_t j = 0; j < na; ++j) {
    Vec rd = s.rho_star_d(j);
    for (size_t t = 0; t < nv; ++t) c.chi(t, nv + j) = rd[t];
    c.chi(nv + j, nv + j) = 1;
  }
  c.opposite = opposite(s.sigma);
  Report m = check_morphism(s.sigma, c.opposite, c.chi, 0);
  for (auto& ch : m.checks()) {
    std::string name = ch.name;
    if (name == "left linear") name = "chi(a x) = a . chi(x)";
    if (name == "right linear") name = "chi(x) . a = chi(x a)";
    c.report.add(name, ch.ok, ch.detail);
  }
  c.report.add("chi o chi = id", c.chi * c.chi == Mat::identity(N));
  return c;
}

Atiyah build_diff1(const Derivations& t) { return build_sigma(tangent_anchored(t)); }

FirstJets build_first_jets(CdgaPtr A) {
  FirstJets f;
  const size_t n = A->dim(), N = n * n;
  // (a (x) b)(c (x) e) = (-1)^{|b||c|} ac (x) be
  auto prod = [&](const Vec& x, const Vec& y) {
    Vec out(N);
    for (size_t p = 0; p < N; ++p) {
      if (sgn(x[p]) == 0) continue;
      for (size_t q = 0; q < N; ++q) {
        if (sgn(y[q]) == 0) continue;
        size_t a = p / n, b = p % n, c = q / n, e = q % n;
        Q coef = x[p] * y[q] * sign_of((long long)A->deg(b) * A->deg(c));
        out = add(out, scale(kron(A->mul(a, c), A->mul(b, e)), coef));
      }
    }
    return out;
  };
  std::vector<Vec> gens, ideal;
  for (size_t i = 0; i < n; ++i) gens.push_back(sub(kron(unit_vec(n, i), A->one()), kron(A->one(), unit_vec(n, i))));
  for (auto& g : gens)
    for (size_t q = 0; q < N; ++q) ideal.push_back(prod(g, unit_vec(N, q)));
  Mat I = column_basis(Mat::from_cols(N, ideal));
  std::vector<Vec> sq;
  for (size_t p = 0; p < I.cols(); ++p)
    for (size_t q = 0; q < I.cols(); ++q) sq.push_back(prod(I.col(p), I.col(q)));
  Mat I2 = Mat::from_cols(N, sq);
  Bimodule amb;
  amb.A = A;
  amb.space = tensor(A->space(), A->space());
  for (size_t i = 0; i < n; ++i) {
    Mat l(N, N), r(N, N);
    for (size_t q = 0; q < N; ++q) {
      l.set_col(q, prod(kron(unit_vec(n, i), A->one()), unit_vec(N, q)));
      r.set_col(q, prod(unit_vec(N, q), kron(A->one(), unit_vec(n, i))));
    }
    amb.left.push_back(l);
    amb.right.push_back(r);
  }
  Mat In = Mat::identity(n);
  amb.d = Mat::kron(A->d(), In) + tensor_maps(A->space(), A->space(), In, 0, A->d(), 1);
  f.report.merge("A (x) A ", validate_bimodule(amb));
  Quot q = quotient(amb, I2.cols() ? I2 : Mat(N, 0), "A^(1)");
  f.jets = q.module;
  f.proj = q.proj;
  f.lift = q.lift;
  f.ideal = column_basis(q.proj * I);
  Mat mult_amb = A->mult();
  f.report.add("multiplication kills I^2", (mult_amb * I2).is_zero());
  f.mult = mult_amb * q.lift;
  f.report.merge("A^(1) ", validate_bimodule(f.jets));
  f.report.add("0 -> I/I^2 -> A^(1) -> A -> 0 exact",
               rank(f.mult) == n && (f.mult * f.ideal).is_zero() && f.ideal.cols() + n == f.jets.dim());

  Kaehler om = kaehler(A);
  Mat o_amb(f.jets.dim(), N);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      o_amb.set_col(i * n + j, q.proj * sub(kron(unit_vec(n, i), unit_vec(n, j)), kron(A->one(), A->mul(i, j))));
  f.report.add("da -> a(x)1 - 1(x)a descends", (o_amb * kernel(om.proj)).is_zero());
  f.omega_to_ideal = o_amb * om.lift;
  f.report.add("Omega = I/I^2", rank(f.omega_to_ideal) == om.module.dim() && om.module.dim() == f.ideal.cols() &&
                                    rank(Mat::hcat(f.omega_to_ideal, f.ideal)) == f.ideal.cols());
  f.report.merge("Omega -> A^(1) ", check_morphism(om.module, f.jets, f.omega_to_ideal, 0));

  // theta(a1 (x) a2) = (rho^*(da1) a2, a1 a2) in the dual Atiyah bimodule of (T_A, id)
  Derivations t = derivations(A);
  DualAtiyah sd = build_sigma_dual(tangent_anchored(t));
  const size_t nv = sd.vstar.module.dim();
  Mat th_amb(nv + n, N);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Vec top = sd.vstar.module.right[j] * sd.rho_star_d(i);
      Vec bot = A->mul(i, j);
      Vec col(nv + n);
      for (size_t t2 = 0; t2 < nv; ++t2) col[t2] = top[t2];
      for (size_t t2 = 0; t2 < n; ++t2) col[nv + t2] = bot[t2];
      th_amb.set_col(i * n + j, col);
    }
  f.report.add("theta kills I^2", (th_amb * I2).is_zero());
  f.theta = th_amb * q.lift;
  f.report.merge("theta ", check_morphism(f.jets, sd.sigma, f.theta, 0));
  f.report.add("theta invertible", f.theta.rows() == f.theta.cols() && rank(f.theta) == f.jets.dim());
  return f;
}

Pushout jets_pushout(const AnchoredModule& v) {
  Pushout p;
  CdgaPtr A = v.A();
  const size_t n = A->dim();
  FirstJets fj = build_first_jets(A);
  DualAtiyah sd = build_sigma_dual(v);
  const size_t nj = fj.jets.dim(), nv = sd.vstar.module.dim();
  Bimodule sum = direct_sum(fj.jets, sd.vstar.module);
  const size_t no = sd.omega.module.dim();
  Mat rel(nj + nv, no);
  for (size_t w = 0; w < no; ++w) {
    Vec a = fj.omega_to_ideal.col(w), b = sd.rho_star.col(w);
    for (size_t t = 0; t < nj; ++t) rel(t, w) = a[t];
    for (size_t t = 0; t < nv; ++t) rel(nj + t, w) = -b[t];
  }
  Quot q = quotient(sum, rel, "pushout");
  p.module = q.module;
  // A^(1) -> Sigma^*: a1 (x) a2 -> (rho^*(da1) a2, a1 a2); V^* -> Sigma^*: theta -> (theta, 0)
  Mat amb_jets(nv + n, n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Vec top = sd.vstar.module.right[j] * sd.rho_star_d(i);
      Vec bot = A->mul(i, j);
      for (size_t t = 0; t < nv; ++t) amb_jets(t, i * n + j) = top[t];
      for (size_t t = 0; t < n; ++t) amb_jets(nv + t, i * n + j) = bot[t];
    }
  Mat from_jets = amb_jets * fj.lift;
  p.report.add("A (x) A -> Sigma^* kills I^2", (amb_jets * kernel(fj.proj)).is_zero());
  Mat from_sum(nv + n, nj + nv);
  from_sum.set_block(0, 0, from_jets);
  from_sum.set_block(0, nj, stack_inc(nv, n, true));
  p.report.add("map kills the pushout relations", (from_sum * rel).is_zero());
  p.to_sigma_dual = from_sum * q.lift;
  p.report.merge("pushout -> Sigma^* ", check_morphism(p.module, sd.sigma, p.to_sigma_dual, 0));
  p.report.add("pushout -> Sigma^* invertible",
               p.to_sigma_dual.rows() == p.to_sigma_dual.cols() && rank(p.to_sigma_dual) == p.module.dim());
  return p;
}

NestedPairing nested_pairing(const Bimodule& k1, const Bimodule& k2, const Dual& d1, const Dual& d2) {
  NestedPairing np;
  np.source = tensor_A(d2.module, d1.module);
  np.target_tensor = tensor_A(k1, k2);
  np.target = left_dual(np.target_tensor.module);
  const size_t n1 = k1.dim(), n2 = k2.dim(), na = k1.A->dim();
  const size_t m1 = d1.functionals.size(), m2 = d2.functionals.size();
  Mat rel_target = kernel(np.target_tensor.proj);
  Mat big(np.target.module.dim(), m2 * m1);
  bool descends = true, linear = true;
  for (size_t t = 0; t < m2; ++t) {
    std::vector<Mat> rd(n2);
    for (size_t j = 0; j < n2; ++j) rd[j] = k1.R(d2.functionals[t].col(j));
    for (size_t u = 0; u < m1; ++u) {
      Mat phi(na, n1 * n2);
      for (size_t j = 0; j < n2; ++j) {
        Mat vals = d1.functionals[u] * rd[j];
        for (size_t i = 0; i < n1; ++i) phi.set_col(i * n2 + j, vals.col(i));
      }
      if (!(phi * rel_target).is_zero()) descends = false;
      Mat onq = phi * np.target_tensor.lift;
      if (!np.target.coords->contains(flatten(onq))) {
        linear = false;
        continue;
      }
      big.set_col(t * m1 + u, np.target.coords_of(onq));
    }
  }
  np.report.add("pairing well defined on K1 (x)_A K2", descends);
  np.report.add("pairing values A-linear", linear);
  np.report.add("pairing well defined on D(K2) (x)_A D(K1)", (big * kernel(np.source.proj)).is_zero());
  np.map = big * np.source.lift;
  Report m = check_morphism(np.source.module, np.target.module, np.map, 0);
  for (auto& c : m.checks()) np.report.add("pairing " + c.name, c.ok, c.detail);
  return np;
}

ThetaDuality theta_duality(const AnchoredModule& v, const Bimodule& m) {
  ThetaDuality out;
  Report tv = check_triangular_free(v.V), tm = check_triangular_free(m);
  if (!tv.ok()) throw Rejected("theta_duality: V is not triangular-free");
  if (!tm.ok() || !is_symmetric(m)) throw Rejected("theta_duality: M is not a triangular-free left module");
  CdgaPtr A = v.A();
  const size_t na = A->dim();
  Atiyah at = build_sigma(v);
  DualAtiyah sd = build_sigma_dual(v);
  Dual mstar = left_dual(m);
  NestedPairing np = nested_pairing(at.sigma, m, sd.sigma_dual, mstar);
  for (auto& c : np.report.checks()) out.report.add(c.name, c.ok, c.detail);
  TensorA t1 = tensor_A(mstar.module, sd.sigma);
  Mat conv = tensor_A_maps(t1, np.source, mstar.module, sd.sigma, Mat::identity(mstar.module.dim()), 0, sd.to_dual, 0);
  out.theta = np.map * conv;
  const size_t N = out.theta.rows();
  out.invertible = out.theta.cols() == N && rank(out.theta) == N;
  out.report.add("Theta invertible", out.invertible);
  out.report.merge("Theta ", check_morphism(t1.module, np.target.module, out.theta, 0));

  // literal formula: (-1)^{|phi|(|delta|+|m|)} phi(s) delta(m) + phi{rho(pi_V(s))(delta(m))}
  {
    const auto& sig = at.sigma;
    const size_t ns = sig.dim(), nm = m.dim(), nsd = sd.sigma.dim();
    bool agree = true;
    Mat big(np.target.module.dim(), mstar.module.dim() * nsd);
    for (size_t t = 0; t < mstar.module.dim(); ++t)
      for (size_t u = 0; u < nsd; ++u) {
        Mat psi = sd.sigma_dual.functional(sd.to_dual.col(u));
        int dphi = sd.sigma.deg(u), ddelta = mstar.module.deg(t);
        Mat phi(na, ns * nm);
        for (size_t i = 0; i < ns; ++i)
          for (size_t j = 0; j < nm; ++j) {
            Vec dm = mstar.functionals[t].col(j);
            Vec first = A->mul(psi.col(i), dm);
            first = scale(first, sign_of((long long)dphi * (ddelta + m.deg(j))));
            Vec vpart = at.proj_V * unit_vec(ns, i);
            Vec inner = v.anchor(vpart) * dm;
            Vec second = psi * (at.inc_A * inner);
            phi.set_col(i * nm + j, add(first, second));
          }
        Mat onq = phi * np.target_tensor.lift;
        big.set_col(t * nsd + u, np.target.coords_of(onq));
      }
    Mat lit = big * t1.lift;
    agree = lit == out.theta;
    out.report.add("Theta agrees with the displayed two-term formula", agree);
  }

  // the two-row diagram
  Dual& vstar = sd.vstar;
  TensorA tmv = tensor_A(mstar.module, vstar.module);
  Mat inc_top = tensor_A_maps(tmv, t1, mstar.module, vstar.module, Mat::identity(mstar.module.dim()), 0, sd.seq.inc, 0);
  const size_t nms = mstar.module.dim(), nsd = sd.sigma.dim(), nv = vstar.module.dim();
  Mat p_amb(nms, nms * nsd);
  for (size_t t = 0; t < nms; ++t)
    for (size_t j = 0; j < na; ++j) p_amb.set_col(t * nsd + nv + j, mstar.module.right[j] * unit_vec(nms, t));
  Mat proj_top = p_amb * t1.lift;
  NestedPairing left = nested_pairing(v.V, m, vstar, mstar);
  for (auto& c : left.report.checks()) out.report.add("left column " + c.name, c.ok, c.detail);
  const TensorA& tsm = np.target_tensor;
  const TensorA& tvm = left.target_tensor;
  Mat pi_id = tensor_A_maps(tsm, tvm, at.sigma, m, at.proj_V, 0, Mat::identity(m.dim()), 0);
  Mat inc_bot = dual_map(left.target, np.target, pi_id);
  Mat unit_m(tsm.module.dim(), m.dim());
  for (size_t j = 0; j < m.dim(); ++j) unit_m.set_col(j, tsm.of(at.inc_A * A->one(), unit_vec(m.dim(), j)));
  Mat proj_bot = dual_map(np.target, mstar, unit_m);
  auto exact = [](const Mat& i, const Mat& p, size_t a, size_t b, size_t c) {
    return rank(i) == a && rank(p) == c && (p * i).is_zero() && a + c == b;
  };
  out.report.add("top row exact", exact(inc_top, proj_top, tmv.module.dim(), t1.module.dim(), nms));
  out.report.add("bottom row exact",
                 exact(inc_bot, proj_bot, left.target.module.dim(), np.target.module.dim(), nms));
  out.report.add("left square commutes", out.theta * inc_top == inc_bot * left.map);
  out.report.add("right square commutes", proj_bot * out.theta == proj_top);
  out.report.add("left column invertible", left.map.rows() == left.map.cols() && rank(left.map) == left.map.rows());
  return out;
}

}  // namespace dga
