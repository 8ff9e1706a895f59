#pragma once

#include <stdexcept>

#include "dgalg/fixtures.hpp"
#include "dgalg/hkrconn.hpp"

namespace oracles {

using namespace dga;

// V = A v with d_V = 0, M free with generators e_l. Unknowns: nabla_v(e_l) in M of degree |e_l| + |v|.
// nabla_v(a e_l) = (-1)^{|v||a|} a nabla_v(e_l) + rho(v)(a) e_l; a connection with q = id exists iff
// d nabla_v = (-1)^{|v|} nabla_v d has a solution. For free triangular M strict connections suffice.
inline bool connection_exists(const AnchoredModule& v, const Bimodule& m) {
  if (!v.V.free || v.V.free->gens.size() != 1 || !v.V.d.is_zero())
    throw std::invalid_argument("oracle needs V = A v with zero differential");
  if (!m.free) throw std::invalid_argument("oracle needs a free module");
  const auto& A = *m.A;
  const size_t na = A.dim(), nm = m.dim(), ng = m.free->gens.size();
  const int dv = v.V.free->degs[0];
  Mat D = v.anchor(v.V.free->gens[0]);
  // fixed part: rho(v)(a) e_l
  Mat n0(nm, nm);
  for (size_t l = 0; l < ng; ++l)
    for (size_t i = 0; i < na; ++i)
      for (size_t j = 0; j < na; ++j) n0(l * na + j, l * na + i) = D(j, i);
  // one matrix per unknown
  std::vector<Mat> nu;
  for (size_t l = 0; l < ng; ++l)
    for (size_t t = 0; t < nm; ++t) {
      if (m.deg(t) != m.free->degs[l] + dv) continue;
      Mat n(nm, nm);
      for (size_t i = 0; i < na; ++i)
        n.set_col(l * na + i, scale(m.left[i] * unit_vec(nm, t), sign_of((long long)dv * A.deg(i))));
      nu.push_back(n);
    }
  const Q s = sign_of(dv);
  auto chain = [&](const Mat& n) { return flatten(m.d * n - (n * m.d).scaled(s)); };
  Mat sys(nm * nm, nu.size());
  for (size_t u = 0; u < nu.size(); ++u) sys.set_col(u, chain(nu[u]));
  Vec rhs = scale(chain(n0), -1);
  if (nu.empty()) return is_zero(rhs);
  return solve(sys, rhs).has_value();
}

// dimension in degree i, zero when absent
inline size_t dim_at(const std::map<int, size_t>& d, int i) {
  auto it = d.find(i);
  return it == d.end() ? 0 : it->second;
}

}  // namespace oracles
