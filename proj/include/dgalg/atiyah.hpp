#pragma once

#include "dgalg/cdga.hpp"

namespace dga {

// Left dg-module V with an A-linear chain map rho: V -> T_A (one derivation matrix per basis vector).
struct AnchoredModule {
  Bimodule V;
  std::vector<Mat> rho;
  std::string name;

  CdgaPtr A() const { return V.A; }
  Mat anchor(const Vec& v) const;
};

Report validate_anchored(const AnchoredModule& v);
// free V with anchor prescribed on generators: rho(a e) = a rho(e)
AnchoredModule free_anchored(CdgaPtr A, const std::vector<FreeGen>& gens, const std::vector<Mat>& dgen,
                             const std::vector<Mat>& rho_gens, std::string name);
AnchoredModule tangent_anchored(const Derivations& t);
AnchoredModule with_zero_anchor(const AnchoredModule& v);

// rho^*: Omega -> V^*, rho^*(da.b)(v) = rho(v)(a) b
Mat rho_star(const AnchoredModule& v, const Kaehler& om, const Dual& vstar);

struct Atiyah {
  AnchoredModule V;
  Bimodule sigma;  // A + V
  Mat inc_A;       // A -> Sigma
  Mat proj_V;      // Sigma -> V
  ShortExact seq;  // 0 -> A -> Sigma -> V -> 0
  Report report;
};
// left naive, (a, v) a' = (a a' + rho(v)(a'), (-1)^{|a'||v|} a' v)
Atiyah build_sigma(const AnchoredModule& v);

struct DualAtiyah {
  AnchoredModule V;
  Kaehler omega;
  Dual vstar;
  Mat rho_star;     // Omega -> V^*
  Bimodule sigma;   // V^* + A
  ShortExact seq;   // 0 -> V^* -> Sigma^* -> A -> 0
  Dual sigma_dual;  // D(Sigma_V)
  Mat to_dual;      // Sigma^* -> D(Sigma_V), (theta, a) -> [(b, v) -> b a + theta(v)]
  Report report;
  Vec rho_star_d(size_t a) const;  // rho^*(d a_i) in V^* coordinates
};
// right naive, a'(theta, a) = (a' theta + rho^*(da') a, a' a)
DualAtiyah build_sigma_dual(const AnchoredModule& v);

struct Chi {
  Mat chi;  // Sigma^* -> (Sigma^*)^op
  Bimodule opposite;
  Report report;
};
// chi(theta, a) = (rho^*(da) - theta, a)
Chi chi_involution(const DualAtiyah& s);

Atiyah build_diff1(const Derivations& t);

struct FirstJets {
  Bimodule jets;     // (A (x) A) / I^2
  Mat proj;          // A (x) A -> jets
  Mat lift;
  Mat ideal;         // I / I^2 inside jets (columns)
  Mat mult;          // jets -> A
  Mat omega_to_ideal;  // Omega -> jets, da.b -> a (x) b - 1 (x) ab
  Mat theta;         // jets -> Sigma^*_{T_A}
  Report report;
};
FirstJets build_first_jets(CdgaPtr A);

struct Pushout {
  Bimodule module;  // (A^(1) + V^*) / {(iota w, -rho^* w)}
  Mat to_sigma_dual;
  Report report;
};
Pushout jets_pushout(const AnchoredModule& v);

// Pairing D(K2) (x)_A D(K1) -> D(K1 (x)_A K2), (delta (x) phi)(k1 (x) k2) = phi(k1 . delta(k2)).
struct NestedPairing {
  TensorA source;  // D(K2) (x)_A D(K1)
  TensorA target_tensor;  // K1 (x)_A K2
  Dual target;      // D(K1 (x)_A K2)
  Mat map;
  Report report;  // descent on both tensors, left linearity, right linearity
};
NestedPairing nested_pairing(const Bimodule& k1, const Bimodule& k2, const Dual& d1, const Dual& d2);

struct ThetaDuality {
  Mat theta;       // M^* (x)_A Sigma^* -> D(Sigma (x)_A M)
  bool invertible = false;
  Report report;
};
ThetaDuality theta_duality(const AnchoredModule& v, const Bimodule& m);

}  // namespace dga
