#pragma once

#include "dgalg/envelope.hpp"

namespace dga {

// 0 -> M -> Sigma_V (x)_A M -> V (x)_A M -> 0 as left modules, and its extension class.
struct HkrClass {
  Atiyah sigma;
  TensorA sigma_m, v_m;
  ShortExact seq;
  ExtWitness ext;  // ext.cocycle: V (x)_A M -> M of degree 1
  bool split = false;
  Report report;
  Mat chain_section() const;  // V (x) M -> Sigma (x) M, only when split
};
HkrClass hkr_class(const AnchoredModule& v, const Bimodule& m);

// Triple (M~, q, nabla). nabla: M~ -> V^* (x)_A M of degree 0; action(m, v) = nabla_v(m~) = <v, nabla(m~)> with
// <v, phi (x) m> = phi(v) m. action column v * dim(M~) + m.
struct ConnectionTriple {
  AnchoredModule V;
  Bimodule M, Mt;
  Mat q;
  Dual vstar;
  TensorA vstar_m;
  Mat nabla;
  Mat action;
  Report report;
};
// nabla_v(a m) = (-1)^{|v||a|} a nabla_v(m) + rho(v)(a) q(m); returns the validated triple
ConnectionTriple connection_from_action(const AnchoredModule& v, const Bimodule& mt, const Bimodule& m, const Mat& q,
                                        const Mat& action);
ConnectionTriple connection_from_nabla(const AnchoredModule& v, const Bimodule& mt, const Bimodule& m, const Mat& q,
                                       const Mat& nabla);
Report validate_connection(const ConnectionTriple& c);
// free M: nabla_v(a e) = rho(v)(a) e on generators e (not necessarily a chain map)
ConnectionTriple canonical_connection(const AnchoredModule& v, const Bimodule& m);
// (a, v) (x) m~ -> a q(m~) + nabla_v(m~), as a map Sigma (x)_A M~ -> M
Mat pigeonnier_map(const ConnectionTriple& c, const Atiyah& s, const TensorA& sigma_mt);

ConnectionTriple connection_from_splitting(const AnchoredModule& v, const Bimodule& m, const HkrClass& w);

struct HkrSplitting {
  Mat mu;       // Sigma (x)_A M~ -> M
  Mat section;  // V (x)_A M -> Sigma (x)_A M, chain, when M~ = M up to an invertible q
  ExtWitness ext;
  Report report;
};
HkrSplitting splitting_from_connection(const ConnectionTriple& c);

// Dual connection on M^*, (nabla*_v phi)(m) = (-1)^{|v||m|} (rho(v)(phi(m)) - phi(nabla_v m)). Needs q invertible.
struct DualConnection {
  Dual dual;
  ConnectionTriple connection;
  Report report;
};
DualConnection dual_connection(const ConnectionTriple& c);

// M^* with free metadata (dual generators in reverse order, so the differential stays triangular)
Dual free_dual(const Bimodule& m);

// 0 -> V^* (x)_A M -> Sigma^* (x)_A M -> M -> 0 as left modules; a section is a derived connection
struct ConnectionSequence {
  DualAtiyah sigma_dual;
  TensorA vstar_m, sigma_m;
  ShortExact seq;
  ExtWitness ext;
  bool split = false;
};
ConnectionSequence connection_sequence(const AnchoredModule& v, const Bimodule& m);

struct BaerCheck {
  Mat tau;
  Bimodule T;
  bool additive = false;
  Report report;
};
BaerCheck baer_additivity_check(const AnchoredModule& v, const Bimodule& m1, const Bimodule& m2);

struct FormalitySplit {
  bool theta_m_zero = false;
  bool theta_vm_zero = false;
  int first_nonsplit = 0;  // least n <= N with F^{n-1} M_V -> F^n M_V -> Gr^n nonsplit; 0 if none
  std::vector<Mat> sections;  // V^{(x)n} (x) M -> Sigma^[n] (x) M, n = 0..N, when both classes vanish
  std::vector<TensorA> filtered;  // Sigma^[n] (x)_A M
  std::vector<TensorA> graded;    // V^{(x)n} (x)_A M
  Report report;
};
FormalitySplit formality_split(const AnchoredModule& v, const Bimodule& m, int order);

}  // namespace dga
