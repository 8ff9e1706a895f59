#pragma once

#include "dgalg/hkrconn.hpp"

namespace dga {

// B = A + V^*[-1] with split square-zero product and d(a, phi) = (d_A a, rho^*(da) - d_{V^*} phi).
// Basis: A first, then one shifted copy of each V^* basis vector (degree + 1).
// Shift convention: a . s(phi) = (-1)^{|a|} s(a phi).
struct SquareZero {
  AnchoredModule V;
  Dual vstar;
  CdgaPtr B;
  Mat pi;     // B -> A
  Mat iota;   // V^* -> B, degree +1 (iota(phi) = s phi)
  Mat incl;   // A -> B, a -> (a, 0); graded algebra map, not a chain map
  std::vector<Vec> rho_star_d;  // rho^*(d a_i) in V^* coordinates
  Report report;

  size_t na() const { return incl.cols(); }
  size_t nv() const { return iota.cols(); }
};
// Rejects V that is not triangular-free or has a generator in degree <= 0.
SquareZero build_sqzero(const AnchoredModule& v);

// 0 -> V^* (x)_A M [-1] -> T -> M -> 0 for a B-module T, with M = T / I T.
struct ModuleConnection {
  Bimodule M;
  Mat to_m;       // T -> M
  TensorA vstar_m;
  Mat chi;        // V^* (x)_A M -> T, degree +1
  Bimodule cone;  // T + V^* (x)_A M, twisted A-action
  ConnectionTriple connection;
  Report report;
};
ModuleConnection module_to_connection(const SquareZero& sq, const Bimodule& T);

// B-action on cone(-nabla[-1]) = V^* (x)_A M [-1] + M~ (first block shifted: degrees + 1).
struct ConnectionModule {
  Bimodule T;       // over B
  Bimodule sub;     // V^*[-1] (x) M as a B-module through pi
  Bimodule quo;     // M~ as a B-module through pi
  Mat inc, proj;
  Report report;
};
ConnectionModule connection_to_module(const SquareZero& sq, const ConnectionTriple& c);
// M as a B-module through pi
Bimodule pullback_module(const SquareZero& sq, const Bimodule& m, const std::string& tag);

// Two connections on the same M are equivalent when some left-linear chain map h: M~1 -> M~2 has
// q2 h = q1 and nabla2 h - nabla1 = delta K + K d for a left-linear K of degree -1.
struct ConnectionEquivalence {
  bool equivalent = false;
  Mat h, K;
};
ConnectionEquivalence connection_equivalence(const ConnectionTriple& c1, const ConnectionTriple& c2);
// an equivalent triple with M~ = M and q = id, when one exists
std::optional<ConnectionTriple> strict_connection(const ConnectionTriple& c);
// module_to_connection(connection_to_module(c)), pushed back to M, compared with c; triples with q not
// invertible are first replaced by a strict equivalent (otherwise T is not flat)
ConnectionEquivalence round_trip(const SquareZero& sq, const ConnectionTriple& c);
// (M~, g q, (1 (x) g) nabla) for g: M -> target, a triple on target
ConnectionTriple push_connection(const ConnectionTriple& c, const Mat& g, const Bimodule& target);

// A^dagger = cone(iota) = B + V^*, product (b, phi)(b', phi') = (b b', pi(b) phi' + phi pi(b')).
struct ADagger {
  CdgaPtr Ad;
  Mat to_a;        // A^dagger -> A, (b, phi) -> pi(b)
  Mat sigma;       // A -> A^dagger, a -> (a, -rho^*(da))
  std::vector<Mat> theta;  // per V basis: (b, phi) -> -phi(v), degree |v|
  bool literal_reading_ok = false;  // second term phi pi(b) as displayed
  Report report;
};
ADagger build_a_dagger(const SquareZero& sq);

struct Window {
  int lo = 0, hi = 0;
};

// Normalized two-sided bar complex A (x) Bbar^{(x)n} (x) A, Bbar = B / k, weights n <= N.
struct BarComplex {
  int order = 0;
  GradedSpace space;
  Mat d;
  std::vector<size_t> weight;   // bar weight per basis vector
  std::vector<size_t> iweight;  // number of factors in the ideal
  std::vector<std::vector<size_t>> words;  // per basis: a0, b1..bn (Bbar indices), a'
};
struct BarTor {
  BarComplex bar;
  Cohomology h;
  Window certified;                 // degrees where truncation is exact on both sides
  std::map<int, size_t> jet_dims;   // H(J^[N])
  Mat comparison;                   // bar -> J^[N]
  bool comparison_iso = false;
  bool multiplicative = false;
  std::map<int, std::map<size_t, size_t>> iweight_dims;  // when the anchor vanishes: degree -> w -> dim
  Report report;
};
BarTor bar_tor(const SquareZero& sq, int order, Window window);

// Hom_k(Bbar^{(x)n} (x) A, A), weights n <= N, with the composition product.
struct BarExt {
  int order = 0;
  GradedSpace space;
  Mat d;
  std::vector<size_t> weight, iweight;
  Cohomology h;
  Window certified;
  std::map<int, size_t> envelope_dims;  // H(F^N)
  Mat comparison;  // F^N -> Hom complex
  bool comparison_iso = false;
  bool multiplicative = false;
  bool unit_to_unit = false;
  std::map<int, std::map<size_t, size_t>> iweight_dims;
  Report report;
};
BarExt bar_ext(const SquareZero& sq, int order, Window window);

}  // namespace dga
