#pragma once

#include <functional>
#include <map>

#include "dgalg/atiyah.hpp"

namespace dga {

// Lie algebroid: left module L, k-bilinear bracket on the k-basis (dim x dim^2), anchor per basis vector.
struct LieAlgebroid {
  Bimodule L;
  Mat bracket;
  std::vector<Mat> anchor;
};
Report validate_algebroid(const LieAlgebroid& l);
LieAlgebroid tangent_algebroid(const Derivations& t);
LieAlgebroid abelian_algebroid(const AnchoredModule& v);

// Unital A-algebra R (as a bimodule) with anchor sigma: R -> End_k(A).
// product may be partial (truncated algebras) and then returns nullopt.
struct AnchoredAlgebra {
  CdgaPtr A;
  Bimodule R;
  Vec unit;
  std::vector<Mat> sigma;
  std::function<std::optional<Vec>(const Vec&, const Vec&)> product;
  std::string name;
  Mat anchor(const Vec& r) const;
};
AnchoredAlgebra cdga_as_anchored_algebra(CdgaPtr A);  // sigma = left multiplication
AnchoredAlgebra endomorphism_algebra(CdgaPtr A);      // End_k(A), sigma = id; r <-> flatten(matrix)
Mat end_matrix(const AnchoredAlgebra& end, const Vec& r);
Vec end_element(const Mat& m);

struct Primitives {
  Mat basis;  // columns in R
  std::optional<LieAlgebroid> algebroid;  // when all brackets are defined
  Report report;
};
// r a - (-1)^{|a||r|} a r = sigma(r)(a)
Primitives primitives(const AnchoredAlgebra& r);

struct TruncatedEnvelope {
  AnchoredModule V;
  Atiyah sigma;
  int order = 0;
  std::vector<Bimodule> powers;  // Sigma^{(x)_A n}
  std::vector<TensorA> steps;    // steps[n]: powers[n-1] (x)_A Sigma -> powers[n], n >= 2
  std::vector<Bimodule> F;       // Sigma^[n]
  std::vector<Mat> proj, lift;   // powers[n] <-> F[n]
  std::vector<Mat> incl;         // F[n-1] -> F[n]
  std::vector<Mat> words;        // word basis -> F[n]
  std::vector<std::vector<std::pair<size_t, std::vector<size_t>>>> word_labels;  // (a index, generator word)
  std::vector<Bimodule> vpowers;  // V^{(x)_A n}
  std::vector<Mat> gr_map;        // F[n] -> vpowers[n]
  std::vector<Mat> gr_iso;        // Gr^n -> vpowers[n]
  std::vector<Mat> sigma_anchor;  // per basis of F[order], End_k(A)
  Report report;

  Mat to_top(int p) const;  // F[p] -> F[order]
  int level(const Vec& x) const;  // least p with x in the image of F[p]
  std::optional<Vec> preimage(const Vec& x, int p) const;
  // product in F[order] of x in F[p] and y in F[q], p + q <= order
  Vec product(const Vec& x, int p, const Vec& y, int q) const;
  std::optional<Vec> product(const Vec& x, const Vec& y) const;
  Vec word(size_t a, const std::vector<size_t>& gens) const;  // a g1 ... gk in F[order]
  Vec normal_form(const Vec& x) const;  // coordinates in the word basis of F[order]
  Mat anchor(const Vec& x) const;
  Vec powers_of(const std::vector<Vec>& factors) const;  // s1 (x) ... (x) sn in powers[n]
};

TruncatedEnvelope coequalizer_tower(const AnchoredModule& v, int order);
AnchoredAlgebra envelope_algebra(const TruncatedEnvelope& u);
// v a - (-1)^{|a||v|} a v = rho(v)(a) in F^1
Report enveloping_relation_check(const TruncatedEnvelope& u);

struct Extension {
  Mat map;  // F[order] -> R
  Report report;
};
// phi: V -> R (R.dim x V.dim), A-linear and anchor compatible
Extension extend_to_envelope(const TruncatedEnvelope& u, const AnchoredAlgebra& r, const Mat& phi);

struct Coproduct {
  TensorA target;        // F (x)_A F, both factors as left modules
  Mat delta;             // F -> target
  std::vector<Vec> lifts;  // per basis of F, Delta in F (x)_k F
  Vec counit_functional;   // not used directly; see counit
  Report report;
};
Vec counit(const TruncatedEnvelope& u, const Vec& x);  // sigma(x)(1)
Coproduct coproduct(const TruncatedEnvelope& u);

struct TruncatedJet {
  int order = 0;
  Dual jets;            // D(F[order])
  Mat product;          // dim x dim^2
  Vec unit;
  std::vector<Dual> levels;  // D(F[n])
  std::vector<Mat> restrict_to;  // D(F[n]) -> D(F[n-1])
  // (Sigma^*)^{(x)_A n} and its equalizer
  std::vector<Mat> equalizer;        // columns in sigma_dual_powers[n]
  std::vector<Bimodule> dual_powers;
  std::vector<TensorA> dual_steps;  // dual_powers[n-1] (x)_A Sigma^* -> dual_powers[n], n >= 2
  std::vector<Mat> equalizer_to_dual;  // equalizer -> D(F[n])
  Report report;
};
TruncatedJet jet_tower(const TruncatedEnvelope& u, const Coproduct& c);

struct QisoInvariance {
  bool hypothesis = false;
  bool conclusion = false;
  std::string note;
  Report report;
};
// f: V1 -> V2 anchored map
QisoInvariance qiso_invariance_test(const AnchoredModule& v1, const AnchoredModule& v2, const Mat& f, int order);
// induced filtered map F[n](V1) -> F[n](V2)
Mat envelope_map(const TruncatedEnvelope& u1, const TruncatedEnvelope& u2, const Mat& f, int n);

}  // namespace dga
