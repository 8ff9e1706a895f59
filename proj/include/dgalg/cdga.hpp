#pragma once

#include "dgalg/bimod.hpp"

namespace dga {

// Graded derivations of A, one matrix per basis element, with bracket and differential [d, -].
struct Derivations {
  CdgaPtr A;
  GradedSpace space;
  std::vector<Mat> maps;
  Mat flat;
  std::shared_ptr<Coords> coords;
  Mat bracket;    // dim x dim^2, column i*dim+j = [D_i, D_j]
  Bimodule module;  // (a D)(b) = a D(b), symmetric right action, d D = [d_A, D]

  size_t dim() const { return maps.size(); }
  Vec coords_of(const Mat& D) const { return (*coords)(flatten(D)); }
  Mat map(const Vec& x) const;
};

Derivations derivations(CdgaPtr A);
// bracket closure, Jacobi, differential compatibility, module axioms
Report validate_derivations(const Derivations& t);
// [D, E] = DE - (-1)^{|D||E|} ED
Mat commutator(const Mat& D, int dd, const Mat& E, int de);

// Kaehler differentials: quotient of the symbols da_i . a_j (index i*dim+j) by the right submodule
// generated by d(a a') - da.a' - (-1)^{|a||a'|} da'.a.
struct Kaehler {
  Bimodule module;
  Mat proj;       // ambient symbols -> module
  Mat lift;       // module -> ambient symbols
  Mat universal;  // A -> module, a -> da
  Vec symbol(size_t i, size_t j) const;  // da_i . a_j in module coordinates
};

Kaehler kaehler(CdgaPtr A);
// d(1) = 0 and d(a a') = da.a' + a.da'
Report validate_kaehler(const Kaehler& k);

struct PairingResult {
  bool iso = false;         // T -> D(Omega), D -> (w -> (-1)^{|D||w|} <D, w>)
  bool reverse_iso = false; // Omega -> D(T), w -> (D -> <D, w>)
  Mat tangent_to_dual;
  Mat kaehler_to_dual;
  Report report;
};
// <D, da.b> = D(a) b
PairingResult pairing_check(const Derivations& t, const Kaehler& o);

}  // namespace dga
