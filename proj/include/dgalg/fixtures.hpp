#pragma once

#include <random>

#include "dgalg/atiyah.hpp"

namespace dga {

// V = A v, |v| = 1, rho(v) = d/d eta over FIX-ETA
AnchoredModule eta_anchored();
// V = A v, |v| = 0, rho(v) = x d/dx over FIX-DUAL
AnchoredModule dual_anchored();
// V = A v, |v| = 1, zero anchor over FIX-DUAL (the square-zero side needs positive generators)
AnchoredModule dual_positive_anchored();
// cone(eta .): e0 (0), e1 (-2), d e1 = eta e0; the certified nonsplit HKR fixture
Bimodule eta_cone();
// cone(x .): e0 (0), e1 (-1), d e1 = x e0
Bimodule dual_cone();
// A^r with zero differential, generators in degree 0
Bimodule free_rank(CdgaPtr A, int r);

// Coefficients are drawn from {-3..3}; the draw only uses raw mt19937 output, so it is portable.
int draw(std::mt19937& g, int lo, int hi);
// Random triangular-free anchored module with one or two generators (positive degrees on request).
AnchoredModule random_anchored(CdgaPtr A, std::mt19937& g, bool positive);
// Random triangular-free module with one or two generators in degrees -2..1.
Bimodule random_module(CdgaPtr A, std::mt19937& g, const std::string& tag);
std::string describe(const Bimodule& m);

}  // namespace dga
