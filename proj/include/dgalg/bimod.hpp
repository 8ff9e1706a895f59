#pragma once

#include <optional>

#include "dgalg/algebra.hpp"
#include "dgalg/family.hpp"

namespace dga {

// Generators of a free graded left module, given as vectors in module coordinates.
struct FreeBasis {
  std::vector<std::string> names;
  std::vector<int> degs;
  std::vector<Vec> gens;
};

// dg A-bimodule: one left and one right action matrix per basis element of A.
class Bimodule {
 public:
  CdgaPtr A;
  GradedSpace space;
  std::vector<Mat> left, right;
  Mat d;
  std::optional<FreeBasis> free;
  std::string tag;  // how the module was built

  size_t dim() const { return space.dim(); }
  int deg(size_t i) const { return space.deg(i); }
  Mat L(const Vec& a) const;
  Mat R(const Vec& a) const;
  Complex complex() const { return Complex(space, d); }
};

// diag((-1)^{p |k|})
Mat koszul_diag(const GradedSpace& s, int p);

Report validate_bimodule(const Bimodule& k);
bool is_symmetric(const Bimodule& k);

Bimodule unit_bimodule(CdgaPtr A);
// right action from the left one: k a = (-1)^{|a||k|} a k
Bimodule symmetric_bimodule(CdgaPtr A, GradedSpace space, std::vector<Mat> left, Mat d, std::string tag);

struct FreeGen {
  std::string name;
  int deg = 0;
};
// Free left module on gens; dgen[l] is dimA x ngens with d(e_l) = sum_{i,m} dgen[l](i,m) a_i e_m.
// Basis a_i e_l sits at index l*dimA + i.
Bimodule free_module(CdgaPtr A, const std::vector<FreeGen>& gens, const std::vector<Mat>& dgen, std::string tag);

// Columns a_i g_j (index j*dimA + i) of a module with free metadata.
Mat free_basis_matrix(const Bimodule& k);
// Free with a strictly triangular differential in generator order.
Report check_triangular_free(const Bimodule& k);

// f: K -> K2 of degree p: f(a k) = (-1)^{p|a|} a f(k), f(k a) = f(k) a, optionally d f = (-1)^p f d.
Report check_morphism(const Bimodule& k, const Bimodule& k2, const Mat& f, int p, bool left_only = false,
                      bool chain = true);
Family bimodule_maps(const Bimodule& k, const Bimodule& k2, int p, bool left_only);
// Left-linear maps of degree p out of a free module, parametrized by generator values.
Family left_linear_maps(const Bimodule& k, const Bimodule& k2, int p);
Bimodule direct_sum(const Bimodule& a, const Bimodule& b);

struct Quot {
  Bimodule module;
  Mat proj, lift;
};
// relations: columns spanning a sub-bimodule (checked)
Quot quotient(const Bimodule& k, const Mat& relations, std::string tag);
struct Sub {
  Bimodule module;
  Mat inc;
};
Sub submodule(const Bimodule& k, const Mat& span, std::string tag);

struct TensorA {
  Bimodule module;
  Mat proj, lift;  // from / into K1 (x)_k K2
  size_t n1 = 0, n2 = 0;
  Vec of(const Vec& x, const Vec& y) const { return proj * kron(x, y); }
};
// (k1 a) (x) k2 = k1 (x) (a k2); left action on K1, right action on K2
TensorA tensor_A(const Bimodule& k1, const Bimodule& k2);
// induced f (x) g with the Koszul sign (-1)^{|g||x|}
Mat tensor_A_maps(const TensorA& src, const TensorA& tgt, const Bimodule& s1, const Bimodule& s2, const Mat& f,
                  int deg_f, const Mat& g, int deg_g);

// Left dual: functionals with phi(a k) = a phi(k), stored as dimA x dimK matrices.
struct Dual {
  Bimodule module;
  std::vector<Mat> functionals;
  Mat flat;  // columns = flattened functionals
  Vec coords_of(const Mat& phi) const;
  Mat functional(const Vec& x) const;
  std::shared_ptr<Coords> coords;
};
// (a*phi)(k) = phi(k a), (phi*a)(k) = phi(k) a, (d phi)(k) = (-1)^{|k|} (d_A phi(k) - phi(dk))
Dual left_dual(const Bimodule& k);
// D(f)(phi) = phi o f for f: K1 -> K2 of degree 0
Mat dual_map(const Dual& d2, const Dual& d1, const Mat& f);
// m -> (phi -> (-1)^{|m||phi|} phi(m))
Mat reflexivity_map(const Bimodule& k, const Dual& dk, const Dual& ddk);

// a.k = (-1)^{|a||k|} k a, k.a = (-1)^{|a||k|} a k
Bimodule opposite(const Bimodule& k);
// Least n with every composite of n+1 maps delta_a(k) = a k - (-1)^{|a||k|} k a vanishing.
std::optional<int> nilpotency_index(const Bimodule& k, int n_max);

struct Invertibility {
  bool found = false;
  bool certain = true;
  Mat witness;
  std::string note;
};
Invertibility search_invertible(const Family& f, unsigned seed = 1);

struct ShortExact {
  Bimodule sub, mid, quo;
  Mat inc, proj;
};
Report validate_short_exact(const ShortExact& s, bool as_left_modules);

struct ExtWitness {
  Mat splitting;  // quo -> mid, degree 0
  Mat cocycle;    // quo -> sub, degree 1: inc c = d s - s d
  bool split = false;
  Mat cobound;  // h with c = h d - d h; s + inc h is a chain splitting
  std::optional<Vec> certificate;
  Mat system;
  Vec rhs;
  Report report;
};
ExtWitness ext_class(const ShortExact& s, bool as_left_modules);
ExtWitness ext_class_with_splitting(const ShortExact& s, bool as_left_modules, const Mat& splitting);
// Some degreewise splitting (left-linear on the free quotient, or bimodule-linear).
Mat degreewise_splitting(const ShortExact& s, bool as_left_modules);
// Degree-1 map c: quo -> sub; is it h d - d h for an admissible degree-0 h?
FamilySolve cobound(const ShortExact& s, bool as_left_modules, const Mat& c);

}  // namespace dga
