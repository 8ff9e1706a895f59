#pragma once

#include <memory>
#include <string>

#include "dgalg/grvec.hpp"
#include "dgalg/report.hpp"

namespace dga {

// Graded-commutative dg-algebra given by structure constants on a basis.
class Cdga {
 public:
  // mult has shape dim x dim^2; column i*dim+j holds the coordinates of a_i a_j
  Cdga(std::string name, GradedSpace space, Mat mult, size_t unit, Mat d);

  const std::string& name() const { return name_; }
  const GradedSpace& space() const { return space_; }
  size_t dim() const { return space_.dim(); }
  int deg(size_t i) const { return space_.deg(i); }
  const Mat& mult() const { return mult_; }
  size_t unit() const { return unit_; }
  Vec one() const { return unit_vec(dim(), unit_); }
  const Mat& d() const { return d_; }

  Vec mul(const Vec& a, const Vec& b) const;
  Vec mul(size_t i, size_t j) const { return mult_.col(i * dim() + j); }
  const Mat& lmul(size_t i) const { return lmul_[i]; }  // b -> a_i b
  const Mat& rmul(size_t i) const { return rmul_[i]; }  // b -> b a_i
  Mat lmul(const Vec& a) const;
  Mat rmul(const Vec& a) const;
  Complex complex() const { return Complex(space_, d_); }

 private:
  std::string name_;
  GradedSpace space_;
  Mat mult_;
  size_t unit_ = 0;
  Mat d_;
  std::vector<Mat> lmul_, rmul_;
};

using CdgaPtr = std::shared_ptr<const Cdga>;

// Associativity, graded commutativity, unit, Leibniz, d^2 = 0, nonpositive cohomology.
Report validate_cdga(const Cdga& a);

CdgaPtr fix_k();
CdgaPtr fix_dual();  // Q[x]/(x^2), |x| = 0
CdgaPtr fix_eta();   // Q[eta], |eta| = -1

// A derivation-shaped map D: A -> A of degree p satisfies the graded Leibniz rule
bool is_derivation(const Cdga& a, const Mat& D, int p);

}  // namespace dga
