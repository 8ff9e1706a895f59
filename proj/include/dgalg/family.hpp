#pragma once

#include <functional>
#include <optional>

#include "dgalg/grvec.hpp"

namespace dga {

// Linear family of matrices {sum x_k basis[k]}; used to solve for unknown maps.
struct Family {
  size_t rows = 0, cols = 0;
  std::vector<Mat> basis;
  size_t size() const { return basis.size(); }
  Mat combine(const Vec& x) const;
};

using LinearOp = std::function<Vec(const Mat&)>;

Vec flatten(const Mat& m);
Vec concat(const std::vector<Vec>& parts);

// All matrices of the given degree between two graded spaces.
Family homogeneous_family(const GradedSpace& src, const GradedSpace& tgt, int degree);
// Sub-family where op vanishes.
Family restrict_family(const Family& f, const LinearOp& op);

struct FamilySolve {
  std::optional<Mat> solution;
  Vec coeffs;
  std::optional<Vec> certificate;  // y with y*system = 0, y*rhs != 0
  Mat system;
  Vec rhs;
};
// Some member M with op(M) = rhs.
FamilySolve solve_family(const Family& f, const LinearOp& op, const Vec& rhs);

}  // namespace dga
