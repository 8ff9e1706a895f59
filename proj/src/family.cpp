#include "dgalg/family.hpp"

namespace dga {

Mat Family::combine(const Vec& x) const {
  Mat m(rows, cols);
  for (size_t k = 0; k < basis.size(); ++k)
    if (sgn(x[k]) != 0) m += basis[k].scaled(x[k]);
  return m;
}

Vec flatten(const Mat& m) {
  Vec v;
  v.reserve(m.rows() * m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  return v;
}

Vec concat(const std::vector<Vec>& parts) {
  Vec v;
  for (auto& p : parts) v.insert(v.end(), p.begin(), p.end());
  return v;
}

Family homogeneous_family(const GradedSpace& src, const GradedSpace& tgt, int degree) {
  Family f{tgt.dim(), src.dim(), {}};
  for (size_t i = 0; i < tgt.dim(); ++i)
    for (size_t j = 0; j < src.dim(); ++j)
      if (tgt.deg(i) == src.deg(j) + degree) {
        Mat e(tgt.dim(), src.dim());
        e(i, j) = 1;
        f.basis.push_back(std::move(e));
      }
  return f;
}

static Mat system_matrix(const Family& f, const LinearOp& op, size_t* out_rows) {
  std::vector<Vec> cols;
  for (auto& b : f.basis) cols.push_back(op(b));
  size_t r = cols.empty() ? (out_rows ? *out_rows : 0) : cols[0].size();
  if (out_rows) *out_rows = r;
  return Mat::from_cols(r, cols);
}

Family restrict_family(const Family& f, const LinearOp& op) {
  if (f.basis.empty()) return f;
  size_t r = 0;
  Mat sys = system_matrix(f, op, &r);
  Mat ker = kernel(sys);
  Family out{f.rows, f.cols, {}};
  for (size_t j = 0; j < ker.cols(); ++j) out.basis.push_back(f.combine(ker.col(j)));
  return out;
}

FamilySolve solve_family(const Family& f, const LinearOp& op, const Vec& rhs) {
  FamilySolve out;
  size_t r = rhs.size();
  out.system = f.basis.empty() ? Mat(r, 0) : system_matrix(f, op, &r);
  out.rhs = rhs;
  auto x = solve(out.system, rhs);
  if (x) {
    out.coeffs = *x;
    out.solution = f.combine(*x);
  } else {
    out.certificate = farkas_certificate(out.system, rhs);
  }
  return out;
}

}  // namespace dga
