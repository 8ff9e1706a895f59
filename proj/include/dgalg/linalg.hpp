#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dga {

using Q = mpq_class;
using Vec = std::vector<Q>;

// Dense rational matrix. Row-major storage; a matrix acts on coordinate columns.
class Mat {
 public:
  Mat() = default;
  Mat(size_t r, size_t c) : r_(r), c_(c), a_(r * c) {}

  static Mat identity(size_t n);
  static Mat from_cols(size_t rows, const std::vector<Vec>& cols);
  static Mat column(const Vec& v);

  size_t rows() const { return r_; }
  size_t cols() const { return c_; }

  Q& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
  const Q& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

  Vec col(size_t j) const;
  void set_col(size_t j, const Vec& v);
  Vec row(size_t i) const;

  Mat operator*(const Mat& o) const;
  Vec operator*(const Vec& v) const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat operator-() const;
  Mat scaled(const Q& s) const;
  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  bool operator==(const Mat& o) const;
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat transpose() const;
  bool is_zero() const;
  Mat block(size_t r0, size_t c0, size_t nr, size_t nc) const;
  void set_block(size_t r0, size_t c0, const Mat& b);
  Mat select_rows(const std::vector<size_t>& idx) const;
  Mat select_cols(const std::vector<size_t>& idx) const;

  static Mat hcat(const Mat& a, const Mat& b);
  static Mat vcat(const Mat& a, const Mat& b);
  static Mat kron(const Mat& a, const Mat& b);

  std::string str() const;

 private:
  size_t r_ = 0, c_ = 0;
  std::vector<Q> a_;
};

bool is_zero(const Vec& v);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, const Q& s);
Vec unit_vec(size_t n, size_t i);
Vec kron(const Vec& a, const Vec& b);

struct Rref {
  Mat r;                       // reduced row echelon form
  std::vector<size_t> pivots;  // pivot column of each nonzero row
};

// Gauss-Jordan with the first nonzero entry as pivot.
Rref rref(Mat m);
size_t rank(const Mat& m);
// Columns form a basis of the null space {x : m x = 0}.
Mat kernel(const Mat& m);
// Independent columns spanning the column space (a subset of the given columns).
Mat column_basis(const Mat& m);
// Some solution X of a X = b, if any.
std::optional<Mat> solve(const Mat& a, const Mat& b);
std::optional<Vec> solve(const Mat& a, const Vec& b);
std::optional<Mat> inverse(const Mat& m);

// For an infeasible system a x = b: a row vector y with y a = 0 and y b != 0.
std::optional<Vec> farkas_certificate(const Mat& a, const Vec& b);

// Coordinates with respect to a fixed basis of a subspace (columns of `basis`).
class Coords {
 public:
  Coords() = default;
  explicit Coords(Mat basis);
  size_t dim() const { return basis_.cols(); }
  size_t ambient() const { return basis_.rows(); }
  const Mat& basis() const { return basis_; }
  bool contains(const Vec& v) const;
  // Throws if v is not in the span.
  Vec operator()(const Vec& v) const;
  Mat of(const Mat& m) const;  // column by column

 private:
  Mat basis_;
  std::vector<size_t> rows_;
  Mat inv_;
};

// Quotient of Q^n by the span of the relation columns. The quotient basis is the set of
// non-pivot coordinates of the reduced relation rows; lift is the inclusion of those coordinates.
struct QuotientSpace {
  std::vector<size_t> keep;
  Mat proj;
  Mat lift;
};
QuotientSpace quotient_space(size_t n, const Mat& relations);

// Sparse linear system: each row maps variable index -> coefficient.
class SparseSystem {
 public:
  explicit SparseSystem(size_t nvars) : n_(nvars) {}
  size_t vars() const { return n_; }
  void add(std::map<size_t, Q> row, const Q& rhs);
  bool consistent() const { return consistent_; }
  // some solution with free variables set to zero
  std::optional<Vec> solution() const;  // free variables set to zero
  std::optional<Vec> solution(const std::function<Q(size_t)>& free_value) const;

 private:
  size_t n_;
  bool consistent_ = true;
  std::map<size_t, std::pair<std::map<size_t, Q>, Q>> pivots_;  // pivot var -> (row, rhs), pivot coefficient 1
};

std::string qstr(const Q& q);
Q parse_q(const std::string& s);

}  // namespace dga
