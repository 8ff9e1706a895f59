#include "dgalg/linalg.hpp"

#include <sstream>
#include <stdexcept>

namespace dga {

Mat Mat::identity(size_t n) {
  Mat m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Mat Mat::from_cols(size_t rows, const std::vector<Vec>& cols) {
  Mat m(rows, cols.size());
  for (size_t j = 0; j < cols.size(); ++j) m.set_col(j, cols[j]);
  return m;
}

Mat Mat::column(const Vec& v) { return from_cols(v.size(), {v}); }

Vec Mat::col(size_t j) const {
  Vec v(r_);
  for (size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Mat::set_col(size_t j, const Vec& v) {
  if (v.size() != r_) throw std::invalid_argument("set_col: size mismatch");
  for (size_t i = 0; i < r_; ++i) (*this)(i, j) = v[i];
}

Vec Mat::row(size_t i) const { return Vec(a_.begin() + i * c_, a_.begin() + (i + 1) * c_); }

Mat Mat::operator*(const Mat& o) const {
  if (c_ != o.r_) throw std::invalid_argument("matrix product: shape mismatch");
  Mat m(r_, o.c_);
  for (size_t i = 0; i < r_; ++i)
    for (size_t k = 0; k < c_; ++k) {
      const Q& x = (*this)(i, k);
      if (sgn(x) == 0) continue;
      for (size_t j = 0; j < o.c_; ++j) {
        const Q& y = o(k, j);
        if (sgn(y) != 0) m(i, j) += x * y;
      }
    }
  return m;
}

Vec Mat::operator*(const Vec& v) const {
  if (c_ != v.size()) throw std::invalid_argument("matrix-vector: shape mismatch");
  Vec out(r_);
  for (size_t k = 0; k < c_; ++k) {
    if (sgn(v[k]) == 0) continue;
    for (size_t i = 0; i < r_; ++i) {
      const Q& x = (*this)(i, k);
      if (sgn(x) != 0) out[i] += x * v[k];
    }
  }
  return out;
}

Mat Mat::operator+(const Mat& o) const {
  Mat m = *this;
  m += o;
  return m;
}
Mat Mat::operator-(const Mat& o) const {
  Mat m = *this;
  m -= o;
  return m;
}
Mat Mat::operator-() const { return scaled(-1); }

Mat Mat::scaled(const Q& s) const {
  Mat m = *this;
  for (auto& x : m.a_)
    if (sgn(x) != 0) x *= s;
  return m;
}

Mat& Mat::operator+=(const Mat& o) {
  if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("matrix sum: shape mismatch");
  for (size_t i = 0; i < a_.size(); ++i)
    if (sgn(o.a_[i]) != 0) a_[i] += o.a_[i];
  return *this;
}
Mat& Mat::operator-=(const Mat& o) {
  if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("matrix difference: shape mismatch");
  for (size_t i = 0; i < a_.size(); ++i)
    if (sgn(o.a_[i]) != 0) a_[i] -= o.a_[i];
  return *this;
}

bool Mat::operator==(const Mat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }

Mat Mat::transpose() const {
  Mat m(c_, r_);
  for (size_t i = 0; i < r_; ++i)
    for (size_t j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

bool Mat::is_zero() const {
  for (auto& x : a_)
    if (sgn(x) != 0) return false;
  return true;
}

Mat Mat::block(size_t r0, size_t c0, size_t nr, size_t nc) const {
  Mat m(nr, nc);
  for (size_t i = 0; i < nr; ++i)
    for (size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
  return m;
}

void Mat::set_block(size_t r0, size_t c0, const Mat& b) {
  for (size_t i = 0; i < b.r_; ++i)
    for (size_t j = 0; j < b.c_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Mat Mat::select_rows(const std::vector<size_t>& idx) const {
  Mat m(idx.size(), c_);
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < c_; ++j) m(i, j) = (*this)(idx[i], j);
  return m;
}

Mat Mat::select_cols(const std::vector<size_t>& idx) const {
  Mat m(r_, idx.size());
  for (size_t i = 0; i < r_; ++i)
    for (size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(i, idx[j]);
  return m;
}

Mat Mat::hcat(const Mat& a, const Mat& b) {
  if (a.r_ != b.r_) throw std::invalid_argument("hcat: row mismatch");
  Mat m(a.r_, a.c_ + b.c_);
  m.set_block(0, 0, a);
  m.set_block(0, a.c_, b);
  return m;
}

Mat Mat::vcat(const Mat& a, const Mat& b) {
  if (a.c_ != b.c_) throw std::invalid_argument("vcat: column mismatch");
  Mat m(a.r_ + b.r_, a.c_);
  m.set_block(0, 0, a);
  m.set_block(a.r_, 0, b);
  return m;
}

Mat Mat::kron(const Mat& a, const Mat& b) {
  Mat m(a.r_ * b.r_, a.c_ * b.c_);
  for (size_t i = 0; i < a.r_; ++i)
    for (size_t j = 0; j < a.c_; ++j) {
      if (sgn(a(i, j)) == 0) continue;
      for (size_t k = 0; k < b.r_; ++k)
        for (size_t l = 0; l < b.c_; ++l)
          if (sgn(b(k, l)) != 0) m(i * b.r_ + k, j * b.c_ + l) = a(i, j) * b(k, l);
    }
  return m;
}

std::string Mat::str() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < r_; ++i) {
    os << (i ? "; " : "");
    for (size_t j = 0; j < c_; ++j) os << (j ? " " : "") << qstr((*this)(i, j));
  }
  os << "]";
  return os.str();
}

bool is_zero(const Vec& v) {
  for (auto& x : v)
    if (sgn(x) != 0) return false;
  return true;
}

Vec add(const Vec& a, const Vec& b) {
  Vec c = a;
  for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  return c;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec c = a;
  for (size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
  return c;
}

Vec scale(const Vec& a, const Q& s) {
  Vec c = a;
  for (auto& x : c) x *= s;
  return c;
}

Vec unit_vec(size_t n, size_t i) {
  Vec v(n);
  v[i] = 1;
  return v;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec v(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      if (sgn(b[j]) != 0) v[i * b.size() + j] = a[i] * b[j];
  }
  return v;
}

Rref rref(Mat m) {
  Rref out;
  const size_t R = m.rows(), C = m.cols();
  size_t row = 0;
  std::vector<size_t> nz;
  for (size_t c = 0; c < C && row < R; ++c) {
    size_t p = row;
    while (p < R && sgn(m(p, c)) == 0) ++p;
    if (p == R) continue;
    if (p != row)
      for (size_t j = c; j < C; ++j) std::swap(m(p, j), m(row, j));
    Q inv = 1 / m(row, c);
    nz.clear();
    for (size_t j = c; j < C; ++j)
      if (sgn(m(row, j)) != 0) {
        m(row, j) *= inv;
        nz.push_back(j);
      }
    for (size_t i = 0; i < R; ++i) {
      if (i == row || sgn(m(i, c)) == 0) continue;
      Q f = m(i, c);
      for (size_t j : nz) m(i, j) -= f * m(row, j);
    }
    out.pivots.push_back(c);
    ++row;
  }
  out.r = std::move(m);
  return out;
}

size_t rank(const Mat& m) { return rref(m).pivots.size(); }

Mat kernel(const Mat& m) {
  Rref rr = rref(m);
  const size_t C = m.cols();
  std::vector<bool> is_pivot(C, false);
  for (size_t c : rr.pivots) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (size_t f = 0; f < C; ++f) {
    if (is_pivot[f]) continue;
    Vec v(C);
    v[f] = 1;
    for (size_t i = 0; i < rr.pivots.size(); ++i) v[rr.pivots[i]] = -rr.r(i, f);
    basis.push_back(std::move(v));
  }
  return Mat::from_cols(C, basis);
}

Mat column_basis(const Mat& m) { return m.select_cols(rref(m).pivots); }

std::optional<Mat> solve(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve: row mismatch");
  Rref rr = rref(Mat::hcat(a, b));
  const size_t C = a.cols();
  for (size_t c : rr.pivots)
    if (c >= C) return std::nullopt;
  Mat x(C, b.cols());
  for (size_t i = 0; i < rr.pivots.size(); ++i)
    for (size_t j = 0; j < b.cols(); ++j) x(rr.pivots[i], j) = rr.r(i, C + j);
  return x;
}

std::optional<Vec> solve(const Mat& a, const Vec& b) {
  auto x = solve(a, Mat::column(b));
  if (!x) return std::nullopt;
  return x->col(0);
}

std::optional<Mat> inverse(const Mat& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  if (rank(m) != m.rows()) return std::nullopt;
  return solve(m, Mat::identity(m.rows()));
}

std::optional<Vec> farkas_certificate(const Mat& a, const Vec& b) {
  // y spans the left null space of [a | b] restricted so that y a = 0; pick one with y b != 0
  Mat left_null = kernel(a.transpose());
  for (size_t j = 0; j < left_null.cols(); ++j) {
    Vec y = left_null.col(j);
    Q s = 0;
    for (size_t i = 0; i < b.size(); ++i) s += y[i] * b[i];
    if (sgn(s) != 0) return y;
  }
  return std::nullopt;
}

Coords::Coords(Mat basis) : basis_(std::move(basis)) {
  // choose rows where the basis restricts to an invertible square block
  Rref rr = rref(basis_.transpose());
  if (rr.pivots.size() != basis_.cols()) throw std::invalid_argument("Coords: basis is not independent");
  rows_ = rr.pivots;
  auto inv = inverse(basis_.select_rows(rows_));
  inv_ = *inv;
}

bool Coords::contains(const Vec& v) const {
  Vec c = inv_ * Vec([&] {
            Vec r(rows_.size());
            for (size_t i = 0; i < rows_.size(); ++i) r[i] = v[rows_[i]];
            return r;
          }());
  return basis_ * c == v;
}

Vec Coords::operator()(const Vec& v) const {
  if (v.size() != basis_.rows()) throw std::invalid_argument("Coords: ambient size mismatch");
  Vec r(rows_.size());
  for (size_t i = 0; i < rows_.size(); ++i) r[i] = v[rows_[i]];
  Vec c = inv_ * r;
  if (basis_ * c != v) throw std::runtime_error("Coords: vector not in span");
  return c;
}

Mat Coords::of(const Mat& m) const {
  Mat out(dim(), m.cols());
  for (size_t j = 0; j < m.cols(); ++j) out.set_col(j, (*this)(m.col(j)));
  return out;
}

QuotientSpace quotient_space(size_t n, const Mat& relations) {
  QuotientSpace q;
  Rref rr = rref(relations.transpose());
  std::vector<bool> is_pivot(n, false);
  for (size_t c : rr.pivots) is_pivot[c] = true;
  std::vector<size_t> pos(n, 0);
  for (size_t j = 0; j < n; ++j)
    if (!is_pivot[j]) {
      pos[j] = q.keep.size();
      q.keep.push_back(j);
    }
  q.proj = Mat(q.keep.size(), n);
  q.lift = Mat(n, q.keep.size());
  for (size_t t = 0; t < q.keep.size(); ++t) {
    q.proj(t, q.keep[t]) = 1;
    q.lift(q.keep[t], t) = 1;
  }
  for (size_t p = 0; p < rr.pivots.size(); ++p)
    for (size_t t = 0; t < q.keep.size(); ++t) q.proj(t, rr.pivots[p]) = -rr.r(p, q.keep[t]);
  return q;
}

void SparseSystem::add(std::map<size_t, Q> row, const Q& rhs_in) {
  Q rhs = rhs_in;
  for (auto it = row.begin(); it != row.end();) {
    if (sgn(it->second) == 0) {
      it = row.erase(it);
      continue;
    }
    auto p = pivots_.find(it->first);
    if (p == pivots_.end()) {
      ++it;
      continue;
    }
    Q c = it->second;
    const size_t var = it->first;
    for (const auto& [k, v] : p->second.first) row[k] -= c * v;
    rhs -= c * p->second.second;
    it = row.upper_bound(var);
    if (auto z = row.find(var); z != row.end() && sgn(z->second) == 0) row.erase(z);
  }
  for (auto it = row.begin(); it != row.end();) it = sgn(it->second) == 0 ? row.erase(it) : std::next(it);
  if (row.empty()) {
    if (sgn(rhs) != 0) consistent_ = false;
    return;
  }
  Q lead = row.begin()->second;
  for (auto& [k, v] : row) v /= lead;
  rhs /= lead;
  const size_t var = row.begin()->first;
  pivots_.emplace(var, std::make_pair(std::move(row), rhs));
}

std::optional<Vec> SparseSystem::solution() const {
  return solution([](size_t) { return Q(0); });
}

std::optional<Vec> SparseSystem::solution(const std::function<Q(size_t)>& free_value) const {
  if (!consistent_) return std::nullopt;
  Vec x(n_);
  for (size_t k = 0; k < n_; ++k)
    if (!pivots_.count(k)) x[k] = free_value(k);
  for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
    Q v = it->second.second;
    for (const auto& [k, c] : it->second.first)
      if (k != it->first) v -= c * x[k];
    x[it->first] = v;
  }
  return x;
}

std::string qstr(const Q& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Q parse_q(const std::string& s) {
  Q q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

}  // namespace dga
