#include "dgalg/grvec.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace dga {

GradedSpace::GradedSpace(std::vector<std::string> names, std::vector<int> degs)
    : names_(std::move(names)), degs_(std::move(degs)) {
  if (names_.size() != degs_.size()) throw std::invalid_argument("GradedSpace: names/degrees size mismatch");
  std::set<std::pair<int, std::string>> seen;
  for (size_t i = 0; i < names_.size(); ++i)
    if (!seen.insert({degs_[i], names_[i]}).second)
      throw std::invalid_argument("GradedSpace: duplicate basis name '" + names_[i] + "' in degree " +
                                  std::to_string(degs_[i]));
}

GradedSpace GradedSpace::from_components(const std::map<int, std::vector<std::string>>& comps) {
  std::vector<std::string> n;
  std::vector<int> d;
  for (auto& [deg, names] : comps)
    for (auto& s : names) {
      n.push_back(s);
      d.push_back(deg);
    }
  return GradedSpace(n, d);
}

std::map<int, std::vector<std::string>> GradedSpace::components() const {
  std::map<int, std::vector<std::string>> c;
  for (size_t i = 0; i < dim(); ++i) c[degs_[i]].push_back(names_[i]);
  return c;
}

std::map<int, size_t> GradedSpace::dims() const {
  std::map<int, size_t> c;
  for (int d : degs_) c[d]++;
  return c;
}

std::vector<size_t> GradedSpace::in_degree(int n) const {
  std::vector<size_t> idx;
  for (size_t i = 0; i < dim(); ++i)
    if (degs_[i] == n) idx.push_back(i);
  return idx;
}

std::optional<size_t> GradedSpace::find(const std::string& name, int deg) const {
  for (size_t i = 0; i < dim(); ++i)
    if (names_[i] == name && degs_[i] == deg) return i;
  return std::nullopt;
}

std::optional<size_t> GradedSpace::find(const std::string& name) const {
  for (size_t i = 0; i < dim(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

Mat GradedSpace::parity() const {
  Mat m(dim(), dim());
  for (size_t i = 0; i < dim(); ++i) m(i, i) = sign_of(degs_[i]);
  return m;
}

std::optional<int> GradedSpace::degree_of(const Vec& v) const {
  std::optional<int> d;
  for (size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) == 0) continue;
    if (d && *d != degs_[i]) return std::nullopt;
    d = degs_[i];
  }
  return d;
}

GradedSpace direct_sum(const GradedSpace& a, const GradedSpace& b) {
  auto n = a.names();
  auto d = a.degs();
  for (size_t i = 0; i < b.dim(); ++i) {
    std::string nm = b.name(i);
    while (a.find(nm, b.deg(i))) nm += "'";
    n.push_back(nm);
    d.push_back(b.deg(i));
  }
  return GradedSpace(n, d);
}

GradedSpace shifted(const GradedSpace& a, int k) {
  auto d = a.degs();
  for (auto& x : d) x -= k;
  return GradedSpace(a.names(), d);
}

GradedSpace tensor(const GradedSpace& a, const GradedSpace& b) {
  std::vector<std::string> n;
  std::vector<int> d;
  for (size_t i = 0; i < a.dim(); ++i)
    for (size_t j = 0; j < b.dim(); ++j) {
      n.push_back(a.name(i) + "|" + b.name(j));
      d.push_back(a.deg(i) + b.deg(j));
    }
  return GradedSpace(n, d);
}

std::string dims_str(const std::map<int, size_t>& d) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (auto& [k, v] : d) {
    if (v == 0) continue;
    os << (first ? "" : ", ") << k << ":" << v;
    first = false;
  }
  os << "}";
  return os.str();
}

void check_homogeneous(const GradedSpace& s, const GradedSpace& t, int degree, const Mat& m, const char* what) {
  if (m.rows() != t.dim() || m.cols() != s.dim())
    throw std::invalid_argument(std::string(what) + ": matrix shape does not match spaces");
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j)
      if (sgn(m(i, j)) != 0 && t.deg(i) != s.deg(j) + degree)
        throw std::invalid_argument(std::string(what) + ": entry (" + t.name(i) + ", " + s.name(j) +
                                    ") breaks degree " + std::to_string(degree));
}

GradedMap::GradedMap(GradedSpace source, GradedSpace target, int degree, Mat m)
    : src_(std::move(source)), tgt_(std::move(target)), deg_(degree), m_(std::move(m)) {
  check_homogeneous(src_, tgt_, deg_, m_, "GradedMap");
}

GradedMap GradedMap::zero(const GradedSpace& s, const GradedSpace& t, int degree) {
  return GradedMap(s, t, degree, Mat(t.dim(), s.dim()));
}

GradedMap GradedMap::identity(const GradedSpace& s) { return GradedMap(s, s, 0, Mat::identity(s.dim())); }

std::map<int, Mat> GradedMap::blocks() const {
  std::map<int, Mat> out;
  for (auto& [n, cnt] : src_.dims()) {
    auto cols = src_.in_degree(n);
    auto rows = tgt_.in_degree(n + deg_);
    if (rows.empty() || cnt == 0) continue;
    out[n] = m_.select_rows(rows).select_cols(cols);
  }
  return out;
}

GradedMap GradedMap::operator*(const GradedMap& o) const {
  if (!(o.tgt_ == src_)) throw std::invalid_argument("GradedMap composition: space mismatch");
  return GradedMap(o.src_, tgt_, deg_ + o.deg_, m_ * o.m_);
}

GradedMap GradedMap::operator+(const GradedMap& o) const {
  if (!(src_ == o.src_ && tgt_ == o.tgt_ && deg_ == o.deg_)) throw std::invalid_argument("GradedMap sum: mismatch");
  return GradedMap(src_, tgt_, deg_, m_ + o.m_);
}

GradedMap GradedMap::operator-(const GradedMap& o) const { return *this + o.scaled(-1); }

GradedMap GradedMap::scaled(const Q& s) const { return GradedMap(src_, tgt_, deg_, m_.scaled(s)); }

bool GradedMap::operator==(const GradedMap& o) const {
  return src_ == o.src_ && tgt_ == o.tgt_ && deg_ == o.deg_ && m_ == o.m_;
}

Complex::Complex(GradedSpace space, Mat d) : space_(std::move(space)), d_(std::move(d)) {
  check_homogeneous(space_, space_, 1, d_, "differential");
  if (!(d_ * d_).is_zero()) throw std::invalid_argument("differential does not square to zero");
}

size_t Cohomology::total() const {
  size_t t = 0;
  for (auto& [k, v] : dims) t += v;
  return t;
}

Cohomology cohomology(const GradedSpace& s, const Mat& d) {
  Cohomology h;
  std::set<int> degs(s.degs().begin(), s.degs().end());
  for (int n : degs) {
    auto idx = s.in_degree(n);
    auto prev = s.in_degree(n - 1);
    Mat z_local = kernel(d.select_cols(idx));
    Mat z(s.dim(), z_local.cols());
    for (size_t j = 0; j < z_local.cols(); ++j)
      for (size_t i = 0; i < idx.size(); ++i) z(idx[i], j) = z_local(i, j);
    Mat b = column_basis(d.select_cols(prev));
    Rref rr = rref(Mat::hcat(b, z));
    std::vector<size_t> rep_cols;
    for (size_t p : rr.pivots)
      if (p >= b.cols()) rep_cols.push_back(p - b.cols());
    h.dims[n] = rep_cols.size();
    h.representatives[n] = z.select_cols(rep_cols);
    h.cycles[n] = z;
  }
  return h;
}

Vec Cohomology::class_of(int degree, const Vec& cocycle, const Mat& d) const {
  auto it = representatives.find(degree);
  if (it == representatives.end()) return {};
  // boundaries of that degree come from columns of degree-1 elements; d itself contains them
  Mat reps = it->second;
  Mat all = Mat::hcat(reps, d);
  auto x = solve(all, cocycle);
  if (!x) throw std::runtime_error("class_of: vector is not a cocycle modulo boundaries");
  return Vec(x->begin(), x->begin() + reps.cols());
}

Complex shift(const Complex& c, int k) {
  return Complex(shifted(c.space(), k), c.d().scaled(sign_of(k)));
}

Cone cone(const Complex& source, const Complex& target, const Mat& f) {
  check_homogeneous(source.space(), target.space(), 0, f, "cone map");
  if (target.d() * f != f * source.d()) throw std::invalid_argument("cone: map does not commute with differentials");
  const size_t nt = target.space().dim(), ns = source.space().dim();
  GradedSpace sp = direct_sum(target.space(), shifted(source.space(), 1));
  Mat d(nt + ns, nt + ns);
  d.set_block(0, 0, target.d());
  d.set_block(0, nt, f);
  d.set_block(nt, nt, -source.d());
  Complex cc(sp, d);
  Mat inc(nt + ns, nt);
  inc.set_block(0, 0, Mat::identity(nt));
  Mat pr(ns, nt + ns);
  pr.set_block(0, nt, Mat::identity(ns));
  return Cone{cc, GradedMap(target.space(), sp, 0, inc), GradedMap(sp, shifted(source.space(), 1), 0, pr)};
}

Mat tensor_maps(const GradedSpace& s1, const GradedSpace& s2, const Mat& f, int, const Mat& g, int deg_g) {
  Mat m = Mat::kron(f, g);
  if (deg_g % 2 != 0) {
    const size_t n2 = s2.dim();
    for (size_t i = 0; i < s1.dim(); ++i) {
      if (s1.deg(i) % 2 == 0) continue;
      for (size_t j = 0; j < n2; ++j)
        for (size_t r = 0; r < m.rows(); ++r)
          if (sgn(m(r, i * n2 + j)) != 0) m(r, i * n2 + j) = -m(r, i * n2 + j);
    }
  }
  return m;
}

Complex tensor_k(const Complex& x, const Complex& y) {
  const auto& sx = x.space();
  const auto& sy = y.space();
  Mat d = tensor_maps(sx, sy, x.d(), 1, Mat::identity(sy.dim()), 0) +
          tensor_maps(sx, sy, Mat::identity(sx.dim()), 0, y.d(), 1);
  return Complex(tensor(sx, sy), d);
}

Mat braiding(const GradedSpace& x, const GradedSpace& y) {
  const size_t nx = x.dim(), ny = y.dim();
  Mat m(nx * ny, nx * ny);
  for (size_t i = 0; i < nx; ++i)
    for (size_t j = 0; j < ny; ++j) m(j * nx + i, i * ny + j) = sign_of((long long)x.deg(i) * y.deg(j));
  return m;
}

bool is_quasi_iso(const Complex& s, const Complex& t, const Mat& f) {
  return cohomology(cone(s, t, f).complex).total() == 0;
}

std::string vec_str(const Vec& v, const GradedSpace& sp) {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) == 0) continue;
    Q c = v[i];
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << "-";
    if (sgn(c) < 0) c = -c;
    if (c != 1) os << qstr(c) << "*";
    os << sp.name(i);
    first = false;
  }
  return first ? "0" : os.str();
}

}  // namespace dga
