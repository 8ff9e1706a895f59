#pragma once

#include <map>
#include <string>
#include <vector>

#include "dgalg/linalg.hpp"

namespace dga {

inline int sign_of(long long e) { return (e % 2 == 0) ? 1 : -1; }

// Finite graded space; basis elements are stored in one flat list.
class GradedSpace {
 public:
  GradedSpace() = default;
  GradedSpace(std::vector<std::string> names, std::vector<int> degs);
  static GradedSpace from_components(const std::map<int, std::vector<std::string>>& comps);

  size_t dim() const { return degs_.size(); }
  int deg(size_t i) const { return degs_[i]; }
  const std::string& name(size_t i) const { return names_[i]; }
  const std::vector<int>& degs() const { return degs_; }
  const std::vector<std::string>& names() const { return names_; }
  std::map<int, std::vector<std::string>> components() const;
  std::map<int, size_t> dims() const;
  std::vector<size_t> in_degree(int n) const;
  std::optional<size_t> find(const std::string& name, int deg) const;
  std::optional<size_t> find(const std::string& name) const;

  // diag((-1)^{|x|})
  Mat parity() const;
  // degree of a homogeneous vector; nullopt for zero or inhomogeneous vectors
  std::optional<int> degree_of(const Vec& v) const;

  bool operator==(const GradedSpace& o) const { return names_ == o.names_ && degs_ == o.degs_; }

 private:
  std::vector<std::string> names_;
  std::vector<int> degs_;
};

GradedSpace direct_sum(const GradedSpace& a, const GradedSpace& b);
GradedSpace shifted(const GradedSpace& a, int k);
// basis index i*dim(b)+j, name "x|y"
GradedSpace tensor(const GradedSpace& a, const GradedSpace& b);
std::string dims_str(const std::map<int, size_t>& d);
// "2*x - 1/2*y", or "0"
std::string vec_str(const Vec& v, const GradedSpace& sp);

// Homogeneous linear map stored as one dense matrix; blocks() gives the per-degree view.
class GradedMap {
 public:
  GradedMap() = default;
  GradedMap(GradedSpace source, GradedSpace target, int degree, Mat m);
  static GradedMap zero(const GradedSpace& s, const GradedSpace& t, int degree);
  static GradedMap identity(const GradedSpace& s);

  const GradedSpace& source() const { return src_; }
  const GradedSpace& target() const { return tgt_; }
  int degree() const { return deg_; }
  const Mat& matrix() const { return m_; }
  std::map<int, Mat> blocks() const;

  GradedMap operator*(const GradedMap& o) const;  // composition this after o
  GradedMap operator+(const GradedMap& o) const;
  GradedMap operator-(const GradedMap& o) const;
  GradedMap scaled(const Q& s) const;
  bool operator==(const GradedMap& o) const;

 private:
  GradedSpace src_, tgt_;
  int deg_ = 0;
  Mat m_;
};

// Throws if a nonzero entry violates the degree.
void check_homogeneous(const GradedSpace& s, const GradedSpace& t, int degree, const Mat& m, const char* what);

class Complex {
 public:
  Complex() = default;
  Complex(GradedSpace space, Mat d);  // throws unless d has degree 1 and squares to zero
  const GradedSpace& space() const { return space_; }
  const Mat& d() const { return d_; }
  GradedMap differential() const { return GradedMap(space_, space_, 1, d_); }

 private:
  GradedSpace space_;
  Mat d_;
};

struct Cohomology {
  std::map<int, size_t> dims;
  std::map<int, Mat> representatives;  // columns in the ambient space
  std::map<int, Mat> cycles;           // basis of cocycles of that degree (ambient columns)
  // Class of a cocycle in the chosen representative basis.
  Vec class_of(int degree, const Vec& cocycle, const Mat& d) const;
  size_t total() const;
};

Cohomology cohomology(const GradedSpace& s, const Mat& d);
inline Cohomology cohomology(const Complex& c) { return cohomology(c.space(), c.d()); }

Complex shift(const Complex& c, int k);

struct Cone {
  Complex complex;
  GradedMap from_target;  // target -> cone
  GradedMap to_source;    // cone -> source[1]
};
// cone^n = target^n + source^{n+1}, d(t, s) = (dt + f s, -ds)
Cone cone(const Complex& source, const Complex& target, const Mat& f);

Complex tensor_k(const Complex& x, const Complex& y);
// Koszul sign (f (x) g)(a (x) b) = (-1)^{|g||a|} f(a) (x) g(b)
Mat tensor_maps(const GradedSpace& s1, const GradedSpace& s2, const Mat& f, int deg_f, const Mat& g, int deg_g);
Mat braiding(const GradedSpace& x, const GradedSpace& y);  // x(x)y -> y(x)x
bool is_quasi_iso(const Complex& s, const Complex& t, const Mat& f);

}  // namespace dga
