#pragma once

#include <random>

#include "dgalg/fixtures.hpp"

namespace testing {

using namespace dga;

inline Mat random_mat(size_t r, size_t c, std::mt19937& g) {
  Mat m(r, c);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) m(i, j) = draw(g, -3, 3);
  return m;
}

inline Vec random_vec(size_t n, std::mt19937& g) {
  Vec v(n);
  for (auto& x : v) x = draw(g, -3, 3);
  return v;
}

// random map of degree p between graded spaces, zero off the allowed blocks
inline Mat random_graded(const GradedSpace& s, const GradedSpace& t, int p, std::mt19937& g) {
  Mat m(t.dim(), s.dim());
  for (size_t i = 0; i < t.dim(); ++i)
    for (size_t j = 0; j < s.dim(); ++j)
      if (t.deg(i) == s.deg(j) + p) m(i, j) = draw(g, -3, 3);
  return m;
}

}  // namespace testing
