#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

namespace finsler {

/// Row-major n x m matrix of doubles; tensors here are tiny (n <= 4).
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(size_t(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return a[size_t(i) * cols + j]; }
  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

/// (1,2)-tensor T^i_{jk} over one dimension n.
struct Tensor3 {
  int n = 0;
  std::vector<double> a;

  Tensor3() = default;
  explicit Tensor3(int dim) : n(dim), a(size_t(dim) * dim * dim, 0.0) {}
  double& operator()(int i, int j, int k) {
    return a[(size_t(i) * n + j) * n + k];
  }
  double operator()(int i, int j, int k) const {
    return a[(size_t(i) * n + j) * n + k];
  }
};

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs(const Matrix& m) { return max_abs(m.a); }
inline double max_abs(const Tensor3& t) { return max_abs(t.a); }

}  // namespace finsler
