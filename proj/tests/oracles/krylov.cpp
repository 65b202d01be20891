/* Copyright 2026 The XCT Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"

namespace xct::oracle {

namespace {

std::vector<double> MatVec(const std::vector<double>& dense, std::size_t rows, std::size_t cols,
                           const std::vector<double>& x) {
  std::vector<double> y(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) y[r] += dense[r * cols + c] * x[c];
  }
  return y;
}

std::vector<double> MatTVec(const std::vector<double>& dense, std::size_t rows, std::size_t cols,
                            const std::vector<double>& y) {
  std::vector<double> x(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) x[c] += dense[r * cols + c] * y[r];
  }
  return x;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<double> KrylovLeastSquares(const CsrMatrix& a, const std::vector<double>& y, int k) {
  const std::size_t rows = a.num_rows;
  const std::size_t cols = a.num_cols;
  const std::vector<double> dense = ToDense(a);
  // Orthonormal Krylov basis, modified Gram-Schmidt applied twice.
  std::vector<std::vector<double>> basis;
  std::vector<double> next = MatTVec(dense, rows, cols, y);
  for (int j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = Dot(next, q);
        for (std::size_t i = 0; i < cols; ++i) next[i] -= c * q[i];
      }
    }
    const double norm = std::sqrt(Dot(next, next));
    if (norm == 0.0) break;
    for (double& v : next) v /= norm;
    basis.push_back(next);
    next = MatTVec(dense, rows, cols, MatVec(dense, rows, cols, basis.back()));
  }
  // Solve min ||y - A V c|| through the normal equations of A V.
  const std::size_t m = basis.size();
  std::vector<std::vector<double>> av;
  for (const auto& q : basis) av.push_back(MatVec(dense, rows, cols, q));
  std::vector<double> g(m * m);
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    rhs[i] = Dot(av[i], y);
    for (std::size_t j = 0; j < m; ++j) g[i * m + j] = Dot(av[i], av[j]);
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::abs(g[r * m + c]) > std::abs(g[piv * m + c])) piv = r;
    }
    if (g[piv * m + c] == 0.0) throw std::runtime_error("singular Krylov system");
    for (std::size_t j = 0; j < m; ++j) std::swap(g[c * m + j], g[piv * m + j]);
    std::swap(rhs[c], rhs[piv]);
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = g[r * m + c] / g[c * m + c];
      for (std::size_t j = c; j < m; ++j) g[r * m + j] -= f * g[c * m + j];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> coef(m);
  for (std::size_t i = m; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t j = i + 1; j < m; ++j) s -= g[i * m + j] * coef[j];
    coef[i] = s / g[i * m + i];
  }
  std::vector<double> x(cols, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < cols; ++i) x[i] += coef[j] * basis[j][i];
  }
  return x;
}

}  // namespace xct::oracle
