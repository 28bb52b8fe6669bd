// Small dense reference computations used as independent oracles. They work
// from the raw edge list and measures only and never call the solvers under
// test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dlab/space.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix zeros(std::size_t n) { return Matrix(n, std::vector<double>(n, 0.0)); }

// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) throw std::runtime_error("singular");
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Killed generator H = M^-1 (Deg - C) + V on the listed vertices, built
// straight from the edge list. Degrees include edges leaving the domain.
inline Matrix generator(const dlab::GraphSpace& g, const std::vector<dlab::Vertex>& dom,
                        const std::vector<double>& V = {}) {
  const std::size_t n = dom.size();
  std::vector<long> local(g.size(), -1);
  for (std::size_t i = 0; i < n; ++i) local[dom[i]] = static_cast<long>(i);
  Matrix h = zeros(n);
  for (const auto& e : g.edges()) {
    const long a = local[e.i], b = local[e.j];
    if (a >= 0) h[a][a] += e.conductance / g.measure(e.i);
    if (b >= 0) h[b][b] += e.conductance / g.measure(e.j);
    if (a >= 0 && b >= 0) {
      h[a][b] -= e.conductance / g.measure(e.i);
      h[b][a] -= e.conductance / g.measure(e.j);
    }
  }
  if (!V.empty()) {
    for (std::size_t i = 0; i < n; ++i) h[i][i] += V[dom[i]];
  }
  return h;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

// exp(-t H) by scaling and squaring of a Taylor series.
inline Matrix expm_neg(const Matrix& h, double t) {
  const std::size_t n = h.size();
  double norm = 0.0;
  for (const auto& row : h) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    norm = std::max(norm, s);
  }
  int squarings = 0;
  double scale = t * norm;
  while (scale > 0.25) {
    scale /= 2;
    ++squarings;
  }
  const double tau = t / std::pow(2.0, squarings);
  Matrix a = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = -tau * h[i][j];
  }
  Matrix result = zeros(n), term = zeros(n);
  for (std::size_t i = 0; i < n; ++i) result[i][i] = term[i][i] = 1.0;
  for (int k = 1; k <= 30; ++k) {
    term = multiply(term, a);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) term[i][j] /= k;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
    }
  }
  for (int s = 0; s < squarings; ++s) result = multiply(result, result);
  return result;
}

// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Symmetrised generator M^1/2 H M^-1/2 for Jacobi.
inline Matrix symmetrise(const dlab::GraphSpace& g, const std::vector<dlab::Vertex>& dom, const Matrix& h) {
  Matrix s = h;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    for (std::size_t j = 0; j < dom.size(); ++j) {
      s[i][j] = h[i][j] * std::sqrt(g.measure(dom[i]) / g.measure(dom[j]));
    }
  }
  return s;
}

}  // namespace oracle
