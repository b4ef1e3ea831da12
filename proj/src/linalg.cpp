#include "multiscale/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multiscale {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix product: shape mismatch");
  Mat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

Mat operator-(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument("matrix difference: shape mismatch");
  Mat r(x.rows, x.cols);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

Mat transpose(const Mat& x) {
  Mat r(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) r(j, i) = x(i, j);
  return r;
}

double trace(const Mat& x) {
  if (x.rows != x.cols) throw std::invalid_argument("trace: matrix not square");
  double t = 0.0;
  for (int i = 0; i < x.rows; ++i) t += x(i, i);
  return t;
}

std::vector<double> left_multiply(const std::vector<double>& x, const Mat& a) {
  if (static_cast<int>(x.size()) != a.rows)
    throw std::invalid_argument("left multiply: shape mismatch");
  std::vector<double> r(a.cols, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    double v = x[i];
    if (v == 0.0) continue;
    for (int j = 0; j < a.cols; ++j) r[j] += v * a(i, j);
  }
  return r;
}

std::vector<double> right_multiply(const Mat& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.cols)
    throw std::invalid_argument("right multiply: shape mismatch");
  std::vector<double> r(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

namespace {

void check_nonnegative_square(const Mat& a, const char* who) {
  if (a.rows != a.cols || a.rows == 0)
    throw std::invalid_argument(std::string(who) + ": matrix not square");
  for (double v : a.a)
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(who) + ": negative entry");
}

double max_row_sum(const Mat& a) {
  double mx = 0.0;
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) s += a(i, j);
    mx = std::max(mx, s);
  }
  return mx;
}

// One power-iteration attempt on A + shift*I with Collatz-Wielandt bounds.
// Returns true on convergence, writing the (unshifted) radius into out.
bool power_iterate(const Mat& a, double shift, int max_iter, double* out) {
  const int n = a.rows;
  std::vector<double> x(n, 1.0), y(n, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = shift * x[i];
      for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int i = 0; i < n; ++i) {
      if (x[i] <= 0.0) continue;  // cannot happen with shift > 0, but be safe
      double r = y[i] / x[i];
      if (first) {
        lo = hi = r;
        first = false;
      } else {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    if (!first && hi - lo <= 1e-13 * std::max(1.0, hi)) {
      *out = 0.5 * (lo + hi) - shift;
      return true;
    }
    double norm = 0.0;
    for (double v : y) norm += v;
    if (norm <= 0.0) {  // zero matrix: radius is 0 + shift
      *out = 0.0;
      return true;
    }
    for (int i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return false;
}

}  // namespace

double spectral_radius(const Mat& a) {
  check_nonnegative_square(a, "spectral_radius");
  double rho = 0.0;
  if (power_iterate(a, 1e-9, 20000, &rho)) return std::max(rho, 0.0);
  // Stalled: near-periodic spectrum. A shift at the scale of the matrix
  // separates |rho + c| from |-rho + c| and converges geometrically.
  double big = 0.5 * max_row_sum(a) + 1e-9;
  if (power_iterate(a, big, 200000, &rho)) return std::max(rho, 0.0);
  throw std::runtime_error(
      "spectral_radius: power iteration did not converge (reducible or degenerate matrix?)");
}

namespace {

std::vector<double> pf_vector(const Mat& a, const char* who) {
  // Power iteration for the eigenvector at the Perron root, assumed to be 1.
  // Shift escalation mirrors spectral_radius.
  const int n = a.rows;
  for (double shift : {1e-9, 0.5 * max_row_sum(a) + 1e-9}) {
    std::vector<double> x(n, 1.0 / n), y(n, 0.0);
    int max_iter = shift < 1e-6 ? 20000 : 200000;
    for (int it = 0; it < max_iter; ++it) {
      y = left_multiply(x, a);
      double norm = 0.0;
      for (int i = 0; i < n; ++i) {
        y[i] += shift * x[i];
        norm += y[i];
      }
      if (norm <= 0.0) throw std::runtime_error(std::string(who) + ": iteration collapsed");
      double change = 0.0;
      for (int i = 0; i < n; ++i) {
        y[i] /= norm;
        change = std::max(change, std::abs(y[i] - x[i]));
      }
      x.swap(y);
      if (change <= 1e-16) break;
    }
    // Residual check against the actual contract: x^T A = x^T.
    std::vector<double> r = left_multiply(x, a);
    double resid = 0.0;
    for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(r[i] - x[i]));
    if (resid <= 1e-12) return x;
  }
  throw std::runtime_error(std::string(who) +
                           ": no left eigenvector with eigenvalue 1 to 1e-12 "
                           "(is the Perron root 1?)");
}

}  // namespace

std::vector<double> left_pf_eigenvector(const Mat& a) {
  check_nonnegative_square(a, "left_pf_eigenvector");
  return pf_vector(a, "left_pf_eigenvector");
}

std::vector<double> right_pf_eigenvector(const Mat& a) {
  check_nonnegative_square(a, "right_pf_eigenvector");
  std::vector<double> u = pf_vector(transpose(a), "right_pf_eigenvector");
  double mx = 0.0;
  for (double v : u) mx = std::max(mx, v);
  if (mx <= 0.0) throw std::runtime_error("right_pf_eigenvector: nonpositive vector");
  for (double& v : u) v /= mx;
  return u;
}

double determinant(Mat a) {
  if (a.rows != a.cols) throw std::invalid_argument("determinant: matrix not square");
  const int n = a.rows;
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
      det = -det;
    }
    det *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

Mat adjugate(const Mat& a) {
  if (a.rows != a.cols || a.rows == 0)
    throw std::invalid_argument("adjugate: matrix not square");
  const int n = a.rows;
  if (n == 1) {
    Mat r(1, 1);
    r(0, 0) = 1.0;  // determinant of the empty minor
    return r;
  }
  Mat r(n, n);
  Mat minor(n - 1, n - 1);
  for (int j = 0; j < n; ++j) {    // row removed from a
    for (int i = 0; i < n; ++i) {  // column removed from a
      int mi = 0;
      for (int p = 0; p < n; ++p) {
        if (p == j) continue;
        int mj = 0;
        for (int q = 0; q < n; ++q) {
          if (q == i) continue;
          minor(mi, mj) = a(p, q);
          ++mj;
        }
        ++mi;
      }
      double c = determinant(minor);
      r(i, j) = ((i + j) % 2 == 0) ? c : -c;
    }
  }
  return r;
}

}  // namespace multiscale
