#pragma once
// Small dense matrix helpers sized for substitution systems (a handful of
// prototiles). Everything is O(n^3)-ish on tiny n, so clarity wins over
// cleverness; the only nontrivial pieces are the Perron-Frobenius power
// iteration and the cofactor adjugate, both of which have to behave on
// matrices that are singular or periodic by construction.

#include <vector>

namespace multiscale {

struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static Mat identity(int n);
};

Mat operator*(const Mat& x, const Mat& y);
Mat operator-(const Mat& x, const Mat& y);
Mat transpose(const Mat& x);
double trace(const Mat& x);

// x^T A for a row vector x.
std::vector<double> left_multiply(const std::vector<double>& x, const Mat& a);
// A x for a column vector x.
std::vector<double> right_multiply(const Mat& a, const std::vector<double>& x);

// Spectral radius of a nonnegative square matrix by power iteration with a
// diagonal shift. A tiny shift defeats exact periodicity in principle, but
// bipartite spectra (rho and -rho both present) converge at rate
// 1 - O(shift), so on stall the shift escalates to the scale of the matrix;
// rho(A + cI) = rho(A) + c exactly for nonnegative A, so the answer is
// unchanged. Throws std::runtime_error on non-convergence, which is the
// symptom of reducible or otherwise degenerate input.
double spectral_radius(const Mat& a);

// Left Perron eigenvector of a nonnegative matrix whose Perron root is 1,
// normalized to sum 1. Verifies v^T A = v^T to 1e-12 and throws otherwise.
std::vector<double> left_pf_eigenvector(const Mat& a);

// Right Perron eigenvector under the same contract (A u = u), normalized to
// max entry 1 so normalized systems get the all-ones vector exactly.
std::vector<double> right_pf_eigenvector(const Mat& a);

// Determinant by LU with partial pivoting.
double determinant(Mat a);

// Classical adjugate: adj(A)(i,j) = (-1)^{i+j} det(A with row j, col i
// removed). Well-defined for singular input, which is the whole point —
// it is evaluated at I - M(lambda), a rank-deficient matrix.
Mat adjugate(const Mat& a);

}  // namespace multiscale
