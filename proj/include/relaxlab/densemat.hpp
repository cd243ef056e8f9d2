#ifndef RELAXLAB_DENSEMAT_HPP
#define RELAXLAB_DENSEMAT_HPP

#include <complex>
#include <string>
#include <vector>

#include "relaxlab/errors.hpp"

namespace relax {

using cplx = std::complex<double>;

/// Small dense row-major real matrix. Everything in this project is at most
/// ~10x10, so storage and algorithms favour simplicity over blocking.
class RealMatrix {
public:
  RealMatrix() = default;
  RealMatrix(int rows, int cols);
  RealMatrix(int rows, int cols, std::vector<double> entries);
  RealMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static RealMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  const std::vector<double>& entries() const { return a_; }

  RealMatrix transposed() const;
  RealMatrix block(int row0, int col0, int nrows, int ncols) const;
  double maxAbs() const;

  friend RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);
  friend RealMatrix operator+(const RealMatrix& a, const RealMatrix& b);
  friend RealMatrix operator-(const RealMatrix& a, const RealMatrix& b);
  friend RealMatrix operator*(double s, const RealMatrix& a);
  friend std::vector<double> operator*(const RealMatrix& a, const std::vector<double>& x);

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

/// Row-major complex matrix; carries the per-mode generators ik*A + Q/eps.
class ComplexMatrix {
public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols);
  ComplexMatrix(int rows, int cols, std::vector<cplx> entries);

  static ComplexMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  cplx operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  double maxAbs() const;

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
  friend std::vector<cplx> operator*(const ComplexMatrix& a, const std::vector<cplx>& x);

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> a_;
};

struct EigenReport {
  std::vector<double> eigenvalues;  // ascending
  int positiveRank = 0;             // eigenvalues > tol*scale
  int negativeCount = 0;            // eigenvalues < -tol*scale
};

struct PsdResult {
  bool psd = false;
  int positiveRank = 0;
};

inline constexpr double kPsdTol = 1e-10;

/// Solve A x = b with partial pivoting. Throws SingularMatrix when a pivot
/// underflows (magnitude < 1e-300).
std::vector<cplx> lu_solve(ComplexMatrix a, const std::vector<cplx>& b);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi sweeps.
/// Throws NotSymmetric when relative asymmetry exceeds 1e-12.
EigenReport sym_eigen(const RealMatrix& s);

/// Semi-positive-definiteness plus rank count at tolerance tol (relative
/// to the spectral norm; absolute fallback for the zero matrix).
PsdResult is_psd(const RealMatrix& s, double tol = kPsdTol);

/// exp(t*A) by scaling-and-squaring. The scaled Taylor core and the
/// squarings run in compensated (double-double) arithmetic so the result
/// stays accurate even for the stiff per-mode generators with |tA| ~ 1e7.
ComplexMatrix expm(const ComplexMatrix& a, double t);

/// Reusable PA=LU factorization of a real square matrix; the stepper
/// applies it separately to the real and imaginary parts of complex
/// right-hand sides.
class RealLu {
public:
  explicit RealLu(RealMatrix a);

  int dim() const { return n_; }
  std::vector<double> solve(std::vector<double> b) const;
  std::vector<cplx> solve(const std::vector<cplx>& b) const;
  void solveInPlace(cplx* b) const;

private:
  int n_ = 0;
  RealMatrix lu_;
  std::vector<int> perm_;
};

/// Null-space basis by Gauss-Jordan reduction; tolerance is relative to the
/// largest entry. Returned vectors are the standard free-column generators.
std::vector<std::vector<double>> null_space(const RealMatrix& a, double tol = 1e-12);

/// Plain-text matrix format used repo-wide: first line "rows cols", then
/// `rows` lines of `cols` decimal scalars. Real matrices only.
RealMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const RealMatrix& m, const std::string& path);

}  // namespace relax

#endif
