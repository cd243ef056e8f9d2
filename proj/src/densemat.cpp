#include "relaxlab/densemat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace relax {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::StructureViolation: return "StructureViolation";
    case ErrorCode::TooFewStages: return "TooFewStages";
    case ErrorCode::UnknownScheme: return "UnknownScheme";
    case ErrorCode::NullityMismatch: return "NullityMismatch";
    case ErrorCode::SingularP: return "SingularP";
    case ErrorCode::BadMomentOrder: return "BadMomentOrder";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::SingularStageMatrix: return "SingularStageMatrix";
    case ErrorCode::NonCommensurateInterval: return "NonCommensurateInterval";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

namespace {

void require_finite(const double* p, size_t n, const char* what) {
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i]))
      throw Error(ErrorCode::InvalidArgument, std::string(what) + ": non-finite entry");
  }
}

}  // namespace

RealMatrix::RealMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0)
    throw Error(ErrorCode::ShapeMismatch, "negative matrix dimension");
}

RealMatrix::RealMatrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (rows < 0 || cols < 0 || a_.size() != static_cast<size_t>(rows) * cols)
    throw Error(ErrorCode::ShapeMismatch, "entry count does not match rows*cols");
  require_finite(a_.data(), a_.size(), "RealMatrix");
}

RealMatrix::RealMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  a_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_)
      throw Error(ErrorCode::ShapeMismatch, "ragged initializer");
    a_.insert(a_.end(), r.begin(), r.end());
  }
  require_finite(a_.data(), a_.size(), "RealMatrix");
}

RealMatrix RealMatrix::identity(int n) {
  RealMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

RealMatrix RealMatrix::transposed() const {
  RealMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RealMatrix RealMatrix::block(int row0, int col0, int nrows, int ncols) const {
  if (row0 < 0 || col0 < 0 || row0 + nrows > rows_ || col0 + ncols > cols_)
    throw Error(ErrorCode::ShapeMismatch, "block out of range");
  RealMatrix b(nrows, ncols);
  for (int i = 0; i < nrows; ++i)
    for (int j = 0; j < ncols; ++j) b(i, j) = (*this)(row0 + i, col0 + j);
  return b;
}

double RealMatrix::maxAbs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::ShapeMismatch, "matrix product shape");
  RealMatrix c(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

RealMatrix operator+(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw Error(ErrorCode::ShapeMismatch, "matrix sum shape");
  RealMatrix c = a;
  for (size_t i = 0; i < c.a_.size(); ++i) c.a_[i] += b.a_[i];
  return c;
}

RealMatrix operator-(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw Error(ErrorCode::ShapeMismatch, "matrix difference shape");
  RealMatrix c = a;
  for (size_t i = 0; i < c.a_.size(); ++i) c.a_[i] -= b.a_[i];
  return c;
}

RealMatrix operator*(double s, const RealMatrix& a) {
  RealMatrix c = a;
  for (double& v : c.a_) v *= s;
  return c;
}

std::vector<double> operator*(const RealMatrix& a, const std::vector<double>& x) {
  if (a.cols_ != static_cast<int>(x.size()))
    throw Error(ErrorCode::ShapeMismatch, "matrix-vector shape");
  std::vector<double> y(a.rows_, 0.0);
  for (int i = 0; i < a.rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < a.cols_; ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, cplx(0.0, 0.0)) {
  if (rows < 0 || cols < 0)
    throw Error(ErrorCode::ShapeMismatch, "negative matrix dimension");
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (rows < 0 || cols < 0 || a_.size() != static_cast<size_t>(rows) * cols)
    throw Error(ErrorCode::ShapeMismatch, "entry count does not match rows*cols");
  for (const cplx& z : a_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::InvalidArgument, "ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double ComplexMatrix::maxAbs() const {
  double m = 0.0;
  for (const cplx& z : a_) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::ShapeMismatch, "matrix product shape");
  ComplexMatrix c(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw Error(ErrorCode::ShapeMismatch, "matrix difference shape");
  ComplexMatrix c = a;
  for (size_t i = 0; i < c.a_.size(); ++i) c.a_[i] -= b.a_[i];
  return c;
}

std::vector<cplx> operator*(const ComplexMatrix& a, const std::vector<cplx>& x) {
  if (a.cols_ != static_cast<int>(x.size()))
    throw Error(ErrorCode::ShapeMismatch, "matrix-vector shape");
  std::vector<cplx> y(a.rows_, cplx(0.0, 0.0));
  for (int i = 0; i < a.rows_; ++i) {
    cplx acc(0.0, 0.0);
    for (int j = 0; j < a.cols_; ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<cplx> lu_solve(ComplexMatrix a, const std::vector<cplx>& b) {
  if (!a.square()) throw Error(ErrorCode::ShapeMismatch, "lu_solve: matrix not square");
  int n = a.rows();
  if (static_cast<int>(b.size()) != n)
    throw Error(ErrorCode::ShapeMismatch, "lu_solve: rhs length mismatch");
  std::vector<cplx> x = b;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a(col, col));
    for (int i = col + 1; i < n; ++i) {
      double v = std::abs(a(i, col));
      if (v > best) { best = v; piv = i; }
    }
    if (best < 1e-300)
      throw Error(ErrorCode::SingularMatrix, "lu_solve: pivot underflow");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(x[piv], x[col]);
    }
    for (int i = col + 1; i < n; ++i) {
      cplx f = a(i, col) / a(col, col);
      if (f == cplx(0.0, 0.0)) continue;
      for (int j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
      x[i] -= f * x[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    cplx acc = x[i];
    for (int j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

EigenReport sym_eigen(const RealMatrix& s) {
  if (!s.square()) throw Error(ErrorCode::ShapeMismatch, "sym_eigen: matrix not square");
  int n = s.rows();
  double scale = s.maxAbs();
  double asym = (s - s.transposed()).maxAbs();
  if (asym > 1e-12 * std::max(1.0, scale))
    throw Error(ErrorCode::NotSymmetric, "sym_eigen: matrix not symmetric");

  RealMatrix a = s;
  // symmetrize exactly so roundoff in the input cannot bias the sweeps
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = v;
    }

  auto off_norm2 = [&]() {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) acc += a(i, j) * a(i, j);
    return acc;
  };

  const double stop = 1e-32 * std::max(scale * scale, 1e-300);
  for (int sweep = 0; sweep < 64 && off_norm2() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double sn = t * c;
        double tau = sn / (1.0 + c);
        double apq = a(p, q);
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          double arp = a(r, p), arq = a(r, q);
          a(r, p) = a(p, r) = arp - sn * (arq + tau * arp);
          a(r, q) = a(q, r) = arq + sn * (arp - tau * arq);
        }
      }
    }
  }

  EigenReport rep;
  rep.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) rep.eigenvalues[i] = a(i, i);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  double emax = 0.0;
  for (double v : rep.eigenvalues) emax = std::max(emax, std::abs(v));
  double tol = kPsdTol * std::max(emax, 1e-300);
  for (double v : rep.eigenvalues) {
    if (v > tol) ++rep.positiveRank;
    if (v < -tol) ++rep.negativeCount;
  }
  return rep;
}

PsdResult is_psd(const RealMatrix& s, double tol) {
  EigenReport rep = sym_eigen(s);
  double emax = 0.0;
  for (double v : rep.eigenvalues) emax = std::max(emax, std::abs(v));
  double thresh = (emax == 0.0) ? tol : tol * emax;  // absolute fallback for the zero matrix
  PsdResult out;
  out.psd = rep.eigenvalues.empty() || rep.eigenvalues.front() >= -thresh;
  for (double v : rep.eigenvalues)
    if (v > thresh) ++out.positiveRank;
  return out;
}

// ---------------------------------------------------------------------------
// expm: scaling-and-squaring with a compensated (double-double) core.
// The per-mode generators ik*A + Q/eps reach |tB| ~ 1e7 in the stiff regime;
// plain double squaring would leave an error floor around 1e-10, which is
// visible next to the third-order schemes' smallest errors.

namespace {

struct DD {
  double hi = 0.0, lo = 0.0;
};

inline DD dd_from(double x) { return {x, 0.0}; }

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  DD r = two_sum(s.hi, lo);
  return r;
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  double e = std::fma(a, b, -p);
  return {p, e};
}

inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return two_sum(p.hi, p.lo);
}

inline DD dd_mul_d(DD a, double b) {
  DD p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return two_sum(p.hi, p.lo);
}

struct DDC {
  DD re, im;
};

inline DDC ddc_add(DDC a, DDC b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }

inline DDC ddc_mul(DDC a, DDC b) {
  DD re = dd_add(dd_mul(a.re, b.re), dd_mul_d(dd_mul(a.im, b.im), -1.0));
  DD im = dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re));
  return {re, im};
}

inline DDC ddc_scale(DDC a, double s) { return {dd_mul_d(a.re, s), dd_mul_d(a.im, s)}; }

using DDMat = std::vector<DDC>;  // n*n row-major

DDMat ddm_mul(const DDMat& a, const DDMat& b, int n) {
  DDMat c(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      DDC acc{{0, 0}, {0, 0}};
      for (int k = 0; k < n; ++k)
        acc = ddc_add(acc, ddc_mul(a[i * n + k], b[k * n + j]));
      c[i * n + j] = acc;
    }
  return c;
}

double ddm_max_abs(const DDMat& a) {
  double m = 0.0;
  for (const DDC& z : a)
    m = std::max(m, std::max(std::abs(z.re.hi), std::abs(z.im.hi)));
  return m;
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a, double t) {
  if (!a.square()) throw Error(ErrorCode::ShapeMismatch, "expm: matrix not square");
  int n = a.rows();
  if (n == 0) return a;
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "expm: non-finite t");

  // infinity norm of t*A decides the squaring count
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(a(i, j)) * std::abs(t);
    norm = std::max(norm, row);
  }
  if (!std::isfinite(norm)) throw Error(ErrorCode::Overflow, "expm: |tA| overflows");

  int squarings = 0;
  double scaled = norm;
  while (scaled > 0.5) {
    scaled *= 0.5;
    ++squarings;
  }

  const double factor = t * std::ldexp(1.0, -squarings);
  DDMat x(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx z = a(i, j);
      x[i * n + j] = {dd_mul_d(dd_from(z.real()), factor),
                      dd_mul_d(dd_from(z.imag()), factor)};
    }

  // Taylor series of exp(x); |x| <= 0.5 so ~40 terms reach dd precision
  DDMat sum(static_cast<size_t>(n) * n);
  DDMat term(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    sum[i * n + i] = {dd_from(1.0), dd_from(0.0)};
    term[i * n + i] = {dd_from(1.0), dd_from(0.0)};
  }
  for (int k = 1; k <= 64; ++k) {
    term = ddm_mul(term, x, n);
    double inv = 1.0 / static_cast<double>(k);
    for (DDC& z : term) z = ddc_scale(z, inv);
    for (size_t i = 0; i < sum.size(); ++i) sum[i] = ddc_add(sum[i], term[i]);
    if (ddm_max_abs(term) < 1e-34) break;
  }

  for (int s = 0; s < squarings; ++s) {
    sum = ddm_mul(sum, sum, n);
    if (!std::isfinite(ddm_max_abs(sum)))
      throw Error(ErrorCode::Overflow, "expm: intermediate overflow");
  }

  ComplexMatrix e(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const DDC& z = sum[i * n + j];
      double re = z.re.hi + z.re.lo;
      double im = z.im.hi + z.im.lo;
      if (!std::isfinite(re) || !std::isfinite(im))
        throw Error(ErrorCode::Overflow, "expm: result overflow");
      e(i, j) = cplx(re, im);
    }
  return e;
}

RealLu::RealLu(RealMatrix a) : n_(a.rows()), lu_(std::move(a)) {
  if (!lu_.square()) throw Error(ErrorCode::ShapeMismatch, "RealLu: matrix not square");
  perm_.resize(n_);
  for (int i = 0; i < n_; ++i) perm_[i] = i;
  for (int col = 0; col < n_; ++col) {
    int piv = col;
    double best = std::abs(lu_(col, col));
    for (int i = col + 1; i < n_; ++i) {
      double v = std::abs(lu_(i, col));
      if (v > best) { best = v; piv = i; }
    }
    if (best < 1e-300)
      throw Error(ErrorCode::SingularMatrix, "RealLu: pivot underflow");
    if (piv != col) {
      for (int j = 0; j < n_; ++j) std::swap(lu_(piv, j), lu_(col, j));
      std::swap(perm_[piv], perm_[col]);
    }
    for (int i = col + 1; i < n_; ++i) {
      double f = lu_(i, col) / lu_(col, col);
      lu_(i, col) = f;
      for (int j = col + 1; j < n_; ++j) lu_(i, j) -= f * lu_(col, j);
    }
  }
}

std::vector<double> RealLu::solve(std::vector<double> b) const {
  if (static_cast<int>(b.size()) != n_)
    throw Error(ErrorCode::ShapeMismatch, "RealLu::solve: rhs length mismatch");
  std::vector<double> x(n_);
  for (int i = 0; i < n_; ++i) x[i] = b[perm_[i]];
  for (int i = 1; i < n_; ++i) {
    double acc = x[i];
    for (int j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
    x[i] = acc;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double acc = x[i];
    for (int j = i + 1; j < n_; ++j) acc -= lu_(i, j) * x[j];
    x[i] = acc / lu_(i, i);
  }
  return x;
}

std::vector<cplx> RealLu::solve(const std::vector<cplx>& b) const {
  std::vector<cplx> x = b;
  solveInPlace(x.data());
  return x;
}

void RealLu::solveInPlace(cplx* b) const {
  // permute, forward, backward on interleaved re/im
  thread_local std::vector<cplx> tmp;
  tmp.assign(b, b + n_);
  for (int i = 0; i < n_; ++i) b[i] = tmp[perm_[i]];
  for (int i = 1; i < n_; ++i) {
    cplx acc = b[i];
    for (int j = 0; j < i; ++j) acc -= lu_(i, j) * b[j];
    b[i] = acc;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    cplx acc = b[i];
    for (int j = i + 1; j < n_; ++j) acc -= lu_(i, j) * b[j];
    b[i] = acc / lu_(i, i);
  }
}

std::vector<std::vector<double>> null_space(const RealMatrix& a, double tol) {
  int rows = a.rows(), cols = a.cols();
  RealMatrix r = a;
  double scale = std::max(r.maxAbs(), 1e-300);
  double thresh = tol * scale;

  std::vector<int> pivot_col_of_row;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int piv = row;
    double best = std::abs(r(row, col));
    for (int i = row + 1; i < rows; ++i) {
      double v = std::abs(r(i, col));
      if (v > best) { best = v; piv = i; }
    }
    if (best <= thresh) continue;
    if (piv != row)
      for (int j = 0; j < cols; ++j) std::swap(r(piv, j), r(row, j));
    double d = r(row, col);
    for (int j = 0; j < cols; ++j) r(row, j) /= d;
    for (int i = 0; i < rows; ++i) {
      if (i == row) continue;
      double f = r(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) r(i, j) -= f * r(row, j);
    }
    pivot_col_of_row.push_back(col);
    ++row;
  }

  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col_of_row) is_pivot[c] = true;

  std::vector<std::vector<double>> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<double> v(cols, 0.0);
    v[free] = 1.0;
    for (size_t pr = 0; pr < pivot_col_of_row.size(); ++pr)
      v[pivot_col_of_row[pr]] = -r(static_cast<int>(pr), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

RealMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open matrix file: " + path);
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
    throw Error(ErrorCode::IoFailure, "bad matrix header in " + path);
  std::vector<double> entries(static_cast<size_t>(rows) * cols);
  for (double& v : entries) {
    if (!(in >> v))
      throw Error(ErrorCode::IoFailure, "truncated matrix data in " + path);
  }
  return RealMatrix(rows, cols, std::move(entries));
}

void write_matrix_file(const RealMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write matrix file: " + path);
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << (j + 1 == m.cols() ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

}  // namespace relax
