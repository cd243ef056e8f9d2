#include "relaxlab/relaxsys.hpp"

#include <algorithm>
#include <cmath>

namespace relax {

namespace {

RealMatrix stiff_selector(int m, int r) {
  RealMatrix d(m, m);
  for (int i = m - r; i < m; ++i) d(i, i) = 1.0;
  return d;
}

double sym_residual(const RealMatrix& m) { return (m - m.transposed()).maxAbs(); }

}  // namespace

RealMatrix invert(const RealMatrix& m) {
  if (!m.square()) throw Error(ErrorCode::ShapeMismatch, "invert: matrix not square");
  int n = m.rows();
  RealMatrix inv(n, n);
  try {
    RealLu lu(m);
    for (int j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      auto col = lu.solve(std::move(e));
      for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
  } catch (const Error& err) {
    if (err.code() == ErrorCode::SingularMatrix)
      throw Error(ErrorCode::SingularP, "matrix is numerically singular");
    throw;
  }
  return inv;
}

StabilityReport check_structural_stability(const RealMatrix& A, const RealMatrix& Q,
                                           const StabilityCertificate& cert, int r) {
  int m = A.rows();
  if (!A.square() || !Q.square() || Q.rows() != m || cert.P.rows() != m ||
      !cert.P.square() || cert.A0.rows() != m || !cert.A0.square() ||
      cert.Shat.rows() != r || cert.Shat.cols() != r)
    throw Error(ErrorCode::ShapeMismatch, "stability check: inconsistent shapes");
  if (r <= 0 || r > m)
    throw Error(ErrorCode::ShapeMismatch, "stability check: rank r out of range");

  double scale = std::max({1.0, A.maxAbs(), Q.maxAbs(), cert.P.maxAbs(), cert.A0.maxAbs()});
  const double tol = 1e-10 * scale;

  StabilityReport rep;

  // (i): P Q = diag(0, Shat) P with invertible Shat
  RealMatrix ds(m, m);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) ds(m - r + i, m - r + j) = cert.Shat(i, j);
  double res_i = (cert.P * Q - ds * cert.P).maxAbs();
  bool shat_invertible = true;
  try {
    RealLu lu(cert.Shat);
    (void)lu;
  } catch (const Error&) {
    shat_invertible = false;
  }
  rep.condI = {res_i <= tol && shat_invertible, res_i};

  // (ii): A0 symmetric positive definite and A0 A = A^T A0
  double res_sym = sym_residual(cert.A0);
  double res_comm = (cert.A0 * A - A.transposed() * cert.A0).maxAbs();
  bool spd = false;
  if (res_sym <= tol) {
    EigenReport eig = sym_eigen(cert.A0);
    spd = !eig.eigenvalues.empty() && eig.eigenvalues.front() > tol;
  }
  rep.condII = {spd && res_comm <= tol, std::max(res_sym, res_comm)};

  // (iii): A0 Q + Q^T A0 + P^T diag(0, I_r) P negative semidefinite
  RealMatrix coupling = cert.A0 * Q + Q.transposed() * cert.A0 +
                        cert.P.transposed() * stiff_selector(m, r) * cert.P;
  double res_iii = 0.0;
  bool nsd = false;
  double csym = sym_residual(coupling);
  if (csym <= tol) {
    PsdResult psd = is_psd(-1.0 * coupling);
    nsd = psd.psd;
    EigenReport eig = sym_eigen(coupling);
    res_iii = std::max(0.0, eig.eigenvalues.back());
  } else {
    res_iii = csym;
  }
  rep.condIII = {nsd, res_iii};

  // block diagonality of P^{-T} A0 P^{-1}
  RealMatrix pinv = invert(cert.P);
  RealMatrix b = pinv.transposed() * cert.A0 * pinv;
  double res_block = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      bool off_block = (i < m - r) != (j < m - r);
      if (off_block) res_block = std::max(res_block, std::abs(b(i, j)));
    }
  rep.blockDiagA0 = {res_block <= tol, res_block};

  // A02 * Shat symmetric negative definite
  RealMatrix a02 = b.block(m - r, m - r, r, r);
  RealMatrix w = a02 * cert.Shat;
  double wsym = sym_residual(w);
  bool negdef = false;
  double res_shat = wsym;
  if (wsym <= tol) {
    RealMatrix wsymm = 0.5 * (w + w.transposed());
    EigenReport eig = sym_eigen(wsymm);
    negdef = !eig.eigenvalues.empty() && eig.eigenvalues.back() < -tol;
    res_shat = std::max(wsym, negdef ? 0.0 : eig.eigenvalues.back());
  }
  rep.shatSymNegDef = {negdef, res_shat};

  return rep;
}

RelaxationSystem transform(const RelaxationSystem& sys, const RealMatrix& P) {
  if (!P.square() || P.rows() != sys.m)
    throw Error(ErrorCode::ShapeMismatch, "transform: P shape mismatch");
  RealMatrix pinv = invert(P);
  RelaxationSystem out = sys;
  out.A = P * sys.A * pinv;
  out.Q = P * sys.Q * pinv;
  return out;
}

std::pair<RelaxationSystem, StabilityCertificate> builtin_broadwell(double epsilon) {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "broadwell: epsilon must be positive");
  RelaxationSystem sys;
  sys.m = 3;
  sys.r = 1;
  sys.A = RealMatrix{{0, 1, 0}, {0, 0, 1}, {0, 1, 0}};
  sys.Q = RealMatrix{{0, 0, 0}, {0, 0, 0}, {1, 0, -2}};
  sys.epsilon = epsilon;
  static const StabilityCertificate cert = derive_certificate(sys.A, sys.Q, sys.r);
  return {sys, cert};
}

std::pair<RelaxationSystem, StabilityCertificate> builtin_grad(int M, double epsilon) {
  if (M < 3) throw Error(ErrorCode::BadMomentOrder, "moment order must be >= 3");
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "grad: epsilon must be positive");
  int m = M + 1;
  RelaxationSystem sys;
  sys.m = m;
  sys.r = M - 2;
  sys.A = RealMatrix(m, m);
  for (int k = 1; k <= M; ++k) {
    double v = std::sqrt(static_cast<double>(k));
    sys.A(k - 1, k) = v;
    sys.A(k, k - 1) = v;
  }
  sys.Q = RealMatrix(m, m);
  for (int i = 3; i < m; ++i) sys.Q(i, i) = -1.0;
  sys.epsilon = epsilon;

  StabilityCertificate cert;
  cert.P = RealMatrix::identity(m);
  cert.A0 = RealMatrix::identity(m);
  cert.Shat = RealMatrix(sys.r, sys.r);
  for (int i = 0; i < sys.r; ++i) cert.Shat(i, i) = -1.0;
  return {sys, cert};
}

namespace {

// Row-echelon pivot rows of Q form a basis of its row space.
std::vector<std::vector<double>> row_space_basis(const RealMatrix& q, double tol) {
  int m = q.rows();
  RealMatrix work = q;
  double thresh = tol * std::max(q.maxAbs(), 1e-300);
  std::vector<int> kept;
  std::vector<std::vector<double>> basis;
  int row = 0;
  for (int col = 0; col < m && row < m; ++col) {
    int piv = -1;
    double best = thresh;
    for (int i = row; i < m; ++i) {
      if (std::abs(work(i, col)) > best) {
        best = std::abs(work(i, col));
        piv = i;
      }
    }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < m; ++j) std::swap(work(piv, j), work(row, j));
    std::vector<double> b(m);
    for (int j = 0; j < m; ++j) b[j] = work(row, j);
    basis.push_back(std::move(b));
    for (int i = row + 1; i < m; ++i) {
      double f = work(i, col) / work(row, col);
      for (int j = 0; j < m; ++j) work(i, j) -= f * work(row, j);
    }
    ++row;
  }
  return basis;
}

}  // namespace

StabilityCertificate derive_certificate(const RealMatrix& A, const RealMatrix& Q, int r) {
  int m = Q.rows();
  if (!A.square() || !Q.square() || A.rows() != m)
    throw Error(ErrorCode::ShapeMismatch, "derive_certificate: shapes");
  if (r <= 0 || r > m)
    throw Error(ErrorCode::ShapeMismatch, "derive_certificate: rank out of range");

  // P: left-kernel rows first, then a row-space basis of Q (valid when the
  // zero eigenvalue is semisimple).
  auto kernel = null_space(Q.transposed(), 1e-12);
  auto stiff_rows = row_space_basis(Q, 1e-12);
  if (static_cast<int>(kernel.size()) != m - r ||
      static_cast<int>(stiff_rows.size()) != r)
    throw Error(ErrorCode::SingularP,
                "derive_certificate: Q rank structure does not match r");

  StabilityCertificate cert;
  cert.P = RealMatrix(m, m);
  for (int i = 0; i < m - r; ++i)
    for (int j = 0; j < m; ++j) cert.P(i, j) = kernel[i][j];
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < m; ++j) cert.P(m - r + i, j) = stiff_rows[i][j];

  RealMatrix pinv = invert(cert.P);
  RealMatrix pqp = cert.P * Q * pinv;
  cert.Shat = pqp.block(m - r, m - r, r, r);

  // A0 from the linear constraints: symmetry of A0 A and block diagonality
  // of P^{-T} A0 P^{-1}, over the symmetric-matrix unknowns.
  int nsym = m * (m + 1) / 2;
  auto unpack = [&](const std::vector<double>& x) {
    RealMatrix s(m, m);
    int idx = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        s(i, j) = x[idx];
        s(j, i) = x[idx];
        ++idx;
      }
    return s;
  };

  std::vector<std::vector<double>> constraint_rows;
  auto add_constraints = [&](auto&& entry_of) {
    for (int basis = 0; basis < nsym; ++basis) {
      std::vector<double> unit(nsym, 0.0);
      unit[basis] = 1.0;
      RealMatrix s = unpack(unit);
      entry_of(s, basis);
    }
  };

  // commutation rows: (A0 A - A^T A0)_{ij} for i < j
  std::vector<std::vector<double>> comm_cols(nsym);
  add_constraints([&](const RealMatrix& s, int basis) {
    RealMatrix c = s * A - A.transposed() * s;
    std::vector<double> col;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) col.push_back(c(i, j));
    comm_cols[basis] = std::move(col);
  });
  // block-diagonality rows: (P^{-T} A0 P^{-1})_{ij} for i stiff xor j stiff
  std::vector<std::vector<double>> block_cols(nsym);
  add_constraints([&](const RealMatrix& s, int basis) {
    RealMatrix b = pinv.transposed() * s * pinv;
    std::vector<double> col;
    for (int i = 0; i < m - r; ++i)
      for (int j = m - r; j < m; ++j) col.push_back(b(i, j));
    block_cols[basis] = std::move(col);
  });

  size_t nrows = comm_cols[0].size() + block_cols[0].size();
  RealMatrix constraints(static_cast<int>(nrows), nsym);
  for (int basis = 0; basis < nsym; ++basis) {
    size_t rr = 0;
    for (double v : comm_cols[basis]) constraints(static_cast<int>(rr++), basis) = v;
    for (double v : block_cols[basis]) constraints(static_cast<int>(rr++), basis) = v;
  }

  auto solutions = null_space(constraints, 1e-12);
  if (solutions.empty())
    throw Error(ErrorCode::SingularP, "derive_certificate: no symmetrizer candidate");

  // candidate combinations: each basis vector alone (both signs) and the sum
  std::vector<std::vector<double>> candidates;
  for (auto& sol : solutions) {
    candidates.push_back(sol);
    std::vector<double> neg(sol.size());
    for (size_t i = 0; i < sol.size(); ++i) neg[i] = -sol[i];
    candidates.push_back(std::move(neg));
  }
  if (solutions.size() > 1) {
    std::vector<double> sum(nsym, 0.0);
    for (auto& sol : solutions)
      for (int i = 0; i < nsym; ++i) sum[i] += sol[i];
    candidates.push_back(std::move(sum));
  }

  for (const auto& cand : candidates) {
    RealMatrix base = unpack(cand);
    double norm = base.maxAbs();
    if (norm <= 0.0) continue;
    base = (1.0 / norm) * base;
    for (int k = 0; k <= 48; ++k) {
      cert.A0 = std::ldexp(1.0, k) * base;
      StabilityReport rep = check_structural_stability(A, Q, cert, r);
      if (rep.allPass()) return cert;
    }
  }
  throw Error(ErrorCode::SingularP,
              "derive_certificate: could not scale a symmetrizer into the "
              "coupling inequality");
}

RelaxationSystem load_system(const std::string& a_path, const std::string& q_path,
                             int r, double epsilon) {
  RealMatrix a = read_matrix_file(a_path);
  RealMatrix q = read_matrix_file(q_path);
  if (!a.square() || !q.square() || a.rows() != q.rows())
    throw Error(ErrorCode::ShapeMismatch, "system matrices must be square and matching");
  if (r <= 0 || r > a.rows())
    throw Error(ErrorCode::ShapeMismatch, "stiff rank out of range");
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  RelaxationSystem sys;
  sys.m = a.rows();
  sys.r = r;
  sys.A = std::move(a);
  sys.Q = std::move(q);
  sys.epsilon = epsilon;
  return sys;
}

}  // namespace relax
