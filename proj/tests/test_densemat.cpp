#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "relaxlab/densemat.hpp"

using namespace relax;

namespace {

RealMatrix random_matrix(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RealMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * dist(rng);
  return m;
}

ComplexMatrix random_complex(std::mt19937& rng, int n, double inf_norm_cap) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexMatrix m(n, n);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      m(i, j) = cplx(dist(rng), dist(rng));
      row += std::abs(m(i, j));
    }
    norm = std::max(norm, row);
  }
  if (norm > inf_norm_cap) {
    double f = inf_norm_cap / norm;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) *= f;
  }
  return m;
}

double det_small(const RealMatrix& m) {
  int n = m.rows();
  if (n == 1) return m(0, 0);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    RealMatrix minor(n - 1, n - 1);
    for (int i = 1; i < n; ++i) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(i - 1, cc++) = m(i, c);
      }
    }
    acc += ((j % 2) ? -1.0 : 1.0) * m(0, j) * det_small(minor);
  }
  return acc;
}

}  // namespace

TEST_CASE("lu_solve identity and diagonal") {
  ComplexMatrix eye = ComplexMatrix::identity(2);
  auto x = lu_solve(eye, {cplx(3, 0), cplx(-1, 0)});
  CHECK(x[0] == cplx(3, 0));
  CHECK(x[1] == cplx(-1, 0));

  ComplexMatrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  x = lu_solve(d, {cplx(2, 0), cplx(8, 0)});
  CHECK(x[0].real() == doctest::Approx(1.0));
  CHECK(x[1].real() == doctest::Approx(2.0));
}

TEST_CASE("lu_solve rejects rank-deficient matrices") {
  ComplexMatrix a(2, 2);
  a(0, 0) = a(0, 1) = a(1, 0) = a(1, 1) = 1.0;
  CHECK_THROWS_AS(lu_solve(a, {cplx(1, 0), cplx(2, 0)}), Error);
  try {
    lu_solve(a, {cplx(1, 0), cplx(2, 0)});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
  }
}

TEST_CASE("lu_solve residual on random well-conditioned systems") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + trial % 7;
    ComplexMatrix a = random_complex(rng, n, 1e9);
    for (int i = 0; i < n; ++i) a(i, i) += 4.0 * n;  // keeps the condition number modest
    std::vector<cplx> b(n);
    double bnorm = 0.0;
    for (auto& v : b) {
      v = cplx(dist(rng), dist(rng));
      bnorm = std::max(bnorm, std::abs(v));
    }
    auto x = lu_solve(a, b);
    auto back = a * x;
    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::abs(back[i] - b[i]));
    CHECK(res <= 1e-10 * std::max(bnorm, 1.0));
  }
}

TEST_CASE("sym_eigen diagonal and known spectra") {
  RealMatrix d{{3, 0, 0}, {0, 1, 0}, {0, 0, 2}};
  auto rep = sym_eigen(d);
  REQUIRE(rep.eigenvalues.size() == 3);
  CHECK(rep.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(rep.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(rep.eigenvalues[2] == doctest::Approx(3.0));

  RealMatrix flip{{0, 1}, {1, 0}};
  rep = sym_eigen(flip);
  CHECK(rep.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(rep.eigenvalues[1] == doctest::Approx(1.0));

  // roots of the characteristic polynomial l^2 - 2l - 1
  RealMatrix s{{2, -1}, {-1, 0}};
  rep = sym_eigen(s);
  CHECK(rep.eigenvalues[0] == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.eigenvalues[1] == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sym_eigen rejects asymmetric input") {
  RealMatrix bad{{1, 2}, {0, 1}};
  CHECK_THROWS_AS(sym_eigen(bad), Error);
}

TEST_CASE("sym_eigen trace and determinant invariants") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + trial % 3;  // determinant oracle for n <= 4
    RealMatrix a = random_matrix(rng, n, 2.0);
    RealMatrix s = 0.5 * (a + a.transposed());
    auto rep = sym_eigen(s);
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += s(i, i);
    double sum = 0.0, prod = 1.0;
    for (double v : rep.eigenvalues) {
      sum += v;
      prod *= v;
    }
    double scale = std::max(s.maxAbs(), 1.0);
    CHECK(std::abs(sum - trace) <= 1e-10 * scale);
    double det = det_small(s);
    CHECK(std::abs(prod - det) <= 1e-8 * std::max(std::abs(det), 1.0));
  }
}

TEST_CASE("is_psd examples") {
  auto [flag1, rank1] = is_psd(RealMatrix::identity(3));
  CHECK(flag1);
  CHECK(rank1 == 3);

  auto [flag2, rank2] = is_psd(RealMatrix(2, 2));
  CHECK(flag2);
  CHECK(rank2 == 0);

  auto [flag3, rank3] = is_psd(RealMatrix{{2, -1}, {-1, 0}});
  CHECK(!flag3);  // eigenvalue 1 - sqrt(2) < 0
  CHECK(rank3 == 1);
}

TEST_CASE("expm closed forms") {
  std::mt19937 rng(3);
  ComplexMatrix a = random_complex(rng, 4, 3.0);
  ComplexMatrix e0 = expm(a, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(e0(i, j) - (i == j ? cplx(1, 0) : cplx(0, 0))) <= 1e-15);

  ComplexMatrix d(2, 2);
  d(1, 1) = -2.0;
  ComplexMatrix ed = expm(d, 1.0);
  CHECK(ed(0, 0).real() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ed(1, 1).real() == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  CHECK(std::abs(ed(0, 1)) <= 1e-15);

  ComplexMatrix rot(2, 2);
  rot(0, 1) = 1.0;
  rot(1, 0) = -1.0;
  ComplexMatrix er = expm(rot, 1.0);
  CHECK(er(0, 0).real() == doctest::Approx(std::cos(1.0)).epsilon(1e-13));
  CHECK(er(0, 1).real() == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
  CHECK(er(1, 0).real() == doctest::Approx(-std::sin(1.0)).epsilon(1e-13));
  CHECK(er(1, 1).real() == doctest::Approx(std::cos(1.0)).epsilon(1e-13));
}

TEST_CASE("expm semigroup and inverse identities") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> tdist(0.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + trial % 5;
    ComplexMatrix a = random_complex(rng, n, 1.0);
    double t1 = tdist(rng), t2 = tdist(rng);
    ComplexMatrix lhs = expm(a, t1) * expm(a, t2);
    ComplexMatrix rhs = expm(a, t1 + t2);
    CHECK((lhs - rhs).maxAbs() <= 1e-11);

    double t = std::min(t1, 2.5);
    ComplexMatrix prod = expm(a, t) * expm(a, -t);
    CHECK((prod - ComplexMatrix::identity(n)).maxAbs() <= 1e-10);
  }
}

TEST_CASE("expm stays accurate in the stiff regime") {
  // generator shaped like a relaxation mode with |tA| ~ 1e7: the dominated
  // block must still come out to near machine accuracy
  ComplexMatrix g(2, 2);
  g(0, 0) = cplx(0.0, 2.0);
  g(1, 0) = 1e7;
  g(1, 1) = -2e7;
  ComplexMatrix e = expm(g, 1.0);
  // row 1 decouples: e(0,0) = exp(2i)
  CHECK(std::abs(e(0, 0) - std::exp(cplx(0.0, 2.0))) <= 1e-13);
  // stationary response of the stiff row: x2 ~ (1e7/(2e7 + 2i)) x1
  cplx expected = 1e7 / cplx(2e7, 2.0) * e(0, 0);
  CHECK(std::abs(e(1, 0) - expected) <= 1e-12);
}

TEST_CASE("expm overflow reports") {
  ComplexMatrix big(2, 2);
  big(0, 0) = 800.0;
  big(1, 1) = 800.0;
  CHECK_THROWS_AS(expm(big, 1.0), Error);
  try {
    expm(big, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("RealLu matches complex solve applied to real matrices") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + trial % 5;
    RealMatrix a = random_matrix(rng, n, 1.0);
    for (int i = 0; i < n; ++i) a(i, i) += 3.0 * n;
    ComplexMatrix ac(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ac(i, j) = a(i, j);
    std::vector<cplx> b(n);
    for (auto& v : b) v = cplx(dist(rng), dist(rng));

    RealLu lu(a);
    auto x1 = lu.solve(b);
    auto x2 = lu_solve(ac, b);
    for (int i = 0; i < n; ++i) CHECK(std::abs(x1[i] - x2[i]) <= 1e-12);
  }
}

TEST_CASE("null_space finds the kernel") {
  RealMatrix q{{0, 0, 0}, {0, 0, 0}, {1, 0, -2}};
  auto basis = null_space(q.transposed());
  REQUIRE(basis.size() == 2);
  // every basis vector is a left null vector of q
  for (const auto& v : basis) {
    std::vector<double> prod(3, 0.0);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) prod[j] += v[i] * q(i, j);
    for (double p : prod) CHECK(std::abs(p) <= 1e-14);
  }
  CHECK(null_space(RealMatrix::identity(3)).empty());
}

TEST_CASE("matrix file round trip") {
  RealMatrix m{{1.5, -2.25e-7}, {3.0, 0.125}};
  std::string path = "densemat_roundtrip.txt";
  write_matrix_file(m, path);
  RealMatrix back = read_matrix_file(path);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(back(i, j) == m(i, j));
  std::remove(path.c_str());
}

TEST_CASE("matrix file errors") {
  CHECK_THROWS_AS(read_matrix_file("does_not_exist.txt"), Error);
}
