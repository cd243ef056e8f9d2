#include <cmath>

#include "doctest.h"
#include "relaxlab/relaxsys.hpp"

using namespace relax;

TEST_CASE("broadwell matrices match the model") {
  auto [sys, cert] = builtin_broadwell(1e-3);
  CHECK(sys.m == 3);
  CHECK(sys.r == 1);
  CHECK(sys.epsilon == 1e-3);
  CHECK(sys.A(0, 1) == 1.0);
  CHECK(sys.A(1, 2) == 1.0);
  CHECK(sys.A(2, 1) == 1.0);
  CHECK(sys.A(0, 0) == 0.0);
  CHECK(sys.Q(2, 0) == 1.0);
  CHECK(sys.Q(2, 2) == -2.0);
  CHECK(sys.Q(0, 0) == 0.0);
  CHECK(sys.Q(1, 1) == 0.0);

  StabilityReport rep = check_structural_stability(sys.A, sys.Q, cert, sys.r);
  CHECK(rep.condI.pass);
  CHECK(rep.condII.pass);
  CHECK(rep.condIII.pass);
  CHECK(rep.blockDiagA0.pass);
  CHECK(rep.shatSymNegDef.pass);
}

TEST_CASE("grad matrices match the model") {
  auto [sys, cert] = builtin_grad(5, 1.0);
  CHECK(sys.m == 6);
  CHECK(sys.r == 3);
  const double want[5] = {1.0, std::sqrt(2.0), std::sqrt(3.0), 2.0, std::sqrt(5.0)};
  for (int k = 0; k < 5; ++k) {
    CHECK(sys.A(k, k + 1) == doctest::Approx(want[k]));
    CHECK(sys.A(k + 1, k) == doctest::Approx(want[k]));
  }
  for (int i = 0; i < 3; ++i) CHECK(sys.Q(i, i) == 0.0);
  for (int i = 3; i < 6; ++i) CHECK(sys.Q(i, i) == -1.0);

  StabilityReport rep = check_structural_stability(sys.A, sys.Q, cert, sys.r);
  CHECK(rep.allPass());
  CHECK(rep.condI.residual < 1e-10);
  CHECK(rep.condII.residual < 1e-10);
  CHECK(rep.blockDiagA0.residual < 1e-10);
}

TEST_CASE("bad moment order") {
  CHECK_THROWS_AS(builtin_grad(2, 1.0), Error);
  try {
    builtin_grad(2, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadMomentOrder);
  }
}

TEST_CASE("anti-dissipative source fails the coupling condition") {
  auto [sys, cert] = builtin_grad(5, 1.0);
  RealMatrix q = sys.Q;
  q(5, 5) = 1.0;
  StabilityReport rep = check_structural_stability(sys.A, q, cert, sys.r);
  CHECK(!rep.condIII.pass);
}

TEST_CASE("transform identities") {
  auto [sys, cert] = builtin_broadwell(1.0);

  RelaxationSystem same = transform(sys, RealMatrix::identity(3));
  CHECK((same.A - sys.A).maxAbs() == 0.0);
  CHECK((same.Q - sys.Q).maxAbs() == 0.0);

  // under the certificate's P the source becomes block diagonal with the
  // stiff eigenvalue -2
  RelaxationSystem tr = transform(sys, cert.P);
  RealMatrix expected(3, 3);
  expected(2, 2) = -2.0;
  CHECK((tr.Q - expected).maxAbs() <= 1e-10);

  RelaxationSystem back = transform(tr, invert(cert.P));
  CHECK((back.A - sys.A).maxAbs() <= 1e-12);
  CHECK((back.Q - sys.Q).maxAbs() <= 1e-12);
}

TEST_CASE("transformed system passes with the identity certificate") {
  auto [sys, cert] = builtin_broadwell(1.0);
  RelaxationSystem tr = transform(sys, cert.P);

  RealMatrix pinv = invert(cert.P);
  StabilityCertificate idcert;
  idcert.P = RealMatrix::identity(3);
  idcert.A0 = pinv.transposed() * cert.A0 * pinv;
  idcert.Shat = tr.Q.block(2, 2, 1, 1);
  StabilityReport rep = check_structural_stability(tr.A, tr.Q, idcert, sys.r);
  CHECK(rep.allPass());
}

TEST_CASE("stiff block is strictly dissipative in the A02 metric") {
  for (const char* which : {"broadwell", "grad"}) {
    auto [sys, cert] = std::string(which) == "broadwell" ? builtin_broadwell(1.0)
                                                         : builtin_grad(5, 1.0);
    RealMatrix pinv = invert(cert.P);
    RealMatrix b = pinv.transposed() * cert.A0 * pinv;
    RealMatrix a02 = b.block(sys.m - sys.r, sys.m - sys.r, sys.r, sys.r);
    RealMatrix w = -1.0 * (a02 * cert.Shat);
    EigenReport eig = sym_eigen(0.5 * (w + w.transposed()));
    CHECK(eig.eigenvalues.front() > 0.0);
  }
}

TEST_CASE("certificate perturbations") {
  auto [sys, cert] = builtin_broadwell(1.0);

  StabilityCertificate bad = cert;
  bad.A0(0, 1) += 0.25;  // no longer symmetric
  StabilityReport rep = check_structural_stability(sys.A, sys.Q, bad, sys.r);
  CHECK(!rep.condII.pass);

  for (double alpha : {1.0, 4.0}) {
    StabilityCertificate scaled = cert;
    scaled.A0 = alpha * cert.A0;
    StabilityReport r2 = check_structural_stability(sys.A, sys.Q, scaled, sys.r);
    CHECK(r2.allPass());
  }
}

TEST_CASE("derive_certificate reproduces a valid broadwell certificate") {
  RealMatrix a{{0, 1, 0}, {0, 0, 1}, {0, 1, 0}};
  RealMatrix q{{0, 0, 0}, {0, 0, 0}, {1, 0, -2}};
  StabilityCertificate cert = derive_certificate(a, q, 1);
  StabilityReport rep = check_structural_stability(a, q, cert, 1);
  CHECK(rep.allPass());
}

TEST_CASE("load_system round trip") {
  auto [sys, cert] = builtin_broadwell(0.5);
  write_matrix_file(sys.A, "relaxsys_a.txt");
  write_matrix_file(sys.Q, "relaxsys_q.txt");
  RelaxationSystem back = load_system("relaxsys_a.txt", "relaxsys_q.txt", 1, 0.5);
  CHECK((back.A - sys.A).maxAbs() == 0.0);
  CHECK((back.Q - sys.Q).maxAbs() == 0.0);
  CHECK(back.r == 1);
  CHECK(back.epsilon == 0.5);
  std::remove("relaxsys_a.txt");
  std::remove("relaxsys_q.txt");

  CHECK_THROWS_AS(load_system("relaxsys_a.txt", "relaxsys_q.txt", 1, 0.5), Error);
}

TEST_CASE("shape guards") {
  auto [sys, cert] = builtin_broadwell(1.0);
  CHECK_THROWS_AS(check_structural_stability(sys.A, sys.Q, cert, 2), Error);
  CHECK_THROWS_AS(transform(sys, RealMatrix::identity(4)), Error);
  RealMatrix singular(3, 3);
  CHECK_THROWS_AS(transform(sys, singular), Error);
  try {
    transform(sys, singular);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularP);
  }
}
