#ifndef RELAXLAB_RELAXSYS_HPP
#define RELAXLAB_RELAXSYS_HPP

#include <utility>

#include "relaxlab/densemat.hpp"

namespace relax {

/// Linear hyperbolic relaxation system U_t + A U_x = Q U / epsilon with an
/// explicit stiff-block rank r (stored, never inferred from Q).
struct RelaxationSystem {
  int m = 0;
  int r = 0;
  RealMatrix A;
  RealMatrix Q;
  double epsilon = 1.0;
};

/// Certificate for the structural stability condition: P block-diagonalizes
/// Q, A0 symmetrizes A, and Shat is the stiff block of P Q P^{-1}.
struct StabilityCertificate {
  RealMatrix P;
  RealMatrix A0;
  RealMatrix Shat;  // r x r
};

struct FlagResidual {
  bool pass = false;
  double residual = 0.0;
};

struct StabilityReport {
  FlagResidual condI;          // P Q = diag(0, Shat) P with Shat invertible
  FlagResidual condII;         // A0 SPD and A0 A = A^T A0
  FlagResidual condIII;        // A0 Q + Q^T A0 <= -P^T diag(0, I_r) P
  FlagResidual blockDiagA0;    // P^{-T} A0 P^{-1} block diagonal
  FlagResidual shatSymNegDef;  // A02 Shat symmetric negative definite

  bool allPass() const {
    return condI.pass && condII.pass && condIII.pass && blockDiagA0.pass &&
           shatSymNegDef.pass;
  }
};

StabilityReport check_structural_stability(const RealMatrix& A, const RealMatrix& Q,
                                           const StabilityCertificate& cert, int r);

/// Similarity transform U -> P U: A' = P A P^{-1}, Q' = P Q P^{-1}.
RelaxationSystem transform(const RelaxationSystem& sys, const RealMatrix& P);

RealMatrix invert(const RealMatrix& m);  // throws SingularP

/// Linearized Broadwell system (m = 3, r = 1) with a derived certificate.
std::pair<RelaxationSystem, StabilityCertificate> builtin_broadwell(double epsilon);

/// Linearized moment system of order M >= 3 (m = M+1, r = M-2); A is the
/// sqrt-ladder tridiagonal matrix and Q = -diag(0,0,0,1,...,1). The identity
/// is a certificate.
std::pair<RelaxationSystem, StabilityCertificate> builtin_grad(int M, double epsilon);

/// Certificate construction for diagonalizable Q with a semisimple zero
/// eigenvalue: P from the left kernel of Q plus a row-space basis, A0 from
/// the linear symmetry/block-diagonality constraints, scaled until the
/// coupling inequality holds. Best-effort outside the built-in models.
StabilityCertificate derive_certificate(const RealMatrix& A, const RealMatrix& Q, int r);

/// Build a system from the plain-text matrix format.
RelaxationSystem load_system(const std::string& a_path, const std::string& q_path,
                             int r, double epsilon);

}  // namespace relax

#endif
