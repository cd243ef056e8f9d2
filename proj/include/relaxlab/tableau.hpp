#ifndef RELAXLAB_TABLEAU_HPP
#define RELAXLAB_TABLEAU_HPP

#include <string>
#include <vector>

#include "relaxlab/densemat.hpp"

namespace relax {

/// Double Butcher tableau of an IMEX-RK scheme: the explicit matrix is
/// strictly lower triangular, the implicit one lower triangular with
/// non-negative diagonal; abscissae are the row sums.
struct Tableau {
  int s = 0;
  RealMatrix Hexp;  // s x s, strictly lower triangular
  RealMatrix Himp;  // s x s, lower triangular, diag >= 0
  std::vector<double> bexp;
  std::vector<double> bimp;
  std::vector<double> cexp;  // derived: row sums of Hexp
  std::vector<double> cimp;  // derived: row sums of Himp
  std::string name;
  int claimedOrder = 0;  // 0 = unknown / not from the registry
};

struct Classification {
  bool isCK = false;
  bool isARS = false;
  bool isISA = false;
  bool isGSA = false;
  bool cMatched = false;
};

struct ConditionEntry {
  std::string id;
  double residual = 0.0;
  double target = 0.0;
  bool pass = false;  // residual < 1e-12
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;

  double maxResidual() const;
  bool allPass() const;
  const ConditionEntry& find(const std::string& id) const;
};

struct MCertificate {
  RealMatrix M;
  double tol = kPsdTol;
};

struct MCheckReport {
  bool m1Pass = false;
  bool m2Pass = false;
  EigenReport m1Eigen;  // spectrum of MH + (MH)^T
  EigenReport m2Eigen;  // spectrum of Mstar + Mstar^T
};

struct NullSpaceResult {
  bool pass = false;            // |v_s| <= 1e-12 * |v|
  std::vector<double> vector;   // generator of ker(Himp)
};

inline constexpr double kConditionTol = 1e-12;

/// Validates shapes, the triangular structure and the non-negative implicit
/// diagonal, then derives the abscissae.
Tableau new_tableau(const RealMatrix& Hexp, const RealMatrix& Himp,
                    const std::vector<double>& bexp, const std::vector<double>& bimp);

Classification classify(const Tableau& t);

/// Residuals of the order conditions up to order p (1, 2 or 3), every
/// mixed explicit/implicit combination included.
ConditionReport order_residuals(const Tableau& t, int p);

/// Stage-order residuals for i = 3..s plus the vanishing-coefficient
/// quantities |b~_2| and max_i |h_{i,2}|. Requires s >= 3.
ConditionReport stage_conditions(const Tableau& t);

/// M* = M L + C with L zero in the first row, -1 down the first column and
/// the identity elsewhere, and C carrying +1 at (1,1) and -1 at (s,s).
RealMatrix mstar(const RealMatrix& m);

/// Semidefiniteness-and-rank checks of the energy-method certificate:
/// MH + (MH)^T and M* + M*^T must be PSD of rank s-1.
MCheckReport check_M(const Tableau& t, const MCertificate& cert);

/// Generator of the null space of the implicit matrix; passes when its last
/// component vanishes. Throws NullityMismatch when the nullity is not 1.
NullSpaceResult assumption_H(const Tableau& t);

std::vector<std::string> registry_names();

/// Built-in schemes: ars111, ars222, ars443, bhr553s. Each registered
/// tableau re-validates its structure and claimed order on construction.
Tableau registry(const std::string& name);

/// Plain-text tableau format: line 1 holds s, then s rows of the explicit
/// matrix, s rows of the implicit matrix, one line of explicit weights and
/// one line of implicit weights.
Tableau load_tableau_file(const std::string& path);

}  // namespace relax

#endif
