#ifndef RELAXLAB_STEPPER_HPP
#define RELAXLAB_STEPPER_HPP

#include <memory>
#include <vector>

#include "relaxlab/relaxsys.hpp"
#include "relaxlab/spectral.hpp"
#include "relaxlab/tableau.hpp"

namespace relax {

/// Immutable per-(system, tableau, dt) plan holding mu = dt/epsilon and an
/// LU factor of (I - mu h Q) for every distinct positive implicit diagonal
/// entry. Factors are real; complex stage solves reuse them on the real and
/// imaginary parts.
class StepPlan {
public:
  StepPlan(RelaxationSystem system, Tableau tableau, double dt);

  const RelaxationSystem& system() const { return system_; }
  const Tableau& tableau() const { return tableau_; }
  double dt() const { return dt_; }
  double mu() const { return mu_; }

  /// Factor for diagonal entry h, or nullptr when h == 0 (explicit stage).
  const RealLu* factorFor(double h) const;

private:
  RelaxationSystem system_;
  Tableau tableau_;
  double dt_ = 0.0;
  double mu_ = 0.0;
  std::vector<std::pair<double, std::shared_ptr<RealLu>>> factors_;
};

/// One IMEX-RK step of the Fourier-Galerkin semi-discretization, every mode
/// advanced independently with D_k = ik A.
ModalState step(const StepPlan& plan, const ModalState& state);

/// n = round(T/dt) steps; T must be commensurate with dt to 1e-9 relative.
ModalState integrate(const StepPlan& plan, ModalState state, double T);

/// Exact solution operator: per mode, u_k(t) = exp(t(-ikA + Q/eps)) u_k(0).
ModalState exact_evolve(const RelaxationSystem& system, const ModalState& state, double t);

}  // namespace relax

#endif
