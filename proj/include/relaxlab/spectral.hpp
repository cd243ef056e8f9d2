#ifndef RELAXLAB_SPECTRAL_HPP
#define RELAXLAB_SPECTRAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "relaxlab/densemat.hpp"

namespace relax {

/// Fourier coefficients u_k for k = 0..N per component; negative modes are
/// implied by conjugate symmetry, so the represented field is real.
struct ModalState {
  int m = 0;
  int N = 0;
  std::vector<cplx> coef;  // component-major, m * (N+1)

  ModalState() = default;
  ModalState(int m_, int N_) : m(m_), N(N_), coef(static_cast<size_t>(m_) * (N_ + 1)) {}

  cplx& at(int comp, int k) { return coef[static_cast<size_t>(comp) * (N + 1) + k]; }
  cplx at(int comp, int k) const { return coef[static_cast<size_t>(comp) * (N + 1) + k]; }
};

/// Equispaced samples on [-pi, pi), 2N+2 points per component.
struct GridField {
  int m = 0;
  std::vector<double> x;
  std::vector<double> values;  // component-major, m * x.size()

  double at(int comp, int j) const { return values[static_cast<size_t>(comp) * x.size() + j]; }
};

/// Trapezoid-rule projection onto span{e^{ikx} : |k| <= N}; exact for
/// trigonometric polynomials of degree <= N.
ModalState project(const std::vector<std::function<double(double)>>& components, int N);

GridField synthesize(const ModalState& state);

/// Parseval L2 norm over [-pi, pi], negative modes counted by symmetry.
double l2_norm(const ModalState& state);

/// Weighted variant: sqrt(2 pi sum_k w(u_k, u_k)) with w the given SPD
/// component weight; used for the energy-norm stability diagnostics.
double l2_norm(const ModalState& state, const RealMatrix& weight);

double modal_error(const ModalState& a, const ModalState& b);

/// Spectral derivative: multiplies u_k by ik.
ModalState derivative(const ModalState& state);

/// CSV dump with header x,comp1,...,compm.
void write_grid_csv(const GridField& field, const std::string& path);

}  // namespace relax

#endif
