#ifndef RELAXLAB_LAB_HPP
#define RELAXLAB_LAB_HPP

#include <string>
#include <utility>
#include <vector>

#include "relaxlab/relaxsys.hpp"
#include "relaxlab/spectral.hpp"
#include "relaxlab/stepper.hpp"

namespace relax {

enum class LayerMode { Exact, Paper };
enum class ReferenceMode { Exact, FineStep };

struct ExperimentConfig {
  std::string model = "broadwell";  // "broadwell" or "grad:M"
  std::vector<std::string> schemes;
  double epsLo = 1e-7;
  double epsHi = 1.0;
  int epsCount = 15;
  double dtBase = 32.0;  // ladder: dt = dtBase/N^2 * 2^{-k}, k = 1..dtLevels
  int dtLevels = 6;
  int N = 40;
  double T0 = 1.0;
  double T = 2.0;
  ReferenceMode reference = ReferenceMode::Exact;
  LayerMode layer = LayerMode::Exact;
};

struct ErrorRow {
  std::string model;
  std::string scheme;
  double epsilon = 0.0;
  double dt = 0.0;
  double l2_error = 0.0;
  long long steps = 0;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
};

struct UniformRow {
  std::string scheme;
  double dt = 0.0;
  double maxError = 0.0;
};

struct OrderFit {
  std::string scheme;
  std::string epsilonLabel;  // numeric or "uniform"
  double slope = 0.0;
  double residual = 0.0;  // rms residual of the log-log fit
};

/// Built-in model factory; id is "broadwell" or "grad:M".
std::pair<RelaxationSystem, StabilityCertificate> make_model(const std::string& id,
                                                             double epsilon);

/// Projection of the model's printed initial data onto P_N.
ModalState initial_state(const std::string& model, int N);

/// Evolve past the initial layer: exactly (matrix exponential) or with the
/// bhr553s scheme at step 1e-5, the protocol the experiments use.
ModalState prepare_layer(const RelaxationSystem& system, const ModalState& state,
                         double T0, LayerMode mode);

ErrorTable convergence_study(const ExperimentConfig& cfg);

std::vector<UniformRow> uniform_error(const ErrorTable& table);

OrderFit fit_order(const std::vector<std::pair<double, double>>& pairs);

/// Epsilon grid used by convergence_study: epsCount log-spaced points with
/// exact endpoints.
std::vector<double> epsilon_grid(double lo, double hi, int count);

void write_csv(const ErrorTable& table, const std::string& path);
void write_uniform_csv(const std::vector<UniformRow>& rows, const std::string& path);
void write_fits_csv(const std::vector<OrderFit>& fits, const std::string& path);
ErrorTable read_error_table(const std::string& path);

/// Single run: layer preparation, integration to T, synthesis to a grid.
GridField run_single(const std::string& model, const std::string& scheme, double epsilon,
                     double dt, double t0, double t_end, int N, LayerMode layer);

}  // namespace relax

#endif
