#include "relaxlab/stepper.hpp"

#include <cmath>

namespace relax {

StepPlan::StepPlan(RelaxationSystem system, Tableau tableau, double dt)
    : system_(std::move(system)), tableau_(std::move(tableau)), dt_(dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "plan: dt must be positive");
  if (system_.Q.rows() != system_.m || system_.A.rows() != system_.m)
    throw Error(ErrorCode::ShapeMismatch, "plan: system matrices inconsistent");
  mu_ = dt_ / system_.epsilon;

  for (int i = 0; i < tableau_.s; ++i) {
    double h = tableau_.Himp(i, i);
    if (h == 0.0) continue;
    bool seen = false;
    for (const auto& [hv, f] : factors_) {
      if (hv == h) { seen = true; break; }
    }
    if (seen) continue;
    RealMatrix mat = RealMatrix::identity(system_.m) - (mu_ * h) * system_.Q;
    try {
      factors_.emplace_back(h, std::make_shared<RealLu>(mat));
    } catch (const Error& err) {
      if (err.code() == ErrorCode::SingularMatrix)
        throw Error(ErrorCode::SingularStageMatrix,
                    "stage matrix I - mu*h*Q is singular (h = " + std::to_string(h) + ")");
      throw;
    }
    // reconstruction probe: the cached factor must solve to roundoff
    std::vector<double> ones(system_.m, 1.0);
    std::vector<double> x = factors_.back().second->solve(ones);
    std::vector<double> back = mat * x;
    double res = 0.0;
    for (int j = 0; j < system_.m; ++j) res = std::max(res, std::abs(back[j] - 1.0));
    if (res > 1e-12 * (1.0 + mat.maxAbs()))
      throw Error(ErrorCode::SingularStageMatrix,
                  "stage factor reconstruction residual too large");
  }
}

const RealLu* StepPlan::factorFor(double h) const {
  if (h == 0.0) return nullptr;
  for (const auto& [hv, f] : factors_)
    if (hv == h) return f.get();
  throw Error(ErrorCode::Internal, "no cached factor for diagonal entry");
}

namespace {

/// Per-mode stage values plus their advection and relaxation images.
struct StageWorkspace {
  std::vector<cplx> u;                     // current mode coefficients
  std::vector<std::vector<cplx>> stages;   // U^(i)
  std::vector<std::vector<cplx>> adv;      // ik A U^(i)
  std::vector<std::vector<cplx>> rel;      // Q U^(i)
  std::vector<cplx> rhs;

  StageWorkspace(int m, int s)
      : u(m), stages(s, std::vector<cplx>(m)), adv(s, std::vector<cplx>(m)),
        rel(s, std::vector<cplx>(m)), rhs(m) {}
};

void step_in_place(const StepPlan& plan, StageWorkspace& ws, ModalState& state) {
  const RelaxationSystem& sys = plan.system();
  const Tableau& tab = plan.tableau();
  const int m = sys.m;
  const int s = tab.s;
  const double dt = plan.dt();
  const double mu = plan.mu();

  for (int k = 0; k <= state.N; ++k) {
    for (int comp = 0; comp < m; ++comp) ws.u[comp] = state.at(comp, k);

    for (int i = 0; i < s; ++i) {
      for (int comp = 0; comp < m; ++comp) ws.rhs[comp] = ws.u[comp];
      for (int j = 0; j < i; ++j) {
        double ht = tab.Hexp(i, j);
        if (ht != 0.0) {
          double f = dt * ht;
          for (int comp = 0; comp < m; ++comp) ws.rhs[comp] -= f * ws.adv[j][comp];
        }
        double h = tab.Himp(i, j);
        if (h != 0.0) {
          double f = mu * h;
          for (int comp = 0; comp < m; ++comp) ws.rhs[comp] += f * ws.rel[j][comp];
        }
      }
      const RealLu* lu = plan.factorFor(tab.Himp(i, i));
      if (lu) lu->solveInPlace(ws.rhs.data());
      ws.stages[i] = ws.rhs;

      // images: adv = ik A U, rel = Q U
      for (int row = 0; row < m; ++row) {
        cplx a_acc(0.0, 0.0), q_acc(0.0, 0.0);
        for (int col = 0; col < m; ++col) {
          a_acc += sys.A(row, col) * ws.stages[i][col];
          q_acc += sys.Q(row, col) * ws.stages[i][col];
        }
        ws.adv[i][row] = cplx(0.0, static_cast<double>(k)) * a_acc;
        ws.rel[i][row] = q_acc;
      }
    }

    for (int j = 0; j < s; ++j) {
      double bt = tab.bexp[j];
      if (bt != 0.0) {
        double f = dt * bt;
        for (int comp = 0; comp < m; ++comp) ws.u[comp] -= f * ws.adv[j][comp];
      }
      double b = tab.bimp[j];
      if (b != 0.0) {
        double f = mu * b;
        for (int comp = 0; comp < m; ++comp) ws.u[comp] += f * ws.rel[j][comp];
      }
    }
    for (int comp = 0; comp < m; ++comp) state.at(comp, k) = ws.u[comp];
  }
}

}  // namespace

ModalState step(const StepPlan& plan, const ModalState& state) {
  if (state.m != plan.system().m)
    throw Error(ErrorCode::ShapeMismatch, "step: state/system dimension mismatch");
  ModalState out = state;
  StageWorkspace ws(plan.system().m, plan.tableau().s);
  step_in_place(plan, ws, out);
  return out;
}

ModalState integrate(const StepPlan& plan, ModalState state, double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "integrate: T must be positive");
  if (state.m != plan.system().m)
    throw Error(ErrorCode::ShapeMismatch, "integrate: state/system dimension mismatch");
  double ratio = T / plan.dt();
  long long n = std::llround(ratio);
  if (n < 1 || std::abs(static_cast<double>(n) * plan.dt() - T) > 1e-9 * T)
    throw Error(ErrorCode::NonCommensurateInterval,
                "integrate: T is not an integer multiple of dt");
  StageWorkspace ws(plan.system().m, plan.tableau().s);
  for (long long i = 0; i < n; ++i) step_in_place(plan, ws, state);
  return state;
}

ModalState exact_evolve(const RelaxationSystem& system, const ModalState& state, double t) {
  if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "exact_evolve: t must be >= 0");
  if (state.m != system.m)
    throw Error(ErrorCode::ShapeMismatch, "exact_evolve: dimension mismatch");
  if (t == 0.0) return state;

  const int m = system.m;
  ModalState out = state;
  std::vector<cplx> u(m);
  for (int k = 0; k <= state.N; ++k) {
    ComplexMatrix gen(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        gen(i, j) = cplx(system.Q(i, j) / system.epsilon, -k * system.A(i, j));
    ComplexMatrix e = expm(gen, t);
    for (int comp = 0; comp < m; ++comp) u[comp] = state.at(comp, k);
    std::vector<cplx> v = e * u;
    for (int comp = 0; comp < m; ++comp) out.at(comp, k) = v[comp];
  }
  return out;
}

}  // namespace relax
