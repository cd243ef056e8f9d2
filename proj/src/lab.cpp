#include "relaxlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace relax {

namespace {

constexpr double kLayerStep = 1e-5;

struct ModelId {
  bool grad = false;
  int order = 0;
};

ModelId parse_model(const std::string& id) {
  if (id == "broadwell") return {false, 0};
  if (id.rfind("grad:", 0) == 0) {
    int order = 0;
    try {
      order = std::stoi(id.substr(5));
    } catch (...) {
      throw Error(ErrorCode::UnknownModel, "bad moment order in model id: " + id);
    }
    return {true, order};
  }
  throw Error(ErrorCode::UnknownModel, "unknown model: " + id);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::pair<RelaxationSystem, StabilityCertificate> make_model(const std::string& id,
                                                             double epsilon) {
  ModelId mid = parse_model(id);
  if (mid.grad) return builtin_grad(mid.order, epsilon);
  return builtin_broadwell(epsilon);
}

ModalState initial_state(const std::string& model, int N) {
  ModelId mid = parse_model(model);
  if (!mid.grad) {
    if (N < 4)
      throw Error(ErrorCode::InvalidArgument,
                  "broadwell initial data needs N >= 4 to be band-limited exact");
    auto rho = [](double x) { return 0.5 + 0.3 * std::sin(2.0 * x); };
    std::vector<std::function<double(double)>> comps = {
        rho,
        [rho](double x) { return rho(x) * (0.5 + 0.05 * std::cos(2.0 * x)); },
        [rho](double x) { return 0.5 * rho(x); },
    };
    return project(comps, N);
  }

  if (mid.order < 3) throw Error(ErrorCode::BadMomentOrder, "moment order must be >= 3");
  if (N < 2)
    throw Error(ErrorCode::InvalidArgument,
                "grad initial data needs N >= 2 to be band-limited exact");
  int m = mid.order + 1;
  std::vector<std::function<double(double)>> comps;
  comps.emplace_back([](double x) { return std::sin(2.0 * x) + 1.1; });  // rho
  comps.emplace_back([](double) { return 0.0; });                        // w
  comps.emplace_back([](double) { return 1.0; });  // theta/sqrt(2) with theta = sqrt(2)
  for (int i = 3; i < m; ++i) comps.emplace_back([](double) { return 0.0; });
  return project(comps, N);
}

ModalState prepare_layer(const RelaxationSystem& system, const ModalState& state,
                         double T0, LayerMode mode) {
  if (T0 < 0.0) throw Error(ErrorCode::InvalidArgument, "prepare_layer: T0 must be >= 0");
  if (T0 == 0.0) return state;
  if (mode == LayerMode::Exact) return exact_evolve(system, state, T0);
  StepPlan plan(system, registry("bhr553s"), kLayerStep);
  return integrate(plan, state, T0);
}

std::vector<double> epsilon_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > 0.0) || hi < lo)
    throw Error(ErrorCode::InvalidArgument, "epsilon grid: need 0 < lo <= hi");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "epsilon grid: count >= 1");
  std::vector<double> eps(count);
  if (count == 1) {
    eps[0] = lo;
    return eps;
  }
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    if (i == 0) eps[i] = lo;
    else if (i == count - 1) eps[i] = hi;
    else eps[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  }
  return eps;
}

ErrorTable convergence_study(const ExperimentConfig& cfg) {
  if (!(cfg.T > cfg.T0) || cfg.T0 < 0.0)
    throw Error(ErrorCode::InvalidArgument, "config: need T > T0 >= 0");
  if (cfg.dtLevels < 1 || cfg.N < 1 || !(cfg.dtBase > 0.0))
    throw Error(ErrorCode::InvalidArgument, "config: bad dt ladder");
  if (cfg.schemes.empty())
    throw Error(ErrorCode::InvalidArgument, "config: no schemes given");

  std::vector<std::string> schemes;
  for (const auto& s : cfg.schemes)
    if (std::find(schemes.begin(), schemes.end(), s) == schemes.end())
      schemes.push_back(s);

  std::vector<double> eps_raw = epsilon_grid(cfg.epsLo, cfg.epsHi, cfg.epsCount);
  std::vector<double> eps;
  for (double e : eps_raw)
    if (std::find(eps.begin(), eps.end(), e) == eps.end()) eps.push_back(e);

  std::vector<double> dts(cfg.dtLevels);
  for (int k = 1; k <= cfg.dtLevels; ++k)
    dts[k - 1] = cfg.dtBase / (static_cast<double>(cfg.N) * cfg.N) * std::ldexp(1.0, -k);

  const double horizon = cfg.T - cfg.T0;
  ModalState init = initial_state(cfg.model, cfg.N);

  // results keyed by (scheme index, eps index, dt index)
  std::map<std::tuple<size_t, size_t, size_t>, ErrorRow> cells;

  for (size_t ei = 0; ei < eps.size(); ++ei) {
    RelaxationSystem sys = make_model(cfg.model, eps[ei]).first;
    ModalState layered = prepare_layer(sys, init, cfg.T0, cfg.layer);

    ModalState reference(0, 0);
    if (cfg.reference == ReferenceMode::Exact) {
      reference = exact_evolve(sys, layered, horizon);
    } else {
      double fine_dt = dts.back() / 64.0;
      StepPlan fine_plan(sys, registry("bhr553s"), fine_dt);
      reference = integrate(fine_plan, layered, horizon);
    }

    for (size_t si = 0; si < schemes.size(); ++si) {
      Tableau tab = registry(schemes[si]);
      for (size_t di = 0; di < dts.size(); ++di) {
        double dt = dts[di];
        try {
          StepPlan plan(sys, tab, dt);
          ModalState final_state = integrate(plan, layered, horizon);
          ErrorRow row;
          row.model = cfg.model;
          row.scheme = schemes[si];
          row.epsilon = eps[ei];
          row.dt = dt;
          row.l2_error = modal_error(final_state, reference);
          row.steps = std::llround(horizon / dt);
          cells[{si, ei, di}] = std::move(row);
        } catch (const Error& err) {
          std::ostringstream msg;
          msg << "cell (scheme " << schemes[si] << ", eps " << format_double(eps[ei])
              << ", dt " << format_double(dt) << ") failed: " << err.what();
          throw Error(err.code(), msg.str());
        }
      }
    }
  }

  // deterministic row order: scheme, then eps ascending, then dt descending
  ErrorTable table;
  for (size_t si = 0; si < schemes.size(); ++si)
    for (size_t ei = 0; ei < eps.size(); ++ei)
      for (size_t di = 0; di < dts.size(); ++di)
        table.rows.push_back(cells.at({si, ei, di}));
  return table;
}

std::vector<UniformRow> uniform_error(const ErrorTable& table) {
  if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, "uniform_error: empty table");
  std::vector<UniformRow> out;
  auto find = [&](const std::string& scheme, double dt) -> UniformRow* {
    for (auto& r : out)
      if (r.scheme == scheme && r.dt == dt) return &r;
    return nullptr;
  };
  for (const auto& row : table.rows) {
    UniformRow* u = find(row.scheme, row.dt);
    if (!u) {
      out.push_back({row.scheme, row.dt, row.l2_error});
    } else {
      u->maxError = std::max(u->maxError, row.l2_error);
    }
  }
  return out;
}

OrderFit fit_order(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [dt, err] : pairs) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "fit_order: dt must be > 0");
    if (err > 0.0) usable.emplace_back(dt, err);
  }
  if (usable.size() < 2)
    throw Error(ErrorCode::DegenerateFit, "fit_order: need >= 2 pairs with positive error");
  for (size_t i = 0; i < usable.size(); ++i)
    for (size_t j = i + 1; j < usable.size(); ++j)
      if (usable[i].first == usable[j].first)
        throw Error(ErrorCode::DegenerateFit, "fit_order: duplicate dt values");

  double n = static_cast<double>(usable.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [dt, err] : usable) {
    double x = std::log(dt), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error(ErrorCode::DegenerateFit, "fit_order: degenerate abscissae");
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (const auto& [dt, err] : usable) {
    double resid = std::log(err) - (slope * std::log(dt) + intercept);
    ss += resid * resid;
  }
  OrderFit fit;
  fit.slope = slope;
  fit.residual = std::sqrt(ss / n);
  return fit;
}

void write_csv(const ErrorTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  out << "model,scheme,epsilon,dt,l2_error,steps\n";
  for (const auto& r : table.rows) {
    out << r.model << "," << r.scheme << "," << format_double(r.epsilon) << ","
        << format_double(r.dt) << "," << format_double(r.l2_error) << "," << r.steps
        << "\n";
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

void write_uniform_csv(const std::vector<UniformRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  out << "scheme,dt,max_l2_error\n";
  for (const auto& r : rows)
    out << r.scheme << "," << format_double(r.dt) << "," << format_double(r.maxError)
        << "\n";
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

void write_fits_csv(const std::vector<OrderFit>& fits, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  out << "scheme,epsilon,slope,residual\n";
  for (const auto& f : fits)
    out << f.scheme << "," << f.epsilonLabel << "," << format_double(f.slope) << ","
        << format_double(f.residual) << "\n";
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

ErrorTable read_error_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "model,scheme,epsilon,dt,l2_error,steps")
    throw Error(ErrorCode::IoFailure, "bad error-table header in " + path);
  ErrorTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ErrorRow row;
    std::string field;
    auto next = [&]() {
      if (!std::getline(ss, field, ','))
        throw Error(ErrorCode::IoFailure, "short row in " + path);
      return field;
    };
    row.model = next();
    row.scheme = next();
    row.epsilon = std::stod(next());
    row.dt = std::stod(next());
    row.l2_error = std::stod(next());
    row.steps = std::stoll(next());
    table.rows.push_back(std::move(row));
  }
  return table;
}

GridField run_single(const std::string& model, const std::string& scheme, double epsilon,
                     double dt, double t0, double t_end, int N, LayerMode layer) {
  if (!(t_end > t0)) throw Error(ErrorCode::InvalidArgument, "run: need t > t0");
  RelaxationSystem sys = make_model(model, epsilon).first;
  ModalState state = initial_state(model, N);
  state = prepare_layer(sys, state, t0, layer);
  StepPlan plan(sys, registry(scheme), dt);
  state = integrate(plan, state, t_end - t0);
  return synthesize(state);
}

}  // namespace relax
