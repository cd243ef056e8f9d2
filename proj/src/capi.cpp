#include "relaxlab.h"

#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>

#include "relaxlab/lab.hpp"

namespace {

thread_local std::string g_last_error;

rl_status code_to_status(relax::ErrorCode code) {
  using relax::ErrorCode;
  switch (code) {
    case ErrorCode::ShapeMismatch: return RL_ERR_SHAPE_MISMATCH;
    case ErrorCode::SingularMatrix: return RL_ERR_SINGULAR_MATRIX;
    case ErrorCode::NotSymmetric: return RL_ERR_NOT_SYMMETRIC;
    case ErrorCode::Overflow: return RL_ERR_OVERFLOW;
    case ErrorCode::StructureViolation: return RL_ERR_STRUCTURE_VIOLATION;
    case ErrorCode::TooFewStages: return RL_ERR_TOO_FEW_STAGES;
    case ErrorCode::UnknownScheme: return RL_ERR_UNKNOWN_SCHEME;
    case ErrorCode::NullityMismatch: return RL_ERR_NULLITY_MISMATCH;
    case ErrorCode::SingularP: return RL_ERR_SINGULAR_P;
    case ErrorCode::BadMomentOrder: return RL_ERR_BAD_MOMENT_ORDER;
    case ErrorCode::UnknownModel: return RL_ERR_UNKNOWN_MODEL;
    case ErrorCode::SingularStageMatrix: return RL_ERR_SINGULAR_STAGE_MATRIX;
    case ErrorCode::NonCommensurateInterval: return RL_ERR_NON_COMMENSURATE;
    case ErrorCode::EmptyTable: return RL_ERR_EMPTY_TABLE;
    case ErrorCode::DegenerateFit: return RL_ERR_DEGENERATE_FIT;
    case ErrorCode::IoFailure: return RL_ERR_IO;
    case ErrorCode::InvalidArgument: return RL_ERR_INVALID_ARGUMENT;
    case ErrorCode::Internal: return RL_ERR_INTERNAL;
  }
  return RL_ERR_INTERNAL;
}

template <typename Fn>
rl_status guarded(Fn&& fn) {
  try {
    fn();
    return RL_OK;
  } catch (const relax::Error& err) {
    g_last_error = err.what();
    return code_to_status(err.code());
  } catch (const std::exception& ex) {
    g_last_error = ex.what();
    return RL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RL_ERR_INTERNAL;
  }
}

rl_status invalid(const char* what) {
  g_last_error = what;
  return RL_ERR_INVALID_ARGUMENT;
}

relax::LayerMode parse_layer(const char* mode) {
  std::string s = mode ? mode : "exact";
  if (s == "exact") return relax::LayerMode::Exact;
  if (s == "paper") return relax::LayerMode::Paper;
  throw relax::Error(relax::ErrorCode::InvalidArgument,
                     "layer mode must be 'exact' or 'paper'");
}

relax::ReferenceMode parse_reference(const char* mode) {
  std::string s = mode ? mode : "exact";
  if (s == "exact") return relax::ReferenceMode::Exact;
  if (s == "fine") return relax::ReferenceMode::FineStep;
  throw relax::Error(relax::ErrorCode::InvalidArgument,
                     "reference must be 'exact' or 'fine'");
}

std::vector<std::string> split_csv_list(const char* list) {
  std::vector<std::string> out;
  if (!list) return out;
  std::istringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

struct rl_tableau {
  relax::Tableau impl;
};

struct rl_system {
  relax::RelaxationSystem sys;
  relax::StabilityCertificate cert;
};

extern "C" {

const char* rl_status_name(rl_status status) {
  switch (status) {
    case RL_OK: return "ok";
    case RL_ERR_SHAPE_MISMATCH: return "shape-mismatch";
    case RL_ERR_SINGULAR_MATRIX: return "singular-matrix";
    case RL_ERR_NOT_SYMMETRIC: return "not-symmetric";
    case RL_ERR_OVERFLOW: return "overflow";
    case RL_ERR_STRUCTURE_VIOLATION: return "structure-violation";
    case RL_ERR_TOO_FEW_STAGES: return "too-few-stages";
    case RL_ERR_UNKNOWN_SCHEME: return "unknown-scheme";
    case RL_ERR_NULLITY_MISMATCH: return "nullity-mismatch";
    case RL_ERR_SINGULAR_P: return "singular-p";
    case RL_ERR_BAD_MOMENT_ORDER: return "bad-moment-order";
    case RL_ERR_UNKNOWN_MODEL: return "unknown-model";
    case RL_ERR_SINGULAR_STAGE_MATRIX: return "singular-stage-matrix";
    case RL_ERR_NON_COMMENSURATE: return "non-commensurate-interval";
    case RL_ERR_EMPTY_TABLE: return "empty-table";
    case RL_ERR_DEGENERATE_FIT: return "degenerate-fit";
    case RL_ERR_IO: return "io-failure";
    case RL_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case RL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rl_last_error(void) { return g_last_error.c_str(); }

const char* rl_version(void) { return "0.1.0"; }

int rl_registry_count(void) {
  return static_cast<int>(relax::registry_names().size());
}

const char* rl_registry_name(int index) {
  static const std::vector<std::string> names = relax::registry_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[static_cast<size_t>(index)].c_str();
}

rl_status rl_tableau_registry(const char* name, rl_tableau** out) {
  if (!name || !out) return invalid("rl_tableau_registry: null argument");
  return guarded([&] { *out = new rl_tableau{relax::registry(name)}; });
}

rl_status rl_tableau_from_file(const char* path, rl_tableau** out) {
  if (!path || !out) return invalid("rl_tableau_from_file: null argument");
  return guarded([&] { *out = new rl_tableau{relax::load_tableau_file(path)}; });
}

void rl_tableau_free(rl_tableau* tableau) { delete tableau; }

int rl_tableau_stages(const rl_tableau* tableau) { return tableau ? tableau->impl.s : 0; }

const char* rl_tableau_name(const rl_tableau* tableau) {
  return tableau ? tableau->impl.name.c_str() : nullptr;
}

rl_status rl_tableau_classify(const rl_tableau* tableau, rl_classification* out) {
  if (!tableau || !out) return invalid("rl_tableau_classify: null argument");
  return guarded([&] {
    relax::Classification cl = relax::classify(tableau->impl);
    out->is_ck = cl.isCK;
    out->is_ars = cl.isARS;
    out->is_isa = cl.isISA;
    out->is_gsa = cl.isGSA;
    out->c_matched = cl.cMatched;
  });
}

rl_status rl_tableau_order_residuals(const rl_tableau* tableau, int order,
                                     rl_condition_cb cb, void* user) {
  if (!tableau || !cb) return invalid("rl_tableau_order_residuals: null argument");
  return guarded([&] {
    relax::ConditionReport rep = relax::order_residuals(tableau->impl, order);
    for (const auto& e : rep.entries) cb(e.id.c_str(), e.residual, e.pass, user);
  });
}

rl_status rl_tableau_stage_conditions(const rl_tableau* tableau, rl_condition_cb cb,
                                      void* user) {
  if (!tableau || !cb) return invalid("rl_tableau_stage_conditions: null argument");
  return guarded([&] {
    relax::ConditionReport rep = relax::stage_conditions(tableau->impl);
    for (const auto& e : rep.entries) cb(e.id.c_str(), e.residual, e.pass, user);
  });
}

rl_status rl_system_broadwell(double epsilon, rl_system** out) {
  if (!out) return invalid("rl_system_broadwell: null argument");
  return guarded([&] {
    auto [sys, cert] = relax::builtin_broadwell(epsilon);
    *out = new rl_system{std::move(sys), std::move(cert)};
  });
}

rl_status rl_system_grad(int moment_order, double epsilon, rl_system** out) {
  if (!out) return invalid("rl_system_grad: null argument");
  return guarded([&] {
    auto [sys, cert] = relax::builtin_grad(moment_order, epsilon);
    *out = new rl_system{std::move(sys), std::move(cert)};
  });
}

rl_status rl_system_from_files(const char* a_path, const char* q_path, int stiff_rank,
                               double epsilon, const char* p_path, const char* a0_path,
                               rl_system** out) {
  if (!a_path || !q_path || !out) return invalid("rl_system_from_files: null argument");
  if ((p_path == nullptr) != (a0_path == nullptr))
    return invalid("rl_system_from_files: pass both P and A0 files or neither");
  return guarded([&] {
    relax::RelaxationSystem sys = relax::load_system(a_path, q_path, stiff_rank, epsilon);
    relax::StabilityCertificate cert;
    if (p_path) {
      cert.P = relax::read_matrix_file(p_path);
      cert.A0 = relax::read_matrix_file(a0_path);
      if (!cert.P.square() || cert.P.rows() != sys.m || !cert.A0.square() ||
          cert.A0.rows() != sys.m)
        throw relax::Error(relax::ErrorCode::ShapeMismatch,
                           "certificate matrices must be m x m");
      relax::RealMatrix pqp = cert.P * sys.Q * relax::invert(cert.P);
      cert.Shat = pqp.block(sys.m - sys.r, sys.m - sys.r, sys.r, sys.r);
    } else {
      cert = relax::derive_certificate(sys.A, sys.Q, sys.r);
    }
    *out = new rl_system{std::move(sys), std::move(cert)};
  });
}

void rl_system_free(rl_system* system) { delete system; }

int rl_system_dim(const rl_system* system) { return system ? system->sys.m : 0; }

int rl_system_stiff_rank(const rl_system* system) { return system ? system->sys.r : 0; }

rl_status rl_system_check(const rl_system* system, rl_stability_report* out) {
  if (!system || !out) return invalid("rl_system_check: null argument");
  return guarded([&] {
    relax::StabilityReport rep =
        relax::check_structural_stability(system->sys.A, system->sys.Q, system->cert,
                                          system->sys.r);
    out->cond_i_pass = rep.condI.pass;
    out->cond_ii_pass = rep.condII.pass;
    out->cond_iii_pass = rep.condIII.pass;
    out->block_diag_pass = rep.blockDiagA0.pass;
    out->shat_pass = rep.shatSymNegDef.pass;
    out->cond_i_residual = rep.condI.residual;
    out->cond_ii_residual = rep.condII.residual;
    out->cond_iii_residual = rep.condIII.residual;
    out->block_diag_residual = rep.blockDiagA0.residual;
    out->shat_residual = rep.shatSymNegDef.residual;
  });
}

rl_status rl_run(const rl_run_config* config) {
  if (!config || !config->model || !config->scheme || !config->out_path)
    return invalid("rl_run: null argument");
  return guarded([&] {
    relax::GridField field =
        relax::run_single(config->model, config->scheme, config->epsilon, config->dt,
                          config->t0, config->t_end, config->modes,
                          parse_layer(config->layer_mode));
    relax::write_grid_csv(field, config->out_path);
  });
}

rl_status rl_converge(const rl_converge_config* config) {
  if (!config || !config->model || !config->schemes || !config->out_path)
    return invalid("rl_converge: null argument");
  return guarded([&] {
    relax::ExperimentConfig cfg;
    cfg.model = config->model;
    cfg.schemes = split_csv_list(config->schemes);
    cfg.epsLo = config->eps_lo;
    cfg.epsHi = config->eps_hi;
    cfg.epsCount = config->eps_count;
    cfg.dtBase = config->dt_base;
    cfg.dtLevels = config->dt_levels;
    cfg.N = config->modes;
    cfg.T0 = config->t0;
    cfg.T = config->t_end;
    cfg.reference = parse_reference(config->reference);
    cfg.layer = parse_layer(config->layer_mode);

    relax::ErrorTable table = relax::convergence_study(cfg);
    relax::write_csv(table, config->out_path);

    if (config->uniform_out_path || config->fits_out_path) {
      auto uniform = relax::uniform_error(table);
      if (config->uniform_out_path)
        relax::write_uniform_csv(uniform, config->uniform_out_path);
      if (config->fits_out_path) {
        std::vector<relax::OrderFit> fits;
        for (const auto& scheme : cfg.schemes) {
          // per-epsilon fits, eps ascending
          std::vector<double> eps_seen;
          for (const auto& row : table.rows) {
            if (row.scheme != scheme) continue;
            bool seen = false;
            for (double e : eps_seen) seen = seen || e == row.epsilon;
            if (!seen) eps_seen.push_back(row.epsilon);
          }
          for (double eps : eps_seen) {
            std::vector<std::pair<double, double>> pairs;
            for (const auto& row : table.rows)
              if (row.scheme == scheme && row.epsilon == eps)
                pairs.emplace_back(row.dt, row.l2_error);
            relax::OrderFit fit = relax::fit_order(pairs);
            fit.scheme = scheme;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", eps);
            fit.epsilonLabel = buf;
            fits.push_back(std::move(fit));
          }
          std::vector<std::pair<double, double>> upairs;
          for (const auto& u : uniform)
            if (u.scheme == scheme) upairs.emplace_back(u.dt, u.maxError);
          relax::OrderFit ufit = relax::fit_order(upairs);
          ufit.scheme = scheme;
          ufit.epsilonLabel = "uniform";
          fits.push_back(std::move(ufit));
        }
        relax::write_fits_csv(fits, config->fits_out_path);
      }
    }
  });
}

}  // extern "C"
