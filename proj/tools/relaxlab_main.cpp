// relaxlab command-line driver. Talks to the shared library exclusively
// through the C API in relaxlab.h; exit codes: 0 success, 2 failed
// computation, 3 configuration errors. Diagnostics go to stderr.
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relaxlab.h"

namespace {

int fail_runtime(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, rl_last_error());
  return 2;
}

struct ConditionPrinter {
  int structure_failures = 0;
};

void print_condition(const char* id, double residual, int pass, void* user) {
  (void)user;
  std::printf("  %-24s residual %.3e   %s\n", id, residual, pass ? "pass" : "fail");
}

int cmd_tableau_list() {
  int n = rl_registry_count();
  for (int i = 0; i < n; ++i) std::printf("%s\n", rl_registry_name(i));
  return 0;
}

int cmd_tableau_verify(const std::string& name_or_file) {
  rl_tableau* tab = nullptr;
  rl_status st = rl_tableau_registry(name_or_file.c_str(), &tab);
  if (st == RL_ERR_UNKNOWN_SCHEME)
    st = rl_tableau_from_file(name_or_file.c_str(), &tab);
  if (st != RL_OK) {
    std::fprintf(stderr, "error: cannot load tableau '%s': %s\n", name_or_file.c_str(),
                 rl_last_error());
    return st == RL_ERR_STRUCTURE_VIOLATION ? 1 : 2;
  }

  std::printf("tableau: %s (s = %d)\n", rl_tableau_name(tab), rl_tableau_stages(tab));

  rl_classification cl;
  if (rl_tableau_classify(tab, &cl) != RL_OK) {
    rl_tableau_free(tab);
    return fail_runtime("classify");
  }
  std::printf("classification: CK %-3s ARS %-3s ISA %-3s GSA %-3s c-matched %s\n",
              cl.is_ck ? "yes" : "no", cl.is_ars ? "yes" : "no",
              cl.is_isa ? "yes" : "no", cl.is_gsa ? "yes" : "no",
              cl.c_matched ? "yes" : "no");

  std::printf("order conditions (p <= 3):\n");
  if (rl_tableau_order_residuals(tab, 3, print_condition, nullptr) != RL_OK) {
    rl_tableau_free(tab);
    return fail_runtime("order conditions");
  }

  if (rl_tableau_stages(tab) >= 3) {
    std::printf("stage/vanishing conditions:\n");
    if (rl_tableau_stage_conditions(tab, print_condition, nullptr) != RL_OK) {
      rl_tableau_free(tab);
      return fail_runtime("stage conditions");
    }
  }
  rl_tableau_free(tab);
  return 0;
}

void print_flag(const char* name, int pass, double residual) {
  std::printf("  %-16s %-4s residual %.3e\n", name, pass ? "pass" : "FAIL", residual);
}

int cmd_system_check(const std::string& spec, const std::string& a_file,
                     const std::string& q_file, int rank, double eps,
                     const std::string& p_file, const std::string& a0_file) {
  rl_system* sys = nullptr;
  rl_status st;
  if (!a_file.empty()) {
    st = rl_system_from_files(a_file.c_str(), q_file.c_str(), rank, eps,
                              p_file.empty() ? nullptr : p_file.c_str(),
                              a0_file.empty() ? nullptr : a0_file.c_str(), &sys);
  } else if (spec == "broadwell") {
    st = rl_system_broadwell(eps, &sys);
  } else if (spec.rfind("grad:", 0) == 0) {
    st = rl_system_grad(std::atoi(spec.c_str() + 5), eps, &sys);
  } else {
    std::fprintf(stderr, "error: unknown system '%s'\n", spec.c_str());
    return 3;
  }
  if (st != RL_OK) return fail_runtime("system construction");

  rl_stability_report rep;
  if (rl_system_check(sys, &rep) != RL_OK) {
    rl_system_free(sys);
    return fail_runtime("stability check");
  }
  std::printf("system: m = %d, stiff rank r = %d\n", rl_system_dim(sys),
              rl_system_stiff_rank(sys));
  print_flag("condition-i", rep.cond_i_pass, rep.cond_i_residual);
  print_flag("condition-ii", rep.cond_ii_pass, rep.cond_ii_residual);
  print_flag("condition-iii", rep.cond_iii_pass, rep.cond_iii_residual);
  print_flag("block-diag-a0", rep.block_diag_pass, rep.block_diag_residual);
  print_flag("a02-shat-negdef", rep.shat_pass, rep.shat_residual);
  bool all = rep.cond_i_pass && rep.cond_ii_pass && rep.cond_iii_pass &&
             rep.block_diag_pass && rep.shat_pass;
  std::printf("structural stability: %s\n", all ? "satisfied" : "NOT satisfied");
  rl_system_free(sys);
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX-RK schemes for linear hyperbolic relaxation systems"};
  app.require_subcommand(1);

  // tableau
  auto* tableau = app.add_subcommand("tableau", "inspect Butcher tableaux");
  tableau->require_subcommand(1);
  tableau->add_subcommand("list", "list registered schemes");
  auto* verify = tableau->add_subcommand("verify", "check structure and order conditions");
  std::string verify_target;
  verify->add_option("name", verify_target, "registry name or tableau file")->required();

  // system
  auto* system = app.add_subcommand("system", "relaxation systems");
  system->require_subcommand(1);
  auto* check = system->add_subcommand("check", "verify the structural stability condition");
  std::string sys_spec, a_file, q_file, p_file, a0_file;
  int sys_rank = 1;
  double sys_eps = 1.0;
  check->add_option("model", sys_spec, "broadwell or grad:M");
  check->add_option("--a-file", a_file, "advection matrix file");
  check->add_option("--q-file", q_file, "relaxation matrix file");
  check->add_option("--r", sys_rank, "stiff block rank");
  check->add_option("--eps", sys_eps, "relaxation parameter");
  check->add_option("--p-file", p_file, "certificate P file");
  check->add_option("--a0-file", a0_file, "certificate A0 file");

  // run
  auto* run = app.add_subcommand("run", "integrate one configuration and dump the grid");
  run->set_config("--config");
  std::string run_model = "broadwell", run_scheme = "ars222", run_layer = "exact",
              run_out;
  double run_eps = 1.0, run_dt = 0.01, run_t0 = 1.0, run_t = 2.0;
  int run_n = 40;
  run->add_option("--model", run_model, "broadwell or grad:M");
  run->add_option("--scheme", run_scheme, "registry scheme name");
  run->add_option("--eps", run_eps, "relaxation parameter");
  run->add_option("--dt", run_dt, "time step");
  run->add_option("--t0", run_t0, "layer end time");
  run->add_option("--t", run_t, "final time");
  run->add_option("--n", run_n, "Fourier cutoff N");
  run->add_option("--layer", run_layer, "layer mode: exact|paper");
  run->add_option("--out", run_out, "output grid CSV")->required();

  // converge
  auto* converge = app.add_subcommand("converge", "epsilon x dt convergence study");
  converge->set_config("--config");
  std::string cv_model = "broadwell", cv_schemes = "ars222,ars443,bhr553s",
              cv_ref = "exact", cv_layer = "exact", cv_out, cv_uniform_out, cv_fits_out;
  double cv_eps_lo = 1e-7, cv_eps_hi = 1.0, cv_t0 = 1.0, cv_t = 2.0, cv_dt_base = 32.0;
  int cv_eps_count = 15, cv_dt_levels = 6, cv_n = 40;
  converge->add_option("--model", cv_model, "broadwell or grad:M");
  converge->add_option("--schemes", cv_schemes, "comma-separated scheme names");
  converge->add_option("--eps-lo", cv_eps_lo, "smallest epsilon");
  converge->add_option("--eps-hi", cv_eps_hi, "largest epsilon");
  converge->add_option("--eps-count", cv_eps_count, "log-spaced epsilon count");
  converge->add_option("--dt-base", cv_dt_base, "dt ladder base (dt = base/N^2 * 2^-k)");
  converge->add_option("--dt-levels", cv_dt_levels, "dt ladder levels");
  converge->add_option("--n", cv_n, "Fourier cutoff N");
  converge->add_option("--t0", cv_t0, "layer end time");
  converge->add_option("--t", cv_t, "final time");
  converge->add_option("--ref", cv_ref, "reference: exact|fine");
  converge->add_option("--layer", cv_layer, "layer mode: exact|paper");
  converge->add_option("--out", cv_out, "error table CSV")->required();
  converge->add_option("--uniform-out", cv_uniform_out, "max-over-eps CSV");
  converge->add_option("--fits-out", cv_fits_out, "order-fit CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 3;
  }

  if (tableau->parsed()) {
    if (tableau->get_subcommand("list")->parsed()) return cmd_tableau_list();
    return cmd_tableau_verify(verify_target);
  }

  if (system->parsed()) {
    if ((a_file.empty()) != (q_file.empty())) {
      std::fprintf(stderr, "error: --a-file and --q-file go together\n");
      return 3;
    }
    if (sys_spec.empty() && a_file.empty()) {
      std::fprintf(stderr, "error: give a model name or --a-file/--q-file\n");
      return 3;
    }
    return cmd_system_check(sys_spec, a_file, q_file, sys_rank, sys_eps, p_file, a0_file);
  }

  if (run->parsed()) {
    rl_run_config cfg{};
    cfg.model = run_model.c_str();
    cfg.scheme = run_scheme.c_str();
    cfg.epsilon = run_eps;
    cfg.dt = run_dt;
    cfg.t0 = run_t0;
    cfg.t_end = run_t;
    cfg.modes = run_n;
    cfg.layer_mode = run_layer.c_str();
    cfg.out_path = run_out.c_str();
    rl_status st = rl_run(&cfg);
    if (st == RL_ERR_INVALID_ARGUMENT) {
      std::fprintf(stderr, "error: %s\n", rl_last_error());
      return 3;
    }
    if (st != RL_OK) return fail_runtime("run");
    std::fprintf(stderr, "wrote %s\n", run_out.c_str());
    return 0;
  }

  if (converge->parsed()) {
    rl_converge_config cfg{};
    cfg.model = cv_model.c_str();
    cfg.schemes = cv_schemes.c_str();
    cfg.eps_lo = cv_eps_lo;
    cfg.eps_hi = cv_eps_hi;
    cfg.eps_count = cv_eps_count;
    cfg.dt_base = cv_dt_base;
    cfg.dt_levels = cv_dt_levels;
    cfg.modes = cv_n;
    cfg.t0 = cv_t0;
    cfg.t_end = cv_t;
    cfg.reference = cv_ref.c_str();
    cfg.layer_mode = cv_layer.c_str();
    cfg.out_path = cv_out.c_str();
    cfg.uniform_out_path = cv_uniform_out.empty() ? nullptr : cv_uniform_out.c_str();
    cfg.fits_out_path = cv_fits_out.empty() ? nullptr : cv_fits_out.c_str();
    rl_status st = rl_converge(&cfg);
    if (st == RL_ERR_INVALID_ARGUMENT || st == RL_ERR_UNKNOWN_MODEL ||
        st == RL_ERR_UNKNOWN_SCHEME) {
      std::fprintf(stderr, "error: %s\n", rl_last_error());
      return 3;
    }
    if (st != RL_OK) return fail_runtime("converge");
    std::fprintf(stderr, "wrote %s\n", cv_out.c_str());
    return 0;
  }

  return 3;
}
