/* relaxlab: IMEX Runge-Kutta schemes for linear hyperbolic relaxation
 * systems with Fourier-Galerkin spatial discretization.
 *
 * C API of the shared library. All functions return rl_status; on failure
 * rl_last_error() describes what went wrong. Handles are opaque and owned
 * by the caller through the matching *_free function.
 */
#ifndef RELAXLAB_H
#define RELAXLAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_ERR_SHAPE_MISMATCH = 1,
  RL_ERR_SINGULAR_MATRIX = 2,
  RL_ERR_NOT_SYMMETRIC = 3,
  RL_ERR_OVERFLOW = 4,
  RL_ERR_STRUCTURE_VIOLATION = 5,
  RL_ERR_TOO_FEW_STAGES = 6,
  RL_ERR_UNKNOWN_SCHEME = 7,
  RL_ERR_NULLITY_MISMATCH = 8,
  RL_ERR_SINGULAR_P = 9,
  RL_ERR_BAD_MOMENT_ORDER = 10,
  RL_ERR_UNKNOWN_MODEL = 11,
  RL_ERR_SINGULAR_STAGE_MATRIX = 12,
  RL_ERR_NON_COMMENSURATE = 13,
  RL_ERR_EMPTY_TABLE = 14,
  RL_ERR_DEGENERATE_FIT = 15,
  RL_ERR_IO = 16,
  RL_ERR_INVALID_ARGUMENT = 17,
  RL_ERR_INTERNAL = 127
} rl_status;

const char* rl_status_name(rl_status status);

/* Message of the most recent failing call on this thread. */
const char* rl_last_error(void);

const char* rl_version(void);

/* ---- tableaux ---------------------------------------------------------- */

typedef struct rl_tableau rl_tableau;

int rl_registry_count(void);
const char* rl_registry_name(int index);

rl_status rl_tableau_registry(const char* name, rl_tableau** out);
rl_status rl_tableau_from_file(const char* path, rl_tableau** out);
void rl_tableau_free(rl_tableau* tableau);

int rl_tableau_stages(const rl_tableau* tableau);
const char* rl_tableau_name(const rl_tableau* tableau);

typedef struct rl_classification {
  int is_ck;
  int is_ars;
  int is_isa;
  int is_gsa;
  int c_matched;
} rl_classification;

rl_status rl_tableau_classify(const rl_tableau* tableau, rl_classification* out);

/* Visit every condition of the report: id, absolute residual, pass flag. */
typedef void (*rl_condition_cb)(const char* id, double residual, int pass, void* user);

rl_status rl_tableau_order_residuals(const rl_tableau* tableau, int order,
                                     rl_condition_cb cb, void* user);
/* Stage-order and vanishing-coefficient residuals; requires >= 3 stages. */
rl_status rl_tableau_stage_conditions(const rl_tableau* tableau, rl_condition_cb cb,
                                      void* user);

/* ---- relaxation systems ------------------------------------------------ */

typedef struct rl_system rl_system; /* system plus stability certificate */

rl_status rl_system_broadwell(double epsilon, rl_system** out);
rl_status rl_system_grad(int moment_order, double epsilon, rl_system** out);
/* Matrices from the plain-text format; pass NULL for p_path/a0_path to
 * derive a certificate (guaranteed for the built-in model family only). */
rl_status rl_system_from_files(const char* a_path, const char* q_path, int stiff_rank,
                               double epsilon, const char* p_path, const char* a0_path,
                               rl_system** out);
void rl_system_free(rl_system* system);

int rl_system_dim(const rl_system* system);
int rl_system_stiff_rank(const rl_system* system);

typedef struct rl_stability_report {
  int cond_i_pass, cond_ii_pass, cond_iii_pass, block_diag_pass, shat_pass;
  double cond_i_residual, cond_ii_residual, cond_iii_residual, block_diag_residual,
      shat_residual;
} rl_stability_report;

rl_status rl_system_check(const rl_system* system, rl_stability_report* out);

/* ---- experiments ------------------------------------------------------- */

typedef struct rl_run_config {
  const char* model;   /* "broadwell" or "grad:M" */
  const char* scheme;  /* registry name */
  double epsilon;
  double dt;
  double t0;
  double t_end;
  int modes;               /* Fourier cutoff N */
  const char* layer_mode;  /* "exact" or "paper" */
  const char* out_path;    /* grid CSV destination */
} rl_run_config;

rl_status rl_run(const rl_run_config* config);

typedef struct rl_converge_config {
  const char* model;
  const char* schemes; /* comma separated registry names */
  double eps_lo, eps_hi;
  int eps_count;
  double dt_base;
  int dt_levels;
  int modes;
  double t0, t_end;
  const char* reference;  /* "exact" or "fine" */
  const char* layer_mode; /* "exact" or "paper" */
  const char* out_path;
  const char* uniform_out_path; /* optional, NULL to skip */
  const char* fits_out_path;    /* optional, NULL to skip */
} rl_converge_config;

rl_status rl_converge(const rl_converge_config* config);

#ifdef __cplusplus
}
#endif

#endif /* RELAXLAB_H */
