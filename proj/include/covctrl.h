/*
 * covctrl: numerical certification that no quantum recovery operation beats
 * doing nothing against depolarizing noise on an unknown qudit, or on one
 * share of a maximally entangled pair.
 *
 * C interface of the shared library. All functions are thread-safe for
 * distinct sessions; records are plain structs filled by the callee. Every
 * computation is deterministic given the session seed.
 */

#ifndef COVCTRL_H
#define COVCTRL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum covctrl_status {
    COVCTRL_OK = 0,
    COVCTRL_ERR_INVALID_ARGUMENT = 1,
    COVCTRL_ERR_DIMENSION_TOO_LARGE = 2,
    COVCTRL_ERR_NOT_CONVERGED = 3,
    COVCTRL_ERR_INTERNAL = 4
} covctrl_status;

/* Opaque handle carrying the base RNG seed and the thread cap (0 = auto). */
typedef struct covctrl_session covctrl_session;

const char* covctrl_version(void);
const char* covctrl_status_message(covctrl_status status);

covctrl_status covctrl_session_create(uint64_t seed, int threads, covctrl_session** out_session);
void covctrl_session_destroy(covctrl_session* session);

/* Single-qudit verdict at one (dim, p): the twirled objective's top
 * eigenvalue against its closed form, the optimal fidelity 1 - p + p/dim,
 * and the reconstruction of the maximizer as the identity channel. */
typedef struct covctrl_single_record {
    size_t dim;
    double p;
    double lambda_max_numeric;
    double lambda_max_formula;
    double f_opt;
    double tp_residual;
    double two_path_residual;
    double identity_reconstruction_error;
    int pass;
} covctrl_single_record;

covctrl_status covctrl_verify_single(covctrl_session* session, size_t dim, double p,
                                     covctrl_single_record* out_record);

/* Bipartite verdict at one (dim, p). f_spectral = dim^2 * lambda_max must
 * match the independently computed do-nothing fidelity 1 - p + p/dim^2;
 * printed_minus_form carries the often-quoted variant 1 - p - p/dim^2 and
 * discrepancy_flag records that it disagrees whenever p > 0. */
typedef struct covctrl_bipartite_record {
    size_t dim;
    double p;
    double lambda_max_numeric;
    double lambda_max_formula;
    double f_spectral;
    double f_do_nothing;
    double printed_minus_form;
    int discrepancy_flag;
    double eigvec_residual;
    double identity_reconstruction_error;
    int pass;
} covctrl_bipartite_record;

covctrl_status covctrl_verify_bipartite(covctrl_session* session, size_t dim, double p,
                                        covctrl_bipartite_record* out_record);

/* Plot-ready sweep row; f_mc and mc_stderr are NaN (and n_samples 0) when no
 * sampling was requested. Monte Carlo sampling is single-qudit only. */
typedef struct covctrl_sweep_record {
    size_t dim;
    double p;
    double f_opt_formula;
    double lambda_max_numeric;
    double f_mc;
    double mc_stderr;
    uint64_t n_samples;
} covctrl_sweep_record;

covctrl_status covctrl_sweep_point(covctrl_session* session, size_t dim, double p, int bipartite,
                                   uint64_t n_samples, covctrl_sweep_record* out_record);

/* Monte Carlo estimate of the average fidelity of the do-nothing recovery,
 * with the analytic value for comparison. */
typedef struct covctrl_mc_record {
    size_t dim;
    double p;
    double analytic_value;
    double mc_value;
    double mc_stderr;
    uint64_t n_samples;
} covctrl_mc_record;

covctrl_status covctrl_mc_fidelity(covctrl_session* session, size_t dim, double p,
                                   uint64_t n_samples, covctrl_mc_record* out_record);

/* Brute-force certification of the optimum over all trace-preserving CP
 * recoveries at one (dim, p); `restarts` extra random starting points are
 * run beyond the default one. Returns COVCTRL_ERR_NOT_CONVERGED (with the
 * record still filled) if any start hit the iteration cap. */
typedef struct covctrl_oracle_record {
    size_t dim;
    double p;
    int bipartite;
    double primal_value;
    double dual_value;
    double gap;
    double f_do_nothing;
    int converged;
    uint64_t iterations;
    uint64_t restarts;
    uint64_t restarts_agreeing;
    int identity_action;
    int pass;
} covctrl_oracle_record;

covctrl_status covctrl_certify(covctrl_session* session, size_t dim, double p, int bipartite,
                               uint64_t restarts, covctrl_oracle_record* out_record);

/* Monte Carlo group-average errors against the two closed-form twirls, at a
 * given sample count; errors shrink as n_samples grows. */
typedef struct covctrl_twirl_record {
    size_t dim;
    uint64_t n_samples;
    double adjoint_mc_error;
    double uustar_mc_error;
} covctrl_twirl_record;

covctrl_status covctrl_twirl_check(covctrl_session* session, size_t dim, uint64_t n_samples,
                                   covctrl_twirl_record* out_record);

#ifdef __cplusplus
}
#endif

#endif /* COVCTRL_H */
