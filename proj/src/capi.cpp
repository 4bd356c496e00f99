#include "covctrl.h"

#include "covctrl/channels.hpp"
#include "covctrl/control.hpp"
#include "covctrl/entangled.hpp"
#include "covctrl/oracle.hpp"
#include "covctrl/twirl.hpp"

#include <cmath>
#include <cstring>
#include <new>
#include <stdexcept>

struct covctrl_session {
    std::uint64_t seed;
    int threads;
};

namespace {

constexpr std::size_t kVerifySingleDimCap = 16;
constexpr std::size_t kVerifyBipartiteDimCap = 4;

template <typename Fn>
covctrl_status guarded(Fn&& fn) {
    try {
        fn();
        return COVCTRL_OK;
    } catch (const std::invalid_argument&) {
        return COVCTRL_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        return COVCTRL_ERR_INTERNAL;
    } catch (const std::exception&) {
        return COVCTRL_ERR_INTERNAL;
    } catch (...) {
        return COVCTRL_ERR_INTERNAL;
    }
}

// Independent RNG stream per grid point: deterministic for a given session
// seed and independent of evaluation order.
std::uint64_t point_stream(std::uint64_t seed, std::size_t dim, double p, std::uint64_t salt) {
    std::uint64_t p_bits = 0;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&p_bits, &p, sizeof(p_bits));
    return covctrl::mix_seed(covctrl::mix_seed(seed, static_cast<std::uint64_t>(dim) ^ salt), p_bits);
}

}  // namespace

extern "C" {

const char* covctrl_version(void) { return "0.1.0"; }

const char* covctrl_status_message(covctrl_status status) {
    switch (status) {
        case COVCTRL_OK:
            return "ok";
        case COVCTRL_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case COVCTRL_ERR_DIMENSION_TOO_LARGE:
            return "dimension exceeds the supported bound for this operation";
        case COVCTRL_ERR_NOT_CONVERGED:
            return "iterative solver did not converge";
        case COVCTRL_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

covctrl_status covctrl_session_create(uint64_t seed, int threads, covctrl_session** out_session) {
    if (!out_session || threads < 0) return COVCTRL_ERR_INVALID_ARGUMENT;
    *out_session = new (std::nothrow) covctrl_session{seed, threads};
    return *out_session ? COVCTRL_OK : COVCTRL_ERR_INTERNAL;
}

void covctrl_session_destroy(covctrl_session* session) { delete session; }

covctrl_status covctrl_verify_single(covctrl_session* session, size_t dim, double p,
                                     covctrl_single_record* out_record) {
    if (!session || !out_record) return COVCTRL_ERR_INVALID_ARGUMENT;
    if (dim > kVerifySingleDimCap) return COVCTRL_ERR_DIMENSION_TOO_LARGE;
    return guarded([&] {
        const covctrl::SingleNogoRecord rec = covctrl::verify_nogo_single_point(dim, p);
        out_record->dim = rec.dim;
        out_record->p = rec.p;
        out_record->lambda_max_numeric = rec.lambda_max_numeric;
        out_record->lambda_max_formula = rec.lambda_max_formula;
        out_record->f_opt = rec.f_opt;
        out_record->tp_residual = rec.tp_residual;
        out_record->two_path_residual = rec.two_path_residual;
        out_record->identity_reconstruction_error = rec.identity_reconstruction_error;
        out_record->pass = rec.pass ? 1 : 0;
    });
}

covctrl_status covctrl_verify_bipartite(covctrl_session* session, size_t dim, double p,
                                        covctrl_bipartite_record* out_record) {
    if (!session || !out_record) return COVCTRL_ERR_INVALID_ARGUMENT;
    if (dim > kVerifyBipartiteDimCap) return COVCTRL_ERR_DIMENSION_TOO_LARGE;
    return guarded([&] {
        const covctrl::BipartiteNogoRecord rec = covctrl::verify_nogo_bipartite_point(dim, p);
        out_record->dim = rec.dim;
        out_record->p = rec.p;
        out_record->lambda_max_numeric = rec.lambda_max_numeric;
        out_record->lambda_max_formula = rec.lambda_max_formula;
        out_record->f_spectral = rec.f_spectral;
        out_record->f_do_nothing = rec.f_do_nothing;
        out_record->printed_minus_form = rec.printed_minus_form;
        out_record->discrepancy_flag = rec.discrepancy_flag ? 1 : 0;
        out_record->eigvec_residual = rec.eigvec_residual;
        out_record->identity_reconstruction_error = rec.identity_reconstruction_error;
        out_record->pass = rec.pass ? 1 : 0;
    });
}

covctrl_status covctrl_sweep_point(covctrl_session* session, size_t dim, double p, int bipartite,
                                   uint64_t n_samples, covctrl_sweep_record* out_record) {
    if (!session || !out_record) return COVCTRL_ERR_INVALID_ARGUMENT;
    if (dim > (bipartite ? kVerifyBipartiteDimCap : kVerifySingleDimCap))
        return COVCTRL_ERR_DIMENSION_TOO_LARGE;
    if (bipartite && n_samples > 0) return COVCTRL_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const covctrl::DepolarizingParams params(p, dim);
        const double d = static_cast<double>(dim);
        out_record->dim = dim;
        out_record->p = p;
        out_record->f_mc = std::nan("");
        out_record->mc_stderr = std::nan("");
        out_record->n_samples = 0;
        if (bipartite) {
            const covctrl::BipartiteObjective obj = covctrl::build_xi(params);
            out_record->f_opt_formula = 1.0 - p + p / (d * d);
            out_record->lambda_max_numeric = obj.spectrum.eigenvalues.back();
        } else {
            const covctrl::ControlObjective obj = covctrl::build_upsilon(params);
            out_record->f_opt_formula = 1.0 - p + p / d;
            out_record->lambda_max_numeric = covctrl::max_eigen(obj);
            if (n_samples > 0) {
                const covctrl::OptimalInstrument opt = covctrl::optimal_instrument(params);
                const covctrl::FidelityReport report = covctrl::mc_fidelity(
                    opt.r0, params, point_stream(session->seed, dim, p, 0x5EEDULL), n_samples,
                    session->threads);
                out_record->f_mc = *report.mc_value;
                out_record->mc_stderr = *report.mc_stderr;
                out_record->n_samples = n_samples;
            }
        }
    });
}

covctrl_status covctrl_mc_fidelity(covctrl_session* session, size_t dim, double p,
                                   uint64_t n_samples, covctrl_mc_record* out_record) {
    if (!session || !out_record) return COVCTRL_ERR_INVALID_ARGUMENT;
    if (dim > kVerifySingleDimCap) return COVCTRL_ERR_DIMENSION_TOO_LARGE;
    return guarded([&] {
        const covctrl::DepolarizingParams params(p, dim);
        const covctrl::OptimalInstrument opt = covctrl::optimal_instrument(params);
        const covctrl::FidelityReport report = covctrl::mc_fidelity(
            opt.r0, params, point_stream(session->seed, dim, p, 0x5EEDULL), n_samples,
            session->threads);
        out_record->dim = dim;
        out_record->p = p;
        out_record->analytic_value = report.analytic_value;
        out_record->mc_value = *report.mc_value;
        out_record->mc_stderr = *report.mc_stderr;
        out_record->n_samples = report.n_samples;
    });
}

covctrl_status covctrl_certify(covctrl_session* session, size_t dim, double p, int bipartite,
                               uint64_t restarts, covctrl_oracle_record* out_record) {
    if (!session || !out_record) return COVCTRL_ERR_INVALID_ARGUMENT;
    if (dim > (bipartite ? 3u : 4u)) return COVCTRL_ERR_DIMENSION_TOO_LARGE;
    bool converged = true;
    const covctrl_status status = guarded([&] {
        const covctrl::CertificationRecord rec = covctrl::certify_point(
            dim, p, bipartite != 0, restarts, point_stream(session->seed, dim, p, 0x04ACULL));
        out_record->dim = rec.dim;
        out_record->p = rec.p;
        out_record->bipartite = rec.bipartite ? 1 : 0;
        out_record->primal_value = rec.primal_value;
        out_record->dual_value = rec.dual_value;
        out_record->gap = rec.gap;
        out_record->f_do_nothing = rec.f_do_nothing;
        out_record->converged = rec.converged ? 1 : 0;
        out_record->iterations = rec.iterations;
        out_record->restarts = rec.restarts;
        out_record->restarts_agreeing = rec.restarts_agreeing;
        out_record->identity_action = rec.identity_action ? 1 : 0;
        out_record->pass = rec.pass ? 1 : 0;
        converged = rec.converged;
    });
    if (status != COVCTRL_OK) return status;
    return converged ? COVCTRL_OK : COVCTRL_ERR_NOT_CONVERGED;
}

covctrl_status covctrl_twirl_check(covctrl_session* session, size_t dim, uint64_t n_samples,
                                   covctrl_twirl_record* out_record) {
    if (!session || !out_record) return COVCTRL_ERR_INVALID_ARGUMENT;
    if (dim > kVerifySingleDimCap) return COVCTRL_ERR_DIMENSION_TOO_LARGE;
    return guarded([&] {
        const covctrl::TwirlMcErrors err =
            covctrl::mc_twirl_errors(dim, n_samples, covctrl::mix_seed(session->seed, dim));
        out_record->dim = dim;
        out_record->n_samples = n_samples;
        out_record->adjoint_mc_error = err.adjoint_error;
        out_record->uustar_mc_error = err.uustar_error;
    });
}

}  // extern "C"
