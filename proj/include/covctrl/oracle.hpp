// Independent certification that the analytic optimum is the global optimum
// over ALL trace-preserving completely positive recovery maps, not only the
// covariant ones. A primal projected-ascent solver climbs Tr[Objective * R]
// over the intersection of the PSD cone with the trace-preservation affine
// subspace, and a closed-form dual certificate (Y = lambda_max * I_in)
// bounds the optimum from above. Agreement of the two within tolerance,
// from several random starting points, certifies the value.

#ifndef COVCTRL_ORACLE_HPP
#define COVCTRL_ORACLE_HPP

#include "covctrl/channels.hpp"
#include "covctrl/control.hpp"
#include "covctrl/entangled.hpp"
#include "covctrl/qlinalg.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace covctrl {

/// Linear objective over the Choi cone with a trace-preservation constraint
/// Tr_out[R] = I_in (which fixes Tr[R] = trace_budget = in_dim).
struct SdpProblem {
    ComplexMatrix objective;  // Hermitian PSD on H_out ox H_in
    std::size_t out_dim = 0;
    std::size_t in_dim = 0;
    double trace_budget = 0.0;
};

SdpProblem make_problem(const ControlObjective& obj);
SdpProblem make_problem(const BipartiteObjective& obj);

struct SdpSolution {
    ChoiOperator r;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;  // dual_value - primal_value
    std::size_t iterations = 0;
    bool converged = false;
};

struct DualCertificate {
    double upper_bound = 0.0;
    bool feasible = false;
    double min_slack_eigenvalue = 0.0;  // min eig of I_out ox Y - Objective
};

/// Replace R by its projection onto the affine subspace Tr_out[R] = I_in.
/// Exact up to roundoff: afterwards the residual is at machine scale.
void project_tp(ComplexMatrix& r, std::size_t out_dim, std::size_t in_dim);

/// Replace R by its nearest PSD matrix (eigenvalue clipping at zero);
/// returns the smallest eigenvalue found before clipping.
double clip_psd(ComplexMatrix& r);

/// Called once per ascent iteration with (iteration, objective value of the
/// current feasible iterate); used by property tests.
using IterateObserver = std::function<void(std::size_t, double)>;

/// Projected gradient ascent: step along the objective, then alternate the
/// two projections until jointly feasible, tracking the best iterate. Stops
/// once the best value has not improved by tol for a patience window, or at
/// max_iter (converged=false). An optional init must be square of the
/// problem size; when absent the maximally mixed feasible point is used.
SdpSolution solve_primal(const SdpProblem& prob, std::size_t max_iter = 100000, double tol = 1e-9,
                         const ComplexMatrix* init = nullptr, const IterateObserver& observer = {});

/// Closed-form dual candidate Y = lambda_max(Objective) * I_in for
/// min Tr[Y] s.t. I_out ox Y >= Objective; feasibility is verified
/// numerically (min slack eigenvalue >= -1e-10).
DualCertificate dual_certificate(const SdpProblem& prob);

/// One certified grid point.
struct CertificationRecord {
    std::size_t dim = 0;  // local dimension D
    double p = 0.0;
    bool bipartite = false;
    double primal_value = 0.0;  // best over all starts
    double dual_value = 0.0;
    double gap = 0.0;
    double f_do_nothing = 0.0;
    bool converged = false;  // every start converged
    std::size_t iterations = 0;  // ascent iterations of the best start
    std::size_t restarts = 0;  // random starts beyond the default one
    std::size_t restarts_agreeing = 0;  // starts whose value matches the dual within 1e-5
    bool identity_action = false;  // best maximizer acts as identity on probe states
    bool pass = false;
};

/// Solves one (D, p) with the default start plus `restarts` random PSD
/// starts derived from the seed. Desk-scale guard: D <= 4 single-qudit,
/// D <= 3 bipartite.
CertificationRecord certify_point(std::size_t dim, double p, bool bipartite, std::size_t restarts,
                                  std::uint64_t seed);

std::vector<CertificationRecord> certify_nogo(std::size_t dim, const std::vector<double>& p_grid,
                                              bool bipartite, std::size_t restarts,
                                              std::uint64_t seed);

}  // namespace covctrl

#endif
