// The single-qudit control problem: average entanglement fidelity of a
// recovery operator against depolarizing noise on a Haar-random pure state.
//
// Averaging over the input state twirls the effective objective into the
// commutant of U ox U*, so the figure of merit becomes Tr[Upsilon R] for a
// fixed operator Upsilon on H_out ox H_in. Maximizing over trace-preserving
// completely positive R gives F_opt = D * lambda_max(Upsilon), attained by
// the identity channel's Choi operator |I><I|: no recovery beats doing
// nothing.

#ifndef COVCTRL_CONTROL_HPP
#define COVCTRL_CONTROL_HPP

#include "covctrl/channels.hpp"
#include "covctrl/qlinalg.hpp"
#include "covctrl/twirl.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace covctrl {

/// Twirled fidelity objective: F(R) = Tr[matrix * R] for recovery Choi R.
struct ControlObjective {
    std::size_t dim = 0;
    double p = 0.0;
    ComplexMatrix matrix;             // Hermitian PSD on H_out ox H_in
    HermitianEigenResult spectrum;    // ascending eigenvalues of matrix
};

/// Closed form of the twirled objective:
/// Upsilon = (1-p)/(D(D+1)) |I><I| + (D+p)/(D^2(D+1)) I.
ControlObjective build_upsilon(const DepolarizingParams& params);

/// Independent construction of the same operator through the analytic twirl
/// of a single-state seed: twirl_uustar(|0><0| ox D_p(|0><0|)^T). Used to
/// cross-check build_upsilon; agrees with it to machine precision.
ComplexMatrix upsilon_via_twirl(const DepolarizingParams& params);

/// Largest eigenvalue of an objective.
double max_eigen(const ControlObjective& obj);

/// Best covariant recovery and its fidelity: the identity channel's Choi
/// operator with F = 1 - p + p/D.
struct OptimalInstrument {
    ChoiOperator r0;
    double fidelity;
};
OptimalInstrument optimal_instrument(const DepolarizingParams& params);

/// Tr[objective * R], checked real within 1e-12.
double analytic_fidelity(const ControlObjective& obj, const ChoiOperator& recovery);

struct FidelityReport {
    std::size_t dim = 0;
    double p = 0.0;
    double analytic_value = 0.0;
    std::optional<double> mc_value;
    std::optional<double> mc_stderr;
    std::uint64_t n_samples = 0;
};

/// Monte Carlo estimate of the pre-twirl average fidelity: per Haar-sampled
/// pure state psi, f = Tr[(|psi><psi| ox D_p(|psi><psi|)^T) R]. Samples are
/// processed in fixed-size chunks with per-chunk derived RNG streams and a
/// Welford accumulator, so the result is byte-identical for a given seed
/// regardless of thread count.
FidelityReport mc_fidelity(const ChoiOperator& recovery, const DepolarizingParams& params,
                           std::uint64_t seed, std::uint64_t n_samples, int threads = 0);

/// Per-point certificate that doing nothing is optimal for one (D, p).
struct SingleNogoRecord {
    std::size_t dim = 0;
    double p = 0.0;
    double lambda_max_numeric = 0.0;    // top eigenvalue of the twirl-built objective
    double lambda_max_formula = 0.0;    // (D(1-p)+p)/D^2
    double f_opt = 0.0;                 // 1 - p + p/D
    double tp_residual = 0.0;           // TP defect of the optimal recovery
    double two_path_residual = 0.0;     // closed form vs twirl construction
    double identity_reconstruction_error = 0.0;  // Kraus of top eigenvector vs identity
    bool pass = false;
};

SingleNogoRecord verify_nogo_single_point(std::size_t dim, double p);
std::vector<SingleNogoRecord> verify_nogo_single(std::size_t dim, const std::vector<double>& p_grid);

}  // namespace covctrl

#endif
