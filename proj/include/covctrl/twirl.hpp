// Haar-random sampling and group averaging. Two analytic twirls are
// implemented in closed form (the adjoint twirl U X U^dagger and the
// combined-conjugation twirl (U ox U*) X (U^dagger ox U^T)), plus the
// covariantization of a finite recovery instrument, which folds every
// outcome's correction unitary into its Choi operator and sums.

#ifndef COVCTRL_TWIRL_HPP
#define COVCTRL_TWIRL_HPP

#include "covctrl/channels.hpp"
#include "covctrl/qlinalg.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace covctrl {

/// Deterministic Haar-distributed sampler over the unitary group U(D).
/// Unitaries come from QR of a complex Ginibre matrix with the phase
/// correction that makes the distribution exactly Haar.
class HaarSampler {
public:
    HaarSampler(std::uint64_t seed, std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }

    /// D x D matrix of iid standard complex Gaussians.
    ComplexMatrix sample_ginibre();

    /// Haar-distributed unitary; every sample is unitary to ~1e-14.
    ComplexMatrix sample_unitary();

    /// Haar-distributed pure state (normalized complex Gaussian vector).
    PureState sample_pure_state();

    /// Independent sampler for a parallel stream: the stream index is mixed
    /// into the seed with an integer hash, so streams are reproducible and
    /// order-independent.
    HaarSampler derive(std::uint64_t stream) const;

private:
    std::uint64_t seed_;
    std::size_t dim_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// Integer hash used to derive independent RNG streams from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Average of U X U^dagger over Haar: Tr[X]/D * I.
ComplexMatrix twirl_adjoint(const ComplexMatrix& x);

/// Average of (U ox U*) X (U^dagger ox U^T) over Haar, for X on a D*D-
/// dimensional doubled space. The result lies in the commutant
/// span{I, |I><I|}; coefficients follow from matching Tr[X] and <I|X|I>.
ComplexMatrix twirl_uustar(const ComplexMatrix& x, std::size_t dim);

/// One outcome of a recovery instrument: the Choi operator of the heralded
/// completion map together with the correction unitary applied afterwards.
struct InstrumentOutcome {
    ComplexMatrix unitary;  // correction U_h on the output space
    ChoiOperator choi;      // R_h of the completion map
};

/// Collapses a finite instrument to a single covariant seed operator:
/// sum_h (U_h^dagger ox U_h^T) R_h (U_h ox U_h^*). The outcome-summed input
/// must be trace preserving. The seed itself has trace D but need not be
/// trace preserving; the group-averaged family it induces is, and the seed
/// achieves exactly the same fidelity against any twirl-invariant objective
/// as the original instrument.
ChoiOperator covariantize(const std::vector<InstrumentOutcome>& outcomes);

/// Monte Carlo estimates of both analytic twirls, for convergence checks:
/// averages N sampled conjugations of a fixed test operator derived from the
/// sampler's seed and reports Frobenius distances to the closed forms.
struct TwirlMcErrors {
    double adjoint_error = 0.0;
    double uustar_error = 0.0;
};
TwirlMcErrors mc_twirl_errors(std::size_t dim, std::uint64_t n_samples, std::uint64_t seed);

}  // namespace covctrl

#endif
