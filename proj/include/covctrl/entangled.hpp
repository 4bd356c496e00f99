// The entangled variant: party A holds one share of a maximally entangled
// pair whose other share B passes through depolarizing noise, and a joint
// recovery acts on both shares. Twirling over the local unitary that
// prepared the pair reduces the figure of merit to Tr[Xi R] on a four-factor
// space
//   H1 ox H2 ox H3 ox H4 = out_A ox out_B ox in_A ox in_B,
// each factor of dimension D. The maximizer is again the identity channel on
// both shares: F_opt = D^2 * lambda_max(Xi) = (1-p) + p/D^2, so no joint
// recovery beats doing nothing even with entanglement assistance.

#ifndef COVCTRL_ENTANGLED_HPP
#define COVCTRL_ENTANGLED_HPP

#include "covctrl/channels.hpp"
#include "covctrl/qlinalg.hpp"
#include "covctrl/twirl.hpp"

#include <cstdint>
#include <vector>

namespace covctrl {

/// (U ox I)|I> / sqrt(D): a Haar-random maximally entangled pure state on
/// A ox B, dimension D^2.
PureState sample_max_entangled(HaarSampler& sampler);

/// (id_A ox D_p)(M) for a raw operator M on A ox B; linear extension
/// p * Tr_B-marginal ox I/D + (1-p) M.
ComplexMatrix depolarize_b_raw(const ComplexMatrix& m, const DepolarizingParams& params);

/// Same map with density-operator validation.
DensityOperator depolarize_b(const DensityOperator& rho, const DepolarizingParams& params);

/// Lifts an operator pair acting on (H1 ox H3) and (H2 ox H4) into the
/// interleaved order H1 ox H2 ox H3 ox H4. Both operands act on D^2
/// dimensions; the result acts on D^4.
ComplexMatrix embed_pair_operators(const ComplexMatrix& on13, const ComplexMatrix& on24,
                                   std::size_t dim);

/// |I>_{13} ox |I>_{24} reordered into H1 ox H2 ox H3 ox H4; equals the
/// unnormalized maximally entangled vector between the joint output (12)
/// and joint input (34). Squared norm D^2.
ComplexMatrix pair_entangled_vector(std::size_t dim);

/// Twirled bipartite objective: F(R) = Tr[matrix * R].
struct BipartiteObjective {
    std::size_t dim = 0;  // local dimension D; matrix acts on D^4
    double p = 0.0;
    ComplexMatrix matrix;
    HermitianEigenResult spectrum;
};

/// Closed form
///   Xi = a I + b P - c (I_13 ox E_24 + E_13 ox I_24),   P = E_13 ox E_24,
/// with E the rank-one |I><I| on the indicated factor pair and
///   a = (D^2-p)/(D^4(D^2-1)), b = (1-p)/(D^2(D^2-1)), c = (1-p)/(D^3(D^2-1)).
BipartiteObjective build_xi(const DepolarizingParams& params);

/// Group average over W in U(D) acting as W on factor 1 and W* on factor 3
/// (factors 2 and 4 are spectators), in closed form. Projects onto the
/// commutant span{I_13, |I><I|_13} with operator-valued coefficients.
ComplexMatrix twirl_pair_13(const ComplexMatrix& x, std::size_t dim);

/// Monte Carlo construction of the same operator: per sampled preparation
/// unitary V, form |Psi_V><Psi_V| ox ((id ox D_p)|Psi_V><Psi_V|)^T on the
/// four-factor space and apply twirl_pair_13, then average. Every twirled
/// sample equals Xi when the pipeline is correct, so this validates the
/// sampling, noise, embedding and twirl in combination.
ComplexMatrix xi_monte_carlo(const DepolarizingParams& params, std::uint64_t n_samples,
                             std::uint64_t seed);

/// Per-point certificate for the entangled no-go at one (D, p).
struct BipartiteNogoRecord {
    std::size_t dim = 0;
    double p = 0.0;
    double lambda_max_numeric = 0.0;   // top eigenvalue of Xi
    double lambda_max_formula = 0.0;   // (1-p)/D^2 + p/D^4
    double f_spectral = 0.0;           // D^2 * lambda_max_numeric
    double f_do_nothing = 0.0;         // <Psi_0| (id ox D_p)(|Psi_0><Psi_0|) |Psi_0>
    double printed_minus_form = 0.0;   // the minus-sign variant 1 - p - p/D^2
    bool discrepancy_flag = false;     // true when that variant disagrees with f_spectral
    double eigvec_residual = 0.0;      // ||Xi v - lambda v|| for the claimed eigenvector
    double identity_reconstruction_error = 0.0;
    bool pass = false;
};

BipartiteNogoRecord verify_nogo_bipartite_point(std::size_t dim, double p);
std::vector<BipartiteNogoRecord> verify_nogo_bipartite(std::size_t dim,
                                                       const std::vector<double>& p_grid);

}  // namespace covctrl

#endif
