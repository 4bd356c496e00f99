// Quantum states and channels: validated state/operator types, the
// depolarizing channel in direct and Kraus form, and conversions between the
// Kraus and Choi representations.
//
// Conventions, fixed project-wide:
//   vec(A) stacks rows: vec(A)[i*cols + j] = A(i,j), so vec(A) = (A ox I)|I>.
//   A Choi operator lives on H_out ox H_in with flat index i_out*dim_in + i_in
//   and equals sum_mu vec(A_mu) vec(A_mu)^dagger for Kraus operators A_mu.
//   The channel action recovered from a Choi operator R is
//   C(rho) = Tr_in[(I_out ox rho^T) R].

#ifndef COVCTRL_CHANNELS_HPP
#define COVCTRL_CHANNELS_HPP

#include "covctrl/qlinalg.hpp"

#include <cstddef>
#include <vector>

namespace covctrl {

/// Depolarizing strength p in [0,1] acting on a qudit of dimension D >= 2.
struct DepolarizingParams {
    double p = 0.0;
    std::size_t dim = 2;

    DepolarizingParams(double p_, std::size_t dim_);
};

/// Unit-norm column vector; norm must match 1 within 1e-12.
class PureState {
public:
    explicit PureState(ComplexMatrix amplitudes);

    /// Computational basis state |index> of the given dimension.
    static PureState basis_state(std::size_t dim, std::size_t index);

    std::size_t dim() const { return amplitudes_.rows(); }
    const ComplexMatrix& amplitudes() const { return amplitudes_; }

    /// Rank-one projector |psi><psi|.
    ComplexMatrix projector() const;

private:
    ComplexMatrix amplitudes_;
};

/// Density operator: Hermitian within 1e-10, unit trace within 1e-10,
/// eigenvalues above -1e-10. Validated on construction.
class DensityOperator {
public:
    explicit DensityOperator(ComplexMatrix matrix);

    static DensityOperator from_pure(const PureState& psi);
    static DensityOperator maximally_mixed(std::size_t dim);

    std::size_t dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

private:
    ComplexMatrix matrix_;
};

/// Trace-preserving Kraus family: sum_mu A_mu^dagger A_mu = I within 1e-10.
class KrausChannel {
public:
    explicit KrausChannel(std::vector<ComplexMatrix> ops);

    std::size_t dim_in() const { return ops_.front().cols(); }
    std::size_t dim_out() const { return ops_.front().rows(); }
    const std::vector<ComplexMatrix>& ops() const { return ops_; }

private:
    std::vector<ComplexMatrix> ops_;
};

/// Choi operator on H_out ox H_in: Hermitian and positive semidefinite
/// (eigenvalues above -1e-10). Trace preservation is NOT part of the
/// invariant; use validate_tp to test it.
class ChoiOperator {
public:
    ChoiOperator(std::size_t dim_out, std::size_t dim_in, ComplexMatrix matrix);

    std::size_t dim_out() const { return dim_out_; }
    std::size_t dim_in() const { return dim_in_; }
    std::size_t total_dim() const { return dim_out_ * dim_in_; }
    const ComplexMatrix& matrix() const { return matrix_; }

private:
    std::size_t dim_out_;
    std::size_t dim_in_;
    ComplexMatrix matrix_;
};

/// Result of a trace-preservation test on a Choi operator.
struct TpCheck {
    double residual = 0.0;  // ||Tr_out[R] - I_in||_F
    bool pass = false;      // residual <= 1e-8
};

/// rho -> p*I/D + (1-p)*rho.
DensityOperator depolarize(const DensityOperator& rho, const DepolarizingParams& params);

/// Same map on a raw matrix (no density-operator validation); used by hot
/// loops and by constructions that feed non-state operands through the map.
ComplexMatrix depolarize_raw(const ComplexMatrix& m, const DepolarizingParams& params);

/// Kraus family of the depolarizing channel as the mixture
/// {sqrt(1-p) I} u {sqrt(p/D) |i><j| : i,j}; zero-weight members are dropped.
KrausChannel depolarizing_kraus(const DepolarizingParams& params);

/// sum_mu A_mu rho A_mu^dagger.
DensityOperator apply_kraus(const KrausChannel& channel, const DensityOperator& rho);

/// R = sum_mu vec(A_mu) vec(A_mu)^dagger.
ChoiOperator choi_from_kraus(const KrausChannel& channel);

/// Eigendecomposition-based inverse of choi_from_kraus: one Kraus operator
/// sqrt(lambda_k) unvec(v_k) per eigenvalue above 1e-12, ordered by
/// decreasing eigenvalue. The input must describe a trace-preserving map.
KrausChannel kraus_from_choi(const ChoiOperator& r);

/// Channel action recovered from the Choi operator; requires a
/// trace-preserving R so the output is again a density operator.
DensityOperator apply_choi(const ChoiOperator& r, const DensityOperator& rho);

/// Same action on a raw matrix, with no output validation.
ComplexMatrix apply_choi_raw(const ChoiOperator& r, const ComplexMatrix& rho);

/// Tests Tr_out[R] = I_in.
TpCheck validate_tp(const ChoiOperator& r);

}  // namespace covctrl

#endif
