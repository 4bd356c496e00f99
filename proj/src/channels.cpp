#include "covctrl/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covctrl {

namespace {

constexpr double kStateNormTol = 1e-12;
constexpr double kDensityTol = 1e-10;
constexpr double kKrausTpTol = 1e-10;
constexpr double kChoiPsdTol = 1e-10;
constexpr double kChoiTpPassTol = 1e-8;
constexpr double kKrausRankCut = 1e-12;

ComplexMatrix vec_of(const ComplexMatrix& a) {
    ComplexMatrix v(a.rows() * a.cols(), 1);
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) v(r * a.cols() + c, 0) = a(r, c);
    return v;
}

ComplexMatrix unvec(const ComplexMatrix& v, std::size_t rows, std::size_t cols) {
    ComplexMatrix a(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) a(r, c) = v(r * cols + c, 0);
    return a;
}

}  // namespace

DepolarizingParams::DepolarizingParams(double p_, std::size_t dim_) : p(p_), dim(dim_) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("DepolarizingParams: p must lie in [0, 1]");
    if (dim < 2) throw std::invalid_argument("DepolarizingParams: dimension must be at least 2");
}

PureState::PureState(ComplexMatrix amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.cols() != 1 || amplitudes_.rows() == 0)
        throw std::invalid_argument("PureState: expected a nonempty column vector");
    const double norm = amplitudes_.frobenius_norm();
    if (std::abs(norm - 1.0) > kStateNormTol)
        throw std::invalid_argument("PureState: vector is not normalized");
}

PureState PureState::basis_state(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::invalid_argument("PureState::basis_state: index out of range");
    ComplexMatrix v(dim, 1);
    v(index, 0) = Complex(1.0, 0.0);
    return PureState(std::move(v));
}

ComplexMatrix PureState::projector() const {
    return amplitudes_ * amplitudes_.adjoint();
}

DensityOperator::DensityOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (!matrix_.is_square() || matrix_.rows() == 0)
        throw std::invalid_argument("DensityOperator: expected a nonempty square matrix");
    if ((matrix_ - matrix_.adjoint()).frobenius_norm() > kDensityTol)
        throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
    const Complex t = matrix_.trace();
    if (std::abs(t - Complex(1.0, 0.0)) > kDensityTol)
        throw std::invalid_argument("DensityOperator: trace is not 1");
    const HermitianEigenResult eig = hermitian_eig(matrix_);
    if (eig.eigenvalues.front() < -kDensityTol)
        throw std::invalid_argument("DensityOperator: matrix is not positive semidefinite");
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
    return DensityOperator(psi.projector());
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("DensityOperator: dimension must be positive");
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m *= Complex(1.0 / static_cast<double>(dim), 0.0);
    return DensityOperator(std::move(m));
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: empty operator list");
    const std::size_t rows = ops_.front().rows();
    const std::size_t cols = ops_.front().cols();
    if (rows == 0 || cols == 0) throw std::invalid_argument("KrausChannel: empty operator");
    for (const ComplexMatrix& a : ops_)
        if (a.rows() != rows || a.cols() != cols)
            throw std::invalid_argument("KrausChannel: inconsistent operator shapes");

    ComplexMatrix acc(cols, cols);
    for (const ComplexMatrix& a : ops_) acc += a.adjoint() * a;
    acc -= ComplexMatrix::identity(cols);
    if (acc.frobenius_norm() > kKrausTpTol)
        throw std::invalid_argument("KrausChannel: operators do not satisfy trace preservation");
}

ChoiOperator::ChoiOperator(std::size_t dim_out, std::size_t dim_in, ComplexMatrix matrix)
    : dim_out_(dim_out), dim_in_(dim_in), matrix_(std::move(matrix)) {
    if (dim_out_ == 0 || dim_in_ == 0)
        throw std::invalid_argument("ChoiOperator: dimensions must be positive");
    if (matrix_.rows() != dim_out_ * dim_in_ || !matrix_.is_square())
        throw std::invalid_argument("ChoiOperator: matrix size does not match dim_out*dim_in");
    // hermitian_eig also rejects non-Hermitian input.
    const HermitianEigenResult eig = hermitian_eig(matrix_);
    if (eig.eigenvalues.front() < -kChoiPsdTol)
        throw std::invalid_argument("ChoiOperator: matrix is not positive semidefinite");
}

DensityOperator depolarize(const DensityOperator& rho, const DepolarizingParams& params) {
    if (rho.dim() != params.dim)
        throw std::invalid_argument("depolarize: state dimension does not match parameters");
    return DensityOperator(depolarize_raw(rho.matrix(), params));
}

ComplexMatrix depolarize_raw(const ComplexMatrix& m, const DepolarizingParams& params) {
    if (!m.is_square() || m.rows() != params.dim)
        throw std::invalid_argument("depolarize_raw: operand dimension does not match parameters");
    const double d = static_cast<double>(params.dim);
    const Complex t = m.trace();
    ComplexMatrix out = m;
    out *= Complex(1.0 - params.p, 0.0);
    const Complex diag_shift = Complex(params.p / d, 0.0) * t;
    for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) += diag_shift;
    return out;
}

KrausChannel depolarizing_kraus(const DepolarizingParams& params) {
    const std::size_t d = params.dim;
    std::vector<ComplexMatrix> ops;
    if (params.p < 1.0) {
        ComplexMatrix a = ComplexMatrix::identity(d);
        a *= Complex(std::sqrt(1.0 - params.p), 0.0);
        ops.push_back(std::move(a));
    }
    if (params.p > 0.0) {
        const double w = std::sqrt(params.p / static_cast<double>(d));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                ComplexMatrix a(d, d);
                a(i, j) = Complex(w, 0.0);
                ops.push_back(std::move(a));
            }
    }
    return KrausChannel(std::move(ops));
}

DensityOperator apply_kraus(const KrausChannel& channel, const DensityOperator& rho) {
    if (channel.dim_in() != rho.dim())
        throw std::invalid_argument("apply_kraus: state dimension does not match channel");
    ComplexMatrix out(channel.dim_out(), channel.dim_out());
    for (const ComplexMatrix& a : channel.ops()) out += a * rho.matrix() * a.adjoint();
    return DensityOperator(std::move(out));
}

ChoiOperator choi_from_kraus(const KrausChannel& channel) {
    const std::size_t total = channel.dim_out() * channel.dim_in();
    ComplexMatrix r(total, total);
    for (const ComplexMatrix& a : channel.ops()) {
        const ComplexMatrix v = vec_of(a);
        for (std::size_t i = 0; i < total; ++i) {
            const Complex vi = v(i, 0);
            if (vi == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < total; ++j) r(i, j) += vi * std::conj(v(j, 0));
        }
    }
    return ChoiOperator(channel.dim_out(), channel.dim_in(), std::move(r));
}

KrausChannel kraus_from_choi(const ChoiOperator& r) {
    const HermitianEigenResult eig = hermitian_eig(r.matrix());
    std::vector<ComplexMatrix> ops;
    // Ascending eigenvalues; walk backwards for a dominant-first family.
    for (std::size_t k = eig.eigenvalues.size(); k-- > 0;) {
        const double lambda = eig.eigenvalues[k];
        if (lambda < kKrausRankCut) break;
        ComplexMatrix v(r.total_dim(), 1);
        for (std::size_t i = 0; i < r.total_dim(); ++i) v(i, 0) = eig.eigenvectors(i, k);
        ComplexMatrix a = unvec(v, r.dim_out(), r.dim_in());
        a *= Complex(std::sqrt(lambda), 0.0);
        ops.push_back(std::move(a));
    }
    if (ops.empty()) throw std::runtime_error("kraus_from_choi: no eigenvalue above the rank cutoff");
    return KrausChannel(std::move(ops));
}

ComplexMatrix apply_choi_raw(const ChoiOperator& r, const ComplexMatrix& rho) {
    if (!rho.is_square() || rho.rows() != r.dim_in())
        throw std::invalid_argument("apply_choi: operand dimension does not match Choi input space");
    const ComplexMatrix lifted = kron(ComplexMatrix::identity(r.dim_out()), rho.transpose());
    const ComplexMatrix prod = lifted * r.matrix();
    return partial_trace(prod, {r.dim_out(), r.dim_in()}, {0});
}

DensityOperator apply_choi(const ChoiOperator& r, const DensityOperator& rho) {
    return DensityOperator(apply_choi_raw(r, rho.matrix()));
}

TpCheck validate_tp(const ChoiOperator& r) {
    ComplexMatrix reduced = partial_trace(r.matrix(), {r.dim_out(), r.dim_in()}, {1});
    reduced -= ComplexMatrix::identity(r.dim_in());
    TpCheck check;
    check.residual = reduced.frobenius_norm();
    check.pass = check.residual <= kChoiTpPassTol;
    return check;
}

}  // namespace covctrl
