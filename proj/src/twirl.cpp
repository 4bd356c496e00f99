#include "covctrl/twirl.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace covctrl {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kTpTol = 1e-8;

void check_unitary(const ComplexMatrix& u, std::size_t dim, const char* who) {
    if (!u.is_square() || u.rows() != dim)
        throw std::invalid_argument(std::string(who) + ": unitary has wrong dimension");
    ComplexMatrix g = u.adjoint() * u;
    g -= ComplexMatrix::identity(dim);
    if (g.frobenius_norm() > kUnitaryTol)
        throw std::invalid_argument(std::string(who) + ": matrix is not unitary");
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over seed + odd multiple of the stream index.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

HaarSampler::HaarSampler(std::uint64_t seed, std::size_t dim)
    : seed_(seed), dim_(dim), rng_(seed) {
    if (dim_ == 0) throw std::invalid_argument("HaarSampler: dimension must be positive");
}

ComplexMatrix HaarSampler::sample_ginibre() {
    ComplexMatrix g(dim_, dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) {
            const double re = gauss_(rng_);
            const double im = gauss_(rng_);
            g(r, c) = Complex(re, im);
        }
    return g;
}

ComplexMatrix HaarSampler::sample_unitary() {
    const ComplexMatrix g = sample_ginibre();
    Eigen::MatrixXcd gm(dim_, dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            gm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = g(r, c);

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gm);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r_factor = qr.matrixQR().triangularView<Eigen::Upper>();

    // Fix the gauge: rescale each column by the phase of the matching R
    // diagonal so the distribution is Haar rather than QR-implementation
    // dependent.
    for (std::size_t c = 0; c < dim_; ++c) {
        const Complex d = r_factor(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));
        const double mag = std::abs(d);
        const Complex phase = mag > 0.0 ? d / mag : Complex(1.0, 0.0);
        q.col(static_cast<Eigen::Index>(c)) *= phase;
    }

    ComplexMatrix u(dim_, dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            u(r, c) = q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return u;
}

PureState HaarSampler::sample_pure_state() {
    ComplexMatrix v(dim_, 1);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double re = gauss_(rng_);
        const double im = gauss_(rng_);
        v(i, 0) = Complex(re, im);
        norm_sq += re * re + im * im;
    }
    if (norm_sq <= 0.0) return sample_pure_state();
    v *= Complex(1.0 / std::sqrt(norm_sq), 0.0);
    return PureState(std::move(v));
}

HaarSampler HaarSampler::derive(std::uint64_t stream) const {
    return HaarSampler(mix_seed(seed_, stream), dim_);
}

ComplexMatrix twirl_adjoint(const ComplexMatrix& x) {
    if (!x.is_square() || x.rows() == 0)
        throw std::invalid_argument("twirl_adjoint: expected a nonempty square matrix");
    const Complex t = x.trace();
    ComplexMatrix out = ComplexMatrix::identity(x.rows());
    out *= t / Complex(static_cast<double>(x.rows()), 0.0);
    return out;
}

ComplexMatrix twirl_uustar(const ComplexMatrix& x, std::size_t dim) {
    if (dim < 2) throw std::invalid_argument("twirl_uustar: dimension must be at least 2");
    const std::size_t total = dim * dim;
    if (!x.is_square() || x.rows() != total)
        throw std::invalid_argument("twirl_uustar: operand must act on the doubled space");

    const double d = static_cast<double>(dim);
    const Complex t = x.trace();
    // s = <I| X |I>, the overlap with the rank-one commutant generator.
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) s += x(i * dim + i, j * dim + j);

    const double denom = d * (d * d - 1.0);
    const Complex alpha = (Complex(d, 0.0) * t - s) / Complex(denom, 0.0);
    const Complex beta = (Complex(d, 0.0) * s - t) / Complex(denom, 0.0);

    ComplexMatrix out(total, total);
    for (std::size_t i = 0; i < total; ++i) out(i, i) = alpha;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out(i * dim + i, j * dim + j) += beta;
    return out;
}

ChoiOperator covariantize(const std::vector<InstrumentOutcome>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("covariantize: no outcomes");
    const std::size_t dim = outcomes.front().choi.dim_in();
    ComplexMatrix total_choi(dim * dim, dim * dim);
    for (const InstrumentOutcome& o : outcomes) {
        if (o.choi.dim_in() != dim || o.choi.dim_out() != dim)
            throw std::invalid_argument("covariantize: outcome dimensions disagree");
        check_unitary(o.unitary, dim, "covariantize");
        total_choi += o.choi.matrix();
    }
    const TpCheck tp = validate_tp(ChoiOperator(dim, dim, total_choi));
    if (tp.residual > kTpTol)
        throw std::invalid_argument("covariantize: instrument is not trace preserving overall");

    ComplexMatrix acc(dim * dim, dim * dim);
    for (const InstrumentOutcome& o : outcomes) {
        const ComplexMatrix left = kron(o.unitary.adjoint(), o.unitary.transpose());
        acc += left * o.choi.matrix() * left.adjoint();
    }
    return ChoiOperator(dim, dim, std::move(acc));
}

TwirlMcErrors mc_twirl_errors(std::size_t dim, std::uint64_t n_samples, std::uint64_t seed) {
    if (dim < 2) throw std::invalid_argument("mc_twirl_errors: dimension must be at least 2");
    if (n_samples == 0) throw std::invalid_argument("mc_twirl_errors: need at least one sample");

    // Fixed non-symmetric test operators so the average exercises all
    // matrix elements; derived from the seed for reproducibility.
    HaarSampler fixture(mix_seed(seed, 0x7157u), dim);
    const ComplexMatrix x_small = fixture.sample_ginibre();
    HaarSampler fixture_big(mix_seed(seed, 0x7158u), dim * dim);
    const ComplexMatrix x_big = fixture_big.sample_ginibre();

    const ComplexMatrix exact_small = twirl_adjoint(x_small);
    const ComplexMatrix exact_big = twirl_uustar(x_big, dim);

    HaarSampler sampler(mix_seed(seed, 0x7159u), dim);
    ComplexMatrix acc_small(dim, dim);
    ComplexMatrix acc_big(dim * dim, dim * dim);
    for (std::uint64_t k = 0; k < n_samples; ++k) {
        const ComplexMatrix u = sampler.sample_unitary();
        acc_small += u * x_small * u.adjoint();
        const ComplexMatrix big = kron(u, u.conjugate());
        acc_big += big * x_big * big.adjoint();
    }
    const Complex inv_n(1.0 / static_cast<double>(n_samples), 0.0);
    acc_small *= inv_n;
    acc_big *= inv_n;

    TwirlMcErrors err;
    err.adjoint_error = (acc_small - exact_small).frobenius_norm();
    err.uustar_error = (acc_big - exact_big).frobenius_norm();
    return err;
}

}  // namespace covctrl
