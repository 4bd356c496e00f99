#include "covctrl/twirl.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace covctrl;
using covctrl_test::frob_dist;
using covctrl_test::random_hermitian;
using covctrl_test::random_tp_channel;

namespace {

// vec(A) as a column, row-major stacking: vec(A)[i*D + j] = A(i, j).
ComplexMatrix vec_of(const ComplexMatrix& a) {
    ComplexMatrix v(a.rows() * a.cols(), 1);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) v(i * a.cols() + j, 0) = a(i, j);
    return v;
}

// |I><I| on the doubled space, trace D.
ComplexMatrix max_ent_projector(std::size_t dim) {
    ComplexMatrix out(dim * dim, dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out(i * dim + i, j * dim + j) = Complex(1.0, 0.0);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("twirl");

TEST_CASE("seed mixing is deterministic and separates streams") {
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    CHECK(mix_seed(1, 2) != mix_seed(2, 2));
    CHECK(mix_seed(0, 0) != 0);
}

TEST_CASE("sampler determinism and stream independence") {
    HaarSampler a(42, 3);
    HaarSampler b(42, 3);
    CHECK(frob_dist(a.sample_unitary(), b.sample_unitary()) == 0.0);
    CHECK(frob_dist(a.sample_ginibre(), b.sample_ginibre()) == 0.0);

    HaarSampler base(42, 3);
    CHECK(frob_dist(base.derive(5).sample_unitary(), base.derive(5).sample_unitary()) == 0.0);
    CHECK(frob_dist(base.derive(5).sample_unitary(), base.derive(6).sample_unitary()) > 1e-3);

    CHECK_THROWS_AS(HaarSampler(1, 0), std::invalid_argument);
}

TEST_CASE("every sampled unitary is unitary to machine precision") {
    HaarSampler sampler(7, 3);
    const ComplexMatrix id = ComplexMatrix::identity(3);
    for (int k = 0; k < 1000; ++k) {
        const ComplexMatrix u = sampler.sample_unitary();
        CHECK(frob_dist(u.adjoint() * u, id) <= 1e-12);
    }
}

TEST_CASE("Haar first and second moments over a fixed-seed run") {
    const std::size_t n = 10000;
    HaarSampler sampler(2024, 2);
    ComplexMatrix mean(2, 2);
    double second = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexMatrix u = sampler.sample_unitary();
        mean += u;
        second += std::norm(u(0, 0));
    }
    mean *= Complex(1.0 / static_cast<double>(n), 0.0);
    second /= static_cast<double>(n);

    // Haar mean is zero, E|U_00|^2 = 1/D; 5/sqrt(N)-scale tolerances.
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(mean(r, c)) <= 0.05);
    CHECK(second == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("pure state samples: norm, first moment, symmetric second moment") {
    const std::size_t n = 100000;
    HaarSampler sampler(99, 2);
    ComplexMatrix first(2, 2);
    ComplexMatrix pair(4, 4);
    for (std::size_t k = 0; k < n; ++k) {
        const PureState psi = sampler.sample_pure_state();
        CHECK(psi.amplitudes().frobenius_norm() == doctest::Approx(1.0).epsilon(1e-12));
        const ComplexMatrix rho = psi.projector();
        first += rho;
        pair += kron(rho, rho);
    }
    const Complex inv_n(1.0 / static_cast<double>(n), 0.0);
    first *= inv_n;
    pair *= inv_n;

    ComplexMatrix half_identity = ComplexMatrix::identity(2);
    half_identity *= Complex(0.5, 0.0);
    CHECK(frob_dist(first, half_identity) <= 0.01);

    // E[rho ox rho] = 2/(D(D+1)) * (I + SWAP)/2 on two qubits
    ComplexMatrix swap(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = Complex(1.0, 0.0);
    ComplexMatrix target = ComplexMatrix::identity(4) + swap;
    target *= Complex(1.0 / 6.0, 0.0);
    CHECK(frob_dist(pair, target) <= 0.02);
}

TEST_CASE("adjoint twirl closed form") {
    const ComplexMatrix id = ComplexMatrix::identity(3);
    CHECK(frob_dist(twirl_adjoint(id), id) == 0.0);

    ComplexMatrix hop(2, 2);
    hop(0, 1) = Complex(1.0, 0.0);
    CHECK(twirl_adjoint(hop).frobenius_norm() == 0.0);

    const ComplexMatrix x = random_hermitian(31, 4);
    ComplexMatrix expected = ComplexMatrix::identity(4);
    expected *= x.trace() / Complex(4.0, 0.0);
    CHECK(frob_dist(twirl_adjoint(x), expected) <= 1e-15);

    CHECK_THROWS_AS(twirl_adjoint(ComplexMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("doubled-space twirl: fixed points and moment preservation") {
    const std::size_t dim = 3;
    const ComplexMatrix proj = max_ent_projector(dim);
    CHECK(frob_dist(twirl_uustar(proj, dim), proj) <= 1e-14);

    const ComplexMatrix id = ComplexMatrix::identity(dim * dim);
    CHECK(frob_dist(twirl_uustar(id, dim), id) <= 1e-14);

    const ComplexMatrix x = random_hermitian(55, dim * dim);
    const ComplexMatrix tx = twirl_uustar(x, dim);
    CHECK(std::abs(tx.trace() - x.trace()) <= 1e-12);
    // <I|X|I> is the second matched moment
    Complex sx(0, 0), stx(0, 0);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            sx += x(i * dim + i, j * dim + j);
            stx += tx(i * dim + i, j * dim + j);
        }
    CHECK(std::abs(sx - stx) <= 1e-12);

    CHECK_THROWS_AS(twirl_uustar(x, 1), std::invalid_argument);
    CHECK_THROWS_AS(twirl_uustar(ComplexMatrix(3, 3), 3), std::invalid_argument);
}

TEST_CASE("doubled-space twirl is an idempotent self-adjoint projection") {
    const std::size_t dim = 2;
    const ComplexMatrix x = random_hermitian(66, dim * dim);
    const ComplexMatrix y = random_hermitian(67, dim * dim);
    const ComplexMatrix tx = twirl_uustar(x, dim);
    const ComplexMatrix ty = twirl_uustar(y, dim);

    CHECK(frob_dist(twirl_uustar(tx, dim), tx) <= 1e-14);

    // self-adjoint as a superoperator: <Y, T(X)> = <T(Y), X>
    const Complex lhs = (y.adjoint() * tx).trace();
    const Complex rhs = (ty.adjoint() * x).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-10);
}

TEST_CASE("doubled-space twirl output commutes with U ox U*") {
    const std::size_t dim = 3;
    const ComplexMatrix tx = twirl_uustar(random_hermitian(68, dim * dim), dim);
    HaarSampler sampler(69, dim);
    for (int k = 0; k < 20; ++k) {
        const ComplexMatrix u = sampler.sample_unitary();
        const ComplexMatrix big = kron(u, u.conjugate());
        CHECK(frob_dist(big * tx, tx * big) <= 1e-10);
    }
}

TEST_CASE("Monte Carlo twirls converge toward the closed forms") {
    const TwirlMcErrors e3 = mc_twirl_errors(2, 1000, 8080);
    const TwirlMcErrors e4 = mc_twirl_errors(2, 10000, 8080);
    const TwirlMcErrors e5 = mc_twirl_errors(2, 100000, 8080);
    CHECK(e3.adjoint_error > e4.adjoint_error);
    CHECK(e4.adjoint_error > e5.adjoint_error);
    CHECK(e3.uustar_error > e4.uustar_error);
    CHECK(e4.uustar_error > e5.uustar_error);
    // ~1/sqrt(N): 1e5 samples land well below the 1e3 error scale
    CHECK(e5.adjoint_error <= 0.02);
    CHECK(e5.uustar_error <= 0.05);

    CHECK_THROWS_AS(mc_twirl_errors(1, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(mc_twirl_errors(2, 0, 1), std::invalid_argument);
}

TEST_CASE("covariantize: identity-labeled max-entangled projector is a fixed point") {
    std::vector<InstrumentOutcome> outcomes;
    outcomes.push_back({ComplexMatrix::identity(2), ChoiOperator(2, 2, max_ent_projector(2))});
    const ChoiOperator out = covariantize(outcomes);
    CHECK(frob_dist(out.matrix(), max_ent_projector(2)) <= 1e-13);
}

TEST_CASE("covariantize: a unitary-conjugation outcome labeled by its own unitary") {
    // (U^dagger ox U^T) vec(U) = vec(U): the sandwich leaves the Choi of
    // conjugation-by-U unchanged, so the covariantized seed IS the input.
    const std::size_t dim = 3;
    HaarSampler sampler(404, dim);
    const ComplexMatrix u = sampler.sample_unitary();
    const ComplexMatrix v = vec_of(u);
    const ComplexMatrix r = v * v.adjoint();

    std::vector<InstrumentOutcome> outcomes;
    outcomes.push_back({u, ChoiOperator(dim, dim, r)});
    const ChoiOperator out = covariantize(outcomes);
    CHECK(frob_dist(out.matrix(), r) <= 1e-13);
}

TEST_CASE("covariantize preserves fidelity against any twirl-invariant objective") {
    const std::size_t dim = 2;
    // Random 2-outcome instrument: split a 4-operator channel into halves,
    // each completely positive, summing to a trace-preserving map.
    const KrausChannel channel = random_tp_channel(321, dim, 4);
    ComplexMatrix r_a(dim * dim, dim * dim);
    ComplexMatrix r_b(dim * dim, dim * dim);
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const ComplexMatrix v = vec_of(channel.ops()[mu]);
        if (mu < 2)
            r_a += v * v.adjoint();
        else
            r_b += v * v.adjoint();
    }

    HaarSampler sampler(322, dim);
    std::vector<InstrumentOutcome> outcomes;
    outcomes.push_back({sampler.sample_unitary(), ChoiOperator(dim, dim, r_a)});
    outcomes.push_back({sampler.sample_unitary(), ChoiOperator(dim, dim, r_b)});
    const ChoiOperator seed = covariantize(outcomes);

    // The seed keeps trace D but is not itself trace preserving when the
    // labels differ; the group average it seeds is, so its twirl must pass.
    CHECK(seed.matrix().trace().real() == doctest::Approx(2.0));
    const ChoiOperator averaged(dim, dim, twirl_uustar(seed.matrix(), dim));
    CHECK(validate_tp(averaged).pass);

    // exact preservation: objectives in span{I, |I><I|} cannot tell the
    // covariantized seed from the summed original
    ComplexMatrix objective = ComplexMatrix::identity(4);
    objective *= Complex(0.3, 0.0);
    ComplexMatrix rank_one = max_ent_projector(2);
    rank_one *= Complex(0.2, 0.0);
    objective += rank_one;

    const ComplexMatrix summed = r_a + r_b;
    const Complex f_original = (objective * summed).trace();
    const Complex f_covariant = (objective * seed.matrix()).trace();
    CHECK(std::abs(f_original - f_covariant) <= 1e-12);

    // same statement for a generic twirled operator as the objective
    const ComplexMatrix w = twirl_uustar(random_hermitian(323, 4), 2);
    CHECK(std::abs((w * summed).trace() - (w * seed.matrix()).trace()) <= 1e-12);
}

TEST_CASE("covariantize input validation") {
    CHECK_THROWS_AS(covariantize({}), std::invalid_argument);

    // halves of the identity are not trace preserving alone
    ComplexMatrix half = max_ent_projector(2);
    half *= Complex(0.5, 0.0);
    std::vector<InstrumentOutcome> not_tp;
    not_tp.push_back({ComplexMatrix::identity(2), ChoiOperator(2, 2, std::move(half))});
    CHECK_THROWS_AS(covariantize(not_tp), std::invalid_argument);

    // non-unitary label
    ComplexMatrix shrunk = ComplexMatrix::identity(2);
    shrunk *= Complex(0.5, 0.0);
    std::vector<InstrumentOutcome> bad_label;
    bad_label.push_back({std::move(shrunk), ChoiOperator(2, 2, max_ent_projector(2))});
    CHECK_THROWS_AS(covariantize(bad_label), std::invalid_argument);

    // label dimension mismatch
    std::vector<InstrumentOutcome> bad_dim;
    bad_dim.push_back({ComplexMatrix::identity(3), ChoiOperator(2, 2, max_ent_projector(2))});
    CHECK_THROWS_AS(covariantize(bad_dim), std::invalid_argument);
}

TEST_SUITE_END();
