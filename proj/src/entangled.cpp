#include "covctrl/entangled.hpp"

#include <cmath>
#include <stdexcept>

namespace covctrl {

namespace {

// Interleave (H1 ox H3) x (H2 ox H4) block order into H1 ox H2 ox H3 ox H4:
// source factor list is (1,3,2,4), so position k of the target order takes
// source factor perm[k]. The permutation is self-inverse.
const std::vector<std::size_t> kInterleave{0, 2, 1, 3};

std::vector<std::size_t> four_factors(std::size_t dim) {
    return {dim, dim, dim, dim};
}

// Entrywise projector distance; see the twin helper in the single-qudit
// engine for why the overlap formula would floor at sqrt(eps).
double identity_ray_distance(const ComplexMatrix& a) {
    const double norm = a.frobenius_norm();
    if (norm == 0.0) return std::sqrt(2.0);
    const std::size_t d = a.rows();
    const double inv_d = 1.0 / static_cast<double>(d);
    ComplexMatrix v = a;
    v *= Complex(1.0 / norm, 0.0);
    double acc = 0.0;
    for (std::size_t ar = 0; ar < d; ++ar)
        for (std::size_t ac = 0; ac < d; ++ac)
            for (std::size_t br = 0; br < d; ++br)
                for (std::size_t bc = 0; bc < d; ++bc) {
                    Complex entry = v(ar, ac) * std::conj(v(br, bc));
                    if (ar == ac && br == bc) entry -= Complex(inv_d, 0.0);
                    acc += std::norm(entry);
                }
    return std::sqrt(acc);
}

}  // namespace

PureState sample_max_entangled(HaarSampler& sampler) {
    const std::size_t d = sampler.dim();
    if (d < 2) throw std::invalid_argument("sample_max_entangled: local dimension must be at least 2");
    const ComplexMatrix u = sampler.sample_unitary();
    ComplexMatrix v(d * d, 1);
    // (U ox I)|I> / sqrt(D): amplitude at (a, b) is U(a, b) / sqrt(D).
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) v(a * d + b, 0) = u(a, b) * scale;
    return PureState(std::move(v));
}

ComplexMatrix depolarize_b_raw(const ComplexMatrix& m, const DepolarizingParams& params) {
    const std::size_t d = params.dim;
    if (!m.is_square() || m.rows() != d * d)
        throw std::invalid_argument("depolarize_b_raw: operand must act on a D*D space");
    const ComplexMatrix marginal_a = partial_trace(m, {d, d}, {0});
    ComplexMatrix mixed_b = ComplexMatrix::identity(d);
    mixed_b *= Complex(1.0 / static_cast<double>(d), 0.0);
    ComplexMatrix out = kron(marginal_a, mixed_b);
    out *= Complex(params.p, 0.0);
    ComplexMatrix kept = m;
    kept *= Complex(1.0 - params.p, 0.0);
    out += kept;
    return out;
}

DensityOperator depolarize_b(const DensityOperator& rho, const DepolarizingParams& params) {
    return DensityOperator(depolarize_b_raw(rho.matrix(), params));
}

ComplexMatrix embed_pair_operators(const ComplexMatrix& on13, const ComplexMatrix& on24,
                                   std::size_t dim) {
    const std::size_t pair = dim * dim;
    if (!on13.is_square() || on13.rows() != pair || !on24.is_square() || on24.rows() != pair)
        throw std::invalid_argument("embed_pair_operators: operands must act on D*D spaces");
    return permute_subsystems(kron(on13, on24), four_factors(dim), kInterleave);
}

ComplexMatrix pair_entangled_vector(std::size_t dim) {
    const ComplexMatrix omega = max_entangled_vector(dim);
    ComplexMatrix stacked(dim * dim * dim * dim, 1);
    for (std::size_t i = 0; i < omega.rows(); ++i)
        for (std::size_t j = 0; j < omega.rows(); ++j)
            stacked(i * omega.rows() + j, 0) = omega(i, 0) * omega(j, 0);
    return permute_vector_subsystems(stacked, four_factors(dim), kInterleave);
}

BipartiteObjective build_xi(const DepolarizingParams& params) {
    const std::size_t d = params.dim;
    const double dd = static_cast<double>(d);
    const double d2 = dd * dd;
    const double denom = d2 - 1.0;
    const double a = (d2 - params.p) / (d2 * d2 * denom);
    const double b = (1.0 - params.p) / (d2 * denom);
    const double c = (1.0 - params.p) / (d2 * dd * denom);

    const ComplexMatrix omega = max_entangled_vector(d);
    const ComplexMatrix e_pair = omega * omega.adjoint();
    const ComplexMatrix id_pair = ComplexMatrix::identity(d * d);

    ComplexMatrix m = embed_pair_operators(e_pair, e_pair, d);
    m *= Complex(b, 0.0);
    ComplexMatrix cross = embed_pair_operators(id_pair, e_pair, d);
    cross += embed_pair_operators(e_pair, id_pair, d);
    cross *= Complex(-c, 0.0);
    m += cross;
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += Complex(a, 0.0);

    BipartiteObjective obj;
    obj.dim = d;
    obj.p = params.p;
    obj.spectrum = hermitian_eig(m);
    obj.matrix = std::move(m);
    return obj;
}

ComplexMatrix twirl_pair_13(const ComplexMatrix& x, std::size_t dim) {
    const std::size_t pair = dim * dim;
    const std::size_t total = pair * pair;
    if (dim < 2) throw std::invalid_argument("twirl_pair_13: dimension must be at least 2");
    if (!x.is_square() || x.rows() != total)
        throw std::invalid_argument("twirl_pair_13: operand must act on the four-factor space");

    // Work in block order (1,3) ox (2,4) so the twirled pair is contiguous.
    const ComplexMatrix y = permute_subsystems(x, four_factors(dim), kInterleave);

    // Operator-valued analogues of Tr[X] and <I|X|I> on the spectator pair.
    const ComplexMatrix t_op = partial_trace(y, {pair, pair}, {1});
    ComplexMatrix s_op(pair, pair);
    for (std::size_t r = 0; r < pair; ++r)
        for (std::size_t c = 0; c < pair; ++c) {
            Complex acc(0.0, 0.0);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j)
                    acc += y((i * dim + i) * pair + r, (j * dim + j) * pair + c);
            s_op(r, c) = acc;
        }

    const double dd = static_cast<double>(dim);
    const Complex inv_denom(1.0 / (dd * (dd * dd - 1.0)), 0.0);
    ComplexMatrix alpha_op = Complex(dd, 0.0) * t_op - s_op;
    alpha_op *= inv_denom;
    ComplexMatrix beta_op = Complex(dd, 0.0) * s_op - t_op;
    beta_op *= inv_denom;

    const ComplexMatrix omega = max_entangled_vector(dim);
    const ComplexMatrix e_pair = omega * omega.adjoint();
    ComplexMatrix out = kron(ComplexMatrix::identity(pair), alpha_op);
    out += kron(e_pair, beta_op);
    return permute_subsystems(out, four_factors(dim), kInterleave);
}

ComplexMatrix xi_monte_carlo(const DepolarizingParams& params, std::uint64_t n_samples,
                             std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("xi_monte_carlo: need at least one sample");
    const std::size_t d = params.dim;
    HaarSampler sampler(seed, d);
    ComplexMatrix acc(d * d * d * d, d * d * d * d);
    for (std::uint64_t k = 0; k < n_samples; ++k) {
        const PureState psi = sample_max_entangled(sampler);
        const ComplexMatrix proj = psi.projector();
        const ComplexMatrix noisy = depolarize_b_raw(proj, params);
        // Out factors (1,2) carry the state, in factors (3,4) the transposed
        // noisy state; kron already yields the 1,2,3,4 order.
        const ComplexMatrix sample = kron(proj, noisy.transpose());
        acc += twirl_pair_13(sample, d);
    }
    acc *= Complex(1.0 / static_cast<double>(n_samples), 0.0);
    return acc;
}

BipartiteNogoRecord verify_nogo_bipartite_point(std::size_t dim, double p) {
    const DepolarizingParams params(p, dim);
    const double dd = static_cast<double>(dim);
    const double d2 = dd * dd;

    const BipartiteObjective obj = build_xi(params);
    const std::size_t n = obj.matrix.rows();

    BipartiteNogoRecord rec;
    rec.dim = dim;
    rec.p = p;
    rec.lambda_max_numeric = obj.spectrum.eigenvalues.back();
    rec.lambda_max_formula = (1.0 - p) / d2 + p / (d2 * d2);
    rec.f_spectral = d2 * rec.lambda_max_numeric;
    rec.printed_minus_form = 1.0 - p - p / d2;
    rec.discrepancy_flag = std::abs(rec.printed_minus_form - rec.f_spectral) > 1e-12;

    // Do-nothing fidelity computed directly, with no spectral input: overlap
    // of the undisturbed pair state with its one-share-depolarized image.
    const ComplexMatrix psi0 = max_entangled_vector(dim) * Complex(1.0 / std::sqrt(dd), 0.0);
    const ComplexMatrix noisy = depolarize_b_raw(psi0 * psi0.adjoint(), params);
    const Complex overlap = (psi0.adjoint() * noisy * psi0)(0, 0);
    rec.f_do_nothing = overlap.real();

    // Residual of the claimed top eigenvector v = (1/D)|I>_13|I>_24 against
    // the formula eigenvalue; independent of the eigensolver.
    ComplexMatrix v = pair_entangled_vector(dim);
    v *= Complex(1.0 / dd, 0.0);
    ComplexMatrix residual = obj.matrix * v - Complex(rec.lambda_max_formula, 0.0) * v;
    rec.eigvec_residual = residual.frobenius_norm();

    // Reconstruct the maximizer's channel; near p = 1 the top eigenvalue
    // degenerates and an arbitrary numeric eigenvector is ill-conditioned,
    // so below a gap of 1e-6 use the known maximizer instead (the direct
    // residual check above still pins the eigenvector claim).
    const double gap = obj.spectrum.eigenvalues[n - 1] - obj.spectrum.eigenvalues[n - 2];
    ComplexMatrix r_mat(n, n);
    if (gap >= 1e-6) {
        ComplexMatrix top(n, 1);
        for (std::size_t i = 0; i < n; ++i) top(i, 0) = obj.spectrum.eigenvectors(i, n - 1);
        r_mat = top * top.adjoint();
        r_mat *= Complex(d2, 0.0);
    } else {
        const ComplexMatrix omega_pair = pair_entangled_vector(dim);
        r_mat = omega_pair * omega_pair.adjoint();
    }
    const ChoiOperator r_reconstruct(dim * dim, dim * dim, std::move(r_mat));
    const KrausChannel reconstructed = kraus_from_choi(r_reconstruct);
    rec.identity_reconstruction_error = identity_ray_distance(reconstructed.ops().front());

    rec.pass = std::abs(rec.lambda_max_numeric - rec.lambda_max_formula) <= 1e-10 &&
               rec.eigvec_residual <= 1e-10 &&
               std::abs(rec.f_spectral - rec.f_do_nothing) <= 1e-12 &&
               rec.identity_reconstruction_error <= 1e-10 &&
               reconstructed.ops().size() == 1 &&
               rec.discrepancy_flag == (p > 0.0);
    return rec;
}

std::vector<BipartiteNogoRecord> verify_nogo_bipartite(std::size_t dim,
                                                       const std::vector<double>& p_grid) {
    std::vector<BipartiteNogoRecord> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) out.push_back(verify_nogo_bipartite_point(dim, p));
    return out;
}

}  // namespace covctrl
