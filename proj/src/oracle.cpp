#include "covctrl/oracle.hpp"

#include "covctrl/twirl.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace covctrl {

namespace {

using RowMajorMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<RowMajorMat> map_of(ComplexMatrix& m) {
    return Eigen::Map<RowMajorMat>(m.entries().data(), static_cast<Eigen::Index>(m.rows()),
                                   static_cast<Eigen::Index>(m.cols()));
}

constexpr std::size_t kPlateauWindow = 50;   // non-improving iterations before stopping
constexpr double kFixedPointTol = 1e-12;     // iterate drift that counts as a stall
constexpr std::size_t kMaxInnerRounds = 1000;
constexpr double kInnerPsdTol = 1e-12;
constexpr double kInnerTpTol = 1e-11;
constexpr double kDualFeasTol = 1e-10;
constexpr double kAgreementTol = 1e-5;
constexpr double kIdentityActionTol = 1e-3;

double objective_value(const ComplexMatrix& obj, const ComplexMatrix& r) {
    Complex acc(0.0, 0.0);
    const std::size_t n = obj.rows();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) acc += obj(a, b) * r(b, a);
    return acc.real();
}

double iterate_drift(const ComplexMatrix& a, const ComplexMatrix& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) acc += std::norm(a.entries()[i] - b.entries()[i]);
    return std::sqrt(acc);
}

// Tr_out[R] as the sum of the out-indexed diagonal blocks.
Eigen::MatrixXcd reduced_input_state(ComplexMatrix& r, std::size_t out_dim, std::size_t in_dim) {
    auto view = map_of(r);
    const Eigen::Index n_in = static_cast<Eigen::Index>(in_dim);
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n_in, n_in);
    for (std::size_t o = 0; o < out_dim; ++o)
        t += view.block(static_cast<Eigen::Index>(o * in_dim), static_cast<Eigen::Index>(o * in_dim),
                        n_in, n_in);
    return t;
}

double tp_residual(ComplexMatrix& r, std::size_t out_dim, std::size_t in_dim) {
    const Eigen::MatrixXcd t = reduced_input_state(r, out_dim, in_dim);
    return (t - Eigen::MatrixXcd::Identity(t.rows(), t.cols())).norm();
}

double min_eigenvalue(ComplexMatrix& r) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(map_of(r), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("solve_primal: eigensolver failed to converge");
    return solver.eigenvalues()(0);
}

// Alternate the two projections until the iterate is PSD and trace
// preserving at once; each single projection is exact for its own set but
// disturbs the other, hence the loop.  The alternation can stall when the
// trace-preserving subspace meets the cone tangentially at the active face,
// so the exit path re-certifies feasibility: project to exact trace
// preservation, then absorb any residual negativity into an admixture of
// I/out_dim (itself exactly trace preserving).  Every iterate handed back to
// the ascent is therefore feasible and its objective value is a true lower
// bound on the optimum.
void make_feasible(ComplexMatrix& r, std::size_t out_dim, std::size_t in_dim) {
    for (std::size_t round = 0; round < kMaxInnerRounds; ++round) {
        project_tp(r, out_dim, in_dim);
        const double min_eig = clip_psd(r);
        if (min_eig >= -kInnerPsdTol && tp_residual(r, out_dim, in_dim) <= kInnerTpTol) break;
    }
    project_tp(r, out_dim, in_dim);
    const double min_eig = min_eigenvalue(r);
    if (min_eig < 0.0) {
        const double mixed = 1.0 / static_cast<double>(out_dim);
        const double s = -min_eig / (-min_eig + mixed);
        auto view = map_of(r);
        view *= Complex(1.0 - s, 0.0);
        for (Eigen::Index i = 0; i < view.rows(); ++i) view(i, i) += Complex(s * mixed, 0.0);
    }
}

void check_problem(const SdpProblem& prob, const char* who) {
    if (prob.out_dim == 0 || prob.in_dim == 0)
        throw std::invalid_argument(std::string(who) + ": dimensions must be positive");
    if (!prob.objective.is_square() || prob.objective.rows() != prob.out_dim * prob.in_dim)
        throw std::invalid_argument(std::string(who) + ": objective size does not match dimensions");
    if (!(prob.trace_budget > 0.0))
        throw std::invalid_argument(std::string(who) + ": trace budget must be positive");
}

}  // namespace

SdpProblem make_problem(const ControlObjective& obj) {
    SdpProblem prob;
    prob.objective = obj.matrix;
    prob.out_dim = obj.dim;
    prob.in_dim = obj.dim;
    prob.trace_budget = static_cast<double>(obj.dim);
    return prob;
}

SdpProblem make_problem(const BipartiteObjective& obj) {
    SdpProblem prob;
    prob.objective = obj.matrix;
    prob.out_dim = obj.dim * obj.dim;
    prob.in_dim = obj.dim * obj.dim;
    prob.trace_budget = static_cast<double>(obj.dim * obj.dim);
    return prob;
}

void project_tp(ComplexMatrix& r, std::size_t out_dim, std::size_t in_dim) {
    if (!r.is_square() || r.rows() != out_dim * in_dim)
        throw std::invalid_argument("project_tp: matrix size does not match dimensions");
    const Eigen::Index n_in = static_cast<Eigen::Index>(in_dim);
    Eigen::MatrixXcd defect =
        (Eigen::MatrixXcd::Identity(n_in, n_in) - reduced_input_state(r, out_dim, in_dim)) /
        static_cast<double>(out_dim);
    auto view = map_of(r);
    for (std::size_t o = 0; o < out_dim; ++o)
        view.block(static_cast<Eigen::Index>(o * in_dim), static_cast<Eigen::Index>(o * in_dim),
                   n_in, n_in) += defect;
}

double clip_psd(ComplexMatrix& r) {
    if (!r.is_square() || r.rows() == 0)
        throw std::invalid_argument("clip_psd: expected a nonempty square matrix");
    auto view = map_of(r);
    // The solver reads only one triangle, so a Hermiticity check is not
    // needed; the ascent iterates are Hermitian by construction.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(view);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("clip_psd: eigensolver failed to converge");

    const double min_eig = solver.eigenvalues()(0);
    if (min_eig >= 0.0) return min_eig;

    const Eigen::Index n = view.rows();
    Eigen::Index first_pos = 0;
    while (first_pos < n && solver.eigenvalues()(first_pos) <= 0.0) ++first_pos;
    const Eigen::Index n_pos = n - first_pos;
    if (n_pos == 0) {
        view.setZero();
        return min_eig;
    }
    const auto kept = solver.eigenvectors().rightCols(n_pos);
    view.noalias() =
        kept * solver.eigenvalues().tail(n_pos).asDiagonal() * kept.adjoint();
    return min_eig;
}

SdpSolution solve_primal(const SdpProblem& prob, std::size_t max_iter, double tol,
                         const ComplexMatrix* init, const IterateObserver& observer) {
    check_problem(prob, "solve_primal");
    const std::size_t n = prob.out_dim * prob.in_dim;

    const HermitianEigenResult obj_eig = hermitian_eig(prob.objective);
    const double lambda_max = obj_eig.eigenvalues.back();
    if (!(lambda_max > 0.0))
        throw std::invalid_argument("solve_primal: objective must have a positive top eigenvalue");
    const double eta = 1.0 / lambda_max;

    ComplexMatrix r(n, n);
    if (init) {
        if (!init->is_square() || init->rows() != n)
            throw std::invalid_argument("solve_primal: init size does not match problem");
        r = *init;
    } else {
        const Complex fill(prob.trace_budget / static_cast<double>(n), 0.0);
        for (std::size_t i = 0; i < n; ++i) r(i, i) = fill;
    }
    make_feasible(r, prob.out_dim, prob.in_dim);

    double best_value = objective_value(prob.objective, r);
    ComplexMatrix best_r = r;
    if (observer) observer(0, best_value);

    const ComplexMatrix step = Complex(eta, 0.0) * prob.objective;
    ComplexMatrix prev = r;
    std::size_t since_best = 0;
    std::size_t iterations = 0;
    bool converged = false;
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        iterations = iter;
        r += step;
        make_feasible(r, prob.out_dim, prob.in_dim);
        const double value = objective_value(prob.objective, r);
        if (observer) observer(iter, value);
        if (value > best_value + tol) {
            best_value = value;
            best_r = r;
            since_best = 0;
        } else {
            if (value > best_value) {
                best_value = value;
                best_r = r;
            }
            if (++since_best >= kPlateauWindow) {
                converged = true;
                break;
            }
        }
        // Step-then-project is a deterministic map, so a stalled iterate can
        // never improve again; stopping now matches waiting out the plateau.
        const double drift = iterate_drift(r, prev);
        if (drift <= kFixedPointTol * std::max(1.0, r.frobenius_norm())) {
            converged = true;
            break;
        }
        prev = r;
    }

    const double dual_value = static_cast<double>(prob.in_dim) * lambda_max;
    SdpSolution sol{ChoiOperator(prob.out_dim, prob.in_dim, std::move(best_r)),
                    best_value,
                    dual_value,
                    dual_value - best_value,
                    iterations,
                    converged};
    return sol;
}

DualCertificate dual_certificate(const SdpProblem& prob) {
    check_problem(prob, "dual_certificate");
    const HermitianEigenResult obj_eig = hermitian_eig(prob.objective);
    const double lambda_max = obj_eig.eigenvalues.back();

    // Slack I_out ox (lambda_max I_in) - Objective.
    ComplexMatrix slack = prob.objective;
    slack *= Complex(-1.0, 0.0);
    for (std::size_t i = 0; i < slack.rows(); ++i) slack(i, i) += Complex(lambda_max, 0.0);
    const HermitianEigenResult slack_eig = hermitian_eig(slack);

    DualCertificate cert;
    cert.upper_bound = static_cast<double>(prob.in_dim) * lambda_max;
    cert.min_slack_eigenvalue = slack_eig.eigenvalues.front();
    cert.feasible = cert.min_slack_eigenvalue >= -kDualFeasTol;
    return cert;
}

CertificationRecord certify_point(std::size_t dim, double p, bool bipartite, std::size_t restarts,
                                  std::uint64_t seed) {
    const std::size_t dim_cap = bipartite ? 3 : 4;
    if (dim < 2) throw std::invalid_argument("certify_point: dimension must be at least 2");
    if (dim > dim_cap)
        throw std::invalid_argument("certify_point: dimension exceeds the desk-scale bound");

    const DepolarizingParams params(p, dim);
    SdpProblem prob;
    double f_do_nothing = 0.0;
    if (bipartite) {
        prob = make_problem(build_xi(params));
        f_do_nothing = 1.0 - p + p / static_cast<double>(dim * dim);
    } else {
        prob = make_problem(build_upsilon(params));
        f_do_nothing = 1.0 - p + p / static_cast<double>(dim);
    }
    const DualCertificate cert = dual_certificate(prob);

    CertificationRecord rec;
    rec.dim = dim;
    rec.p = p;
    rec.bipartite = bipartite;
    rec.restarts = restarts;
    rec.dual_value = cert.upper_bound;
    rec.f_do_nothing = f_do_nothing;

    std::size_t agreeing = 0;
    bool all_converged = true;
    double best_value = -std::numeric_limits<double>::infinity();
    std::size_t best_iterations = 0;
    ChoiOperator best_r(prob.out_dim, prob.in_dim, ComplexMatrix::identity(prob.out_dim * prob.in_dim));
    const std::size_t n = prob.out_dim * prob.in_dim;

    for (std::size_t run = 0; run <= restarts; ++run) {
        SdpSolution sol = [&] {
            if (run == 0) return solve_primal(prob);
            // Random PSD start, scaled to the feasible trace.
            HaarSampler sampler(mix_seed(seed, run), n);
            const ComplexMatrix g = sampler.sample_ginibre();
            ComplexMatrix w = g * g.adjoint();
            const double tr = w.trace().real();
            w *= Complex(prob.trace_budget / tr, 0.0);
            return solve_primal(prob, 100000, 1e-9, &w);
        }();
        all_converged = all_converged && sol.converged;
        if (std::abs(sol.primal_value - cert.upper_bound) <= kAgreementTol) ++agreeing;
        if (sol.primal_value > best_value) {
            best_value = sol.primal_value;
            best_iterations = sol.iterations;
            best_r = sol.r;
        }
    }

    rec.primal_value = best_value;
    rec.gap = rec.dual_value - rec.primal_value;
    rec.converged = all_converged;
    rec.iterations = best_iterations;
    rec.restarts_agreeing = agreeing;

    // Diagnostic only: whether the chosen maximizer acts as the identity on
    // probe states. Never asserted; the maximizer is not unique at p = 1.
    const KrausChannel channel = kraus_from_choi(best_r);
    HaarSampler probe(mix_seed(seed, 0xA11CE5ULL), prob.in_dim);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const DensityOperator rho = DensityOperator::from_pure(probe.sample_pure_state());
        ComplexMatrix out(prob.out_dim, prob.out_dim);
        for (const ComplexMatrix& a : channel.ops()) out += a * rho.matrix() * a.adjoint();
        worst = std::max(worst, (out - rho.matrix()).frobenius_norm());
    }
    rec.identity_action = worst <= kIdentityActionTol;

    rec.pass = cert.feasible && all_converged && std::abs(rec.gap) <= kAgreementTol &&
               std::abs(rec.primal_value - f_do_nothing) <= kAgreementTol &&
               std::abs(rec.dual_value - f_do_nothing) <= kAgreementTol &&
               agreeing == restarts + 1;
    return rec;
}

std::vector<CertificationRecord> certify_nogo(std::size_t dim, const std::vector<double>& p_grid,
                                              bool bipartite, std::size_t restarts,
                                              std::uint64_t seed) {
    std::vector<CertificationRecord> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) out.push_back(certify_point(dim, p, bipartite, restarts, seed));
    return out;
}

}  // namespace covctrl
