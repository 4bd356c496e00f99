// Dense complex linear algebra shared by every other module: Kronecker
// products, partial trace / transpose, subsystem permutation, Hermitian
// eigendecomposition and the unnormalized maximally entangled vector.
//
// Storage is row-major throughout, and composite indices follow the
// convention flat = i_a * dim_b + i_b (first factor is the slow index).
// All tensor bookkeeping in this codebase relies on that single rule.

#ifndef COVCTRL_QLINALG_HPP
#define COVCTRL_QLINALG_HPP

#include <complex>
#include <cstddef>
#include <set>
#include <vector>

namespace covctrl {

using Complex = std::complex<double>;

/// Dense complex matrix with explicit dimensions, row-major entries.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    /// Zero-filled rows x cols matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols);

    /// Takes ownership of row-major entries; throws if the count does not
    /// match rows*cols or any entry is non-finite.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    const std::vector<Complex>& entries() const { return entries_; }
    std::vector<Complex>& entries() { return entries_; }

    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    ComplexMatrix adjoint() const;

    Complex trace() const;
    double frobenius_norm() const;
    bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scalar);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
    friend ComplexMatrix operator*(ComplexMatrix m, Complex s) { return m *= s; }

    /// Matrix product.
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

/// Full spectrum of a Hermitian matrix: eigenvalues ascending, eigenvectors
/// as orthonormal columns (column k pairs with eigenvalues[k]).
struct HermitianEigenResult {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Kronecker product; index convention (i_a*rows_b + i_b, j_a*cols_b + j_b).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace over the subsystems NOT in `keep`; the kept subsystems retain their
/// original relative order. `dims` lists the subsystem dimensions whose
/// product must equal the (square) matrix dimension.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                            const std::set<std::size_t>& keep);

/// Transpose applied only on subsystem `which`.
ComplexMatrix partial_transpose(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                std::size_t which);

/// Reorders tensor factors of a square matrix: the subsystem at old position
/// perm[k] lands at new position k. perm must be a permutation of 0..n-1.
ComplexMatrix permute_subsystems(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm);

/// Same reordering for a column vector.
ComplexMatrix permute_vector_subsystems(const ComplexMatrix& v, const std::vector<std::size_t>& dims,
                                        const std::vector<std::size_t>& perm);

/// Unnormalized maximally entangled column vector of length dim^2:
/// 1 at indices i*dim+i, 0 elsewhere. Squared norm equals dim.
ComplexMatrix max_entangled_vector(std::size_t dim);

/// Hermitian eigendecomposition. The input is symmetrized as (M + M†)/2
/// before factoring; inputs with ||M - M†||_F > 1e-10 * ||M||_F are rejected.
HermitianEigenResult hermitian_eig(const ComplexMatrix& m);

}  // namespace covctrl

#endif
