#include "covctrl/qlinalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace covctrl {

namespace {

using EigenRowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> eigen_view(const ComplexMatrix& m) {
    return Eigen::Map<const EigenRowMajor>(m.entries().data(), static_cast<Eigen::Index>(m.rows()),
                                           static_cast<Eigen::Index>(m.cols()));
}

std::size_t product(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) p *= d;
    return p;
}

// Row-major strides: stride[k] = product of dims after k.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
    return s;
}

void check_square_product(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                          const char* who) {
    if (!m.is_square()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
    if (dims.empty()) throw std::invalid_argument(std::string(who) + ": empty dims");
    for (std::size_t d : dims)
        if (d == 0) throw std::invalid_argument(std::string(who) + ": zero subsystem dimension");
    if (product(dims) != m.rows())
        throw std::invalid_argument(std::string(who) + ": dims product does not match matrix size");
}

void check_permutation(const std::vector<std::size_t>& perm, std::size_t n, const char* who) {
    if (perm.size() != n) throw std::invalid_argument(std::string(who) + ": permutation length mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t v : perm) {
        if (v >= n || seen[v]) throw std::invalid_argument(std::string(who) + ": not a permutation");
        seen[v] = true;
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
    if (!all_finite()) throw std::invalid_argument("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1.0, 0.0);
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = std::conj(entries_[i]);
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

Complex ComplexMatrix::trace() const {
    if (!is_square()) throw std::invalid_argument("trace: matrix must be square");
    Complex t(0.0, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : entries_) s += std::norm(z);
    return std::sqrt(s);
}

bool ComplexMatrix::all_finite() const {
    for (const Complex& z : entries_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("operator+=: shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("operator-=: shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
    for (Complex& z : entries_) z *= scalar;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("operator*: inner dimension mismatch");
    ComplexMatrix out(a.rows(), b.cols());
    Eigen::Map<EigenRowMajor> out_view(out.entries().data(), static_cast<Eigen::Index>(out.rows()),
                                       static_cast<Eigen::Index>(out.cols()));
    out_view.noalias() = eigen_view(a) * eigen_view(b);
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ra = 0; ra < a.rows(); ++ra)
        for (std::size_t ca = 0; ca < a.cols(); ++ca) {
            const Complex va = a(ra, ca);
            if (va == Complex(0.0, 0.0)) continue;
            for (std::size_t rb = 0; rb < b.rows(); ++rb)
                for (std::size_t cb = 0; cb < b.cols(); ++cb)
                    out(ra * b.rows() + rb, ca * b.cols() + cb) = va * b(rb, cb);
        }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                            const std::set<std::size_t>& keep) {
    check_square_product(m, dims, "partial_trace");
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    for (std::size_t k : keep)
        if (k >= dims.size()) throw std::invalid_argument("partial_trace: keep index out of range");

    std::vector<std::size_t> kept, traced;
    for (std::size_t k = 0; k < dims.size(); ++k)
        (keep.count(k) ? kept : traced).push_back(k);

    const std::vector<std::size_t> stride = strides_of(dims);
    std::size_t kept_dim = 1, traced_dim = 1;
    for (std::size_t k : kept) kept_dim *= dims[k];
    for (std::size_t k : traced) traced_dim *= dims[k];

    // Flat offset contributed by a multi-index running over `subs` only.
    auto offset = [&](const std::vector<std::size_t>& subs, std::size_t flat) {
        std::size_t off = 0;
        for (std::size_t k = subs.size(); k-- > 0;) {
            off += (flat % dims[subs[k]]) * stride[subs[k]];
            flat /= dims[subs[k]];
        }
        return off;
    };

    std::vector<std::size_t> kept_off(kept_dim), traced_off(traced_dim);
    for (std::size_t i = 0; i < kept_dim; ++i) kept_off[i] = offset(kept, i);
    for (std::size_t t = 0; t < traced_dim; ++t) traced_off[t] = offset(traced, t);

    ComplexMatrix out(kept_dim, kept_dim);
    for (std::size_t r = 0; r < kept_dim; ++r)
        for (std::size_t c = 0; c < kept_dim; ++c) {
            Complex acc(0.0, 0.0);
            for (std::size_t t = 0; t < traced_dim; ++t)
                acc += m(kept_off[r] + traced_off[t], kept_off[c] + traced_off[t]);
            out(r, c) = acc;
        }
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                std::size_t which) {
    check_square_product(m, dims, "partial_transpose");
    if (which >= dims.size()) throw std::invalid_argument("partial_transpose: subsystem out of range");

    const std::vector<std::size_t> stride = strides_of(dims);
    const std::size_t n = m.rows();
    ComplexMatrix out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t r_sub = (r / stride[which]) % dims[which];
        const std::size_t r_rest = r - r_sub * stride[which];
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t c_sub = (c / stride[which]) % dims[which];
            const std::size_t c_rest = c - c_sub * stride[which];
            out(r_rest + c_sub * stride[which], c_rest + r_sub * stride[which]) = m(r, c);
        }
    }
    return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm) {
    check_square_product(m, dims, "permute_subsystems");
    check_permutation(perm, dims.size(), "permute_subsystems");

    const std::vector<std::size_t> old_stride = strides_of(dims);
    std::vector<std::size_t> new_dims(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) new_dims[k] = dims[perm[k]];
    const std::vector<std::size_t> new_stride = strides_of(new_dims);

    const std::size_t n = m.rows();
    // new_index[old flat index] under the factor reordering.
    std::vector<std::size_t> remap(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t out_idx = 0;
        for (std::size_t k = 0; k < dims.size(); ++k)
            out_idx += ((i / old_stride[perm[k]]) % dims[perm[k]]) * new_stride[k];
        remap[i] = out_idx;
    }

    ComplexMatrix out(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out(remap[r], remap[c]) = m(r, c);
    return out;
}

ComplexMatrix permute_vector_subsystems(const ComplexMatrix& v, const std::vector<std::size_t>& dims,
                                        const std::vector<std::size_t>& perm) {
    if (v.cols() != 1) throw std::invalid_argument("permute_vector_subsystems: expected a column vector");
    if (dims.empty() || product(dims) != v.rows())
        throw std::invalid_argument("permute_vector_subsystems: dims product does not match length");
    check_permutation(perm, dims.size(), "permute_vector_subsystems");

    const std::vector<std::size_t> old_stride = strides_of(dims);
    std::vector<std::size_t> new_dims(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) new_dims[k] = dims[perm[k]];
    const std::vector<std::size_t> new_stride = strides_of(new_dims);

    ComplexMatrix out(v.rows(), 1);
    for (std::size_t i = 0; i < v.rows(); ++i) {
        std::size_t out_idx = 0;
        for (std::size_t k = 0; k < dims.size(); ++k)
            out_idx += ((i / old_stride[perm[k]]) % dims[perm[k]]) * new_stride[k];
        out(out_idx, 0) = v(i, 0);
    }
    return out;
}

ComplexMatrix max_entangled_vector(std::size_t dim) {
    if (dim < 2) throw std::invalid_argument("max_entangled_vector: dimension must be at least 2");
    ComplexMatrix v(dim * dim, 1);
    for (std::size_t i = 0; i < dim; ++i) v(i * dim + i, 0) = Complex(1.0, 0.0);
    return v;
}

HermitianEigenResult hermitian_eig(const ComplexMatrix& m) {
    if (!m.is_square()) throw std::invalid_argument("hermitian_eig: matrix must be square");
    const ComplexMatrix adj = m.adjoint();
    const double herm_residual = (m - adj).frobenius_norm();
    if (herm_residual > 1e-10 * m.frobenius_norm())
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian within tolerance");

    const std::size_t n = m.rows();
    Eigen::MatrixXcd sym(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            sym(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                0.5 * (m(r, c) + std::conj(m(c, r)));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver failed to converge");

    HermitianEigenResult out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
        for (std::size_t r = 0; r < n; ++r)
            out.eigenvectors(r, k) =
                solver.eigenvectors()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
    }
    return out;
}

}  // namespace covctrl
