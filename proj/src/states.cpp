#include "lueq/states.hpp"

#include <cmath>
#include <string>

namespace lueq {

DensityMatrix validate(const ComplexMatrix& mat, BipartiteDims dims, double tol) {
    if (dims.m < 2 || dims.n < 2) {
        throw InvalidParams("validate: factor dimensions must be at least 2");
    }
    const std::size_t d = dims.total();
    if (mat.rows() != d || mat.cols() != d) {
        throw ShapeMismatch("ShapeMismatch: matrix is " + std::to_string(mat.rows()) + "x" +
                            std::to_string(mat.cols()) + ", expected " + std::to_string(d) +
                            "x" + std::to_string(d));
    }
    if (!mat.all_finite()) {
        throw InvalidParams("validate: matrix contains non-finite entries");
    }
    const double herm_dev = frobenius_distance(mat, mat.adjoint());
    if (herm_dev >= tol) {
        throw NotHermitian("NotHermitian: ||mat - mat^dag||_F = " + std::to_string(herm_dev));
    }
    const double trace_dev = std::abs(mat.trace() - Complex(1.0));
    if (trace_dev >= tol) {
        throw TraceNotOne("TraceNotOne: |tr(mat) - 1| = " + std::to_string(trace_dev));
    }
    const HermitianEig eig = eigh(mat, tol);
    const double min_eig = eig.eigenvalues.back();
    if (min_eig <= -tol) {
        throw NotPositiveSemidefinite("NotPositiveSemidefinite: smallest eigenvalue = " +
                                      std::to_string(min_eig));
    }
    return DensityMatrix{dims, mat};
}

DensityMatrix apply_local_unitary(const DensityMatrix& rho, const LocalUnitary& lu) {
    if (lu.u.rows() != rho.dims.m || lu.u.cols() != rho.dims.m ||
        lu.v.rows() != rho.dims.n || lu.v.cols() != rho.dims.n) {
        throw ShapeMismatch("apply_local_unitary: unitary dims do not match state dims");
    }
    const ComplexMatrix w = kron(lu.u, lu.v);
    return DensityMatrix{rho.dims, w * rho.mat * w.adjoint()};
}

DensityMatrix werner(WernerParams params) {
    if (params.e < 0.0 || params.f < 0.0 || params.f > 1.0 - params.e) {
        throw InvalidParams("werner: requires e >= 0 and 0 <= f <= 1 - e");
    }
    const double e = params.e;
    const double f = params.f;
    ComplexMatrix mat(4, 4);
    mat(0, 0) = (1.0 - e - f) / 3.0;
    mat(1, 1) = (1.0 + 2.0 * f) / 6.0;
    mat(2, 2) = (1.0 + 2.0 * f) / 6.0;
    mat(1, 2) = (1.0 - 4.0 * f) / 6.0;
    mat(2, 1) = (1.0 - 4.0 * f) / 6.0;
    mat(3, 3) = (1.0 + e - f) / 3.0;
    return DensityMatrix{BipartiteDims{2, 2}, mat};
}

DensityMatrix random_density(BipartiteDims dims, std::size_t rank, std::uint64_t seed) {
    const std::size_t d = dims.total();
    if (rank < 1 || rank > d) {
        throw InvalidRank("random_density: rank " + std::to_string(rank) +
                          " outside [1, " + std::to_string(d) + "]");
    }
    Rng rng(seed);
    ComplexMatrix g(d, rank);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < rank; ++c) g(r, c) = rng.complex_gaussian();
    ComplexMatrix rho = g * g.adjoint();
    const double tr = rho.trace().real();
    rho *= Complex(1.0 / tr);
    return DensityMatrix{dims, rho};
}

ComplexMatrix haar_unitary(std::size_t dim, Rng& rng) {
    ComplexMatrix g(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) g(r, c) = rng.complex_gaussian();
    // Column-wise Gram-Schmidt with one re-orthogonalization pass. The
    // normalization divides by a positive real, so R_jj > 0 throughout.
    ComplexMatrix q(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<Complex> w = g.column_vector(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t c = 0; c < j; ++c) {
                Complex proj = 0.0;
                for (std::size_t r = 0; r < dim; ++r) proj += std::conj(q(r, c)) * w[r];
                for (std::size_t r = 0; r < dim; ++r) w[r] -= proj * q(r, c);
            }
        }
        double nrm = 0.0;
        for (const Complex& z : w) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < dim; ++r) q(r, j) = w[r] / nrm;
    }
    return q;
}

LocalUnitary random_local_unitary(BipartiteDims dims, std::uint64_t seed) {
    Rng rng(seed);
    ComplexMatrix u = haar_unitary(dims.m, rng);
    ComplexMatrix v = haar_unitary(dims.n, rng);
    return LocalUnitary{std::move(u), std::move(v)};
}

ComplexMatrix partial_trace_second(const ComplexMatrix& mat, BipartiteDims dims) {
    ComplexMatrix out(dims.m, dims.m);
    for (std::size_t i = 0; i < dims.m; ++i)
        for (std::size_t k = 0; k < dims.m; ++k) {
            Complex s = 0.0;
            for (std::size_t j = 0; j < dims.n; ++j) s += mat(i * dims.n + j, k * dims.n + j);
            out(i, k) = s;
        }
    return out;
}

ComplexMatrix partial_trace_first(const ComplexMatrix& mat, BipartiteDims dims) {
    ComplexMatrix out(dims.n, dims.n);
    for (std::size_t j = 0; j < dims.n; ++j)
        for (std::size_t l = 0; l < dims.n; ++l) {
            Complex s = 0.0;
            for (std::size_t i = 0; i < dims.m; ++i) s += mat(i * dims.n + j, i * dims.n + l);
            out(j, l) = s;
        }
    return out;
}

DensityMatrix pure_density(const std::vector<Complex>& psi, BipartiteDims dims) {
    const std::size_t d = dims.total();
    if (psi.size() != d) {
        throw ShapeMismatch("pure_density: vector length " + std::to_string(psi.size()) +
                            ", expected " + std::to_string(d));
    }
    ComplexMatrix mat(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) mat(r, c) = psi[r] * std::conj(psi[c]);
    return DensityMatrix{dims, mat};
}

}  // namespace lueq
