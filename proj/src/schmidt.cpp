#include "lueq/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lueq {

namespace {

// Lexicographic order on columns by (real, imag) per entry, top to bottom.
bool column_less(const ComplexMatrix& m, std::size_t a, std::size_t b) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const Complex& x = m(r, a);
        const Complex& y = m(r, b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
}

}  // namespace

std::vector<DegeneracyBlock> cluster_descending(const std::vector<double>& values, double tol) {
    std::vector<DegeneracyBlock> blocks;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i + 1;
        // Chain adjacent gaps so a run like (x, x+tol/2, x+tol) stays together.
        while (j < values.size() && values[j - 1] - values[j] < tol) ++j;
        blocks.push_back(DegeneracyBlock{i, j - i});
        i = j;
    }
    return blocks;
}

SchmidtDecomposition schmidt_decompose(const std::vector<Complex>& psi, BipartiteDims dims,
                                       double tol_rank) {
    const std::size_t m = dims.m;
    const std::size_t n = dims.n;
    if (psi.size() != m * n) {
        throw ShapeMismatch("schmidt_decompose: vector length " + std::to_string(psi.size()) +
                            ", expected " + std::to_string(m * n));
    }
    double nrm = 0.0;
    for (const Complex& z : psi) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (std::abs(nrm - 1.0) > 1e-10) {
        throw NotNormalized("schmidt_decompose: ||psi|| = " + std::to_string(nrm));
    }

    ComplexMatrix coeff(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) coeff(i, j) = psi[i * n + j];

    // psi = sum_j sigma_j u_j (x) conj(v_j): the right Schmidt vectors are the
    // conjugated right singular vectors.
    const Svd dec = svd(coeff);

    std::size_t rank = 0;
    while (rank < dec.singular_values.size() && dec.singular_values[rank] > tol_rank) ++rank;

    SchmidtDecomposition out;
    out.rank = rank;
    out.coefficients.assign(dec.singular_values.begin(), dec.singular_values.begin() + rank);
    out.left_vectors = ComplexMatrix(m, rank);
    out.right_vectors = ComplexMatrix(n, rank);
    for (std::size_t j = 0; j < rank; ++j) {
        for (std::size_t r = 0; r < m; ++r) out.left_vectors(r, j) = dec.u(r, j);
        for (std::size_t r = 0; r < n; ++r) out.right_vectors(r, j) = std::conj(dec.v(r, j));
    }

    out.degeneracy_blocks = cluster_descending(out.coefficients, tol_rank);
    for (const DegeneracyBlock& block : out.degeneracy_blocks) {
        if (block.size < 2) continue;
        std::vector<std::size_t> perm(block.size);
        std::iota(perm.begin(), perm.end(), block.first);
        std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            return column_less(out.left_vectors, a, b);
        });
        ComplexMatrix left = out.left_vectors;
        ComplexMatrix right = out.right_vectors;
        for (std::size_t t = 0; t < block.size; ++t) {
            const std::size_t dst = block.first + t;
            for (std::size_t r = 0; r < m; ++r) out.left_vectors(r, dst) = left(r, perm[t]);
            for (std::size_t r = 0; r < n; ++r) out.right_vectors(r, dst) = right(r, perm[t]);
        }
    }
    return out;
}

std::size_t schmidt_rank(const std::vector<Complex>& psi, BipartiteDims dims, double tol_rank) {
    return schmidt_decompose(psi, dims, tol_rank).rank;
}

}  // namespace lueq
