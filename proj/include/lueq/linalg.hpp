#pragma once

#include <vector>

#include "lueq/errors.hpp"
#include "lueq/matrix.hpp"

namespace lueq {

// Eigendecomposition of a Hermitian matrix. Eigenvalues sorted descending;
// column j of eigenvectors pairs with eigenvalues[j]. Columns carry the
// library phase convention (largest-modulus entry real-positive, ties broken
// by lowest index), so identical inputs give bit-identical outputs.
struct HermitianEig {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;
};

// Economy SVD: a = u * diag(singular_values) * v^dag with min(rows, cols)
// columns in u and v, both orthonormal, singular values sorted descending.
struct Svd {
    ComplexMatrix u;
    std::vector<double> singular_values;
    ComplexMatrix v;
};

// Cyclic complex Jacobi eigensolver for Hermitian matrices.
// tol bounds the accepted relative deviation ||a - a^dag||_F / ||a||_F.
// Throws NotHermitian, NoConvergence.
HermitianEig eigh(const ComplexMatrix& a, double tol = 1e-10);

// One-sided (Hestenes) Jacobi SVD. Throws NoConvergence.
Svd svd(const ComplexMatrix& a, double tol = 1e-13);

// Extends orthonormal columns to a dim x dim unitary. The input columns are
// copied bit-for-bit into the leading columns; the remaining ones come from
// deterministic Gram-Schmidt against the standard basis in index order,
// skipping candidates whose residual norm falls below tol.
// Throws NotOrthonormal, RankDeficient, ShapeMismatch.
ComplexMatrix complete_basis(const ComplexMatrix& cols, std::size_t dim, double tol = 1e-8);

// ||a - b||_F. Throws ShapeMismatch.
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// Number of Jacobi sweeps allowed before giving up on pathological input.
inline constexpr int kJacobiSweepBudget = 100;

}  // namespace lueq
