#pragma once

#include <vector>

#include "lueq/states.hpp"

namespace lueq {

// Contiguous run [first, first+size) of Schmidt coefficients equal within the
// clustering tolerance. The residual gauge acts as U(size) on each block.
struct DegeneracyBlock {
    std::size_t first = 0;
    std::size_t size = 1;
};

// Schmidt decomposition of a unit vector psi in H1 (x) H2:
//   psi = sum_j mu_j a_j (x) b_j,  mu_1 >= ... >= mu_k > 0.
struct SchmidtDecomposition {
    std::size_t rank = 0;
    std::vector<double> coefficients;
    ComplexMatrix left_vectors;   // m x rank, orthonormal columns
    ComplexMatrix right_vectors;  // n x rank, orthonormal columns
    std::vector<DegeneracyBlock> degeneracy_blocks;

    bool has_degenerate_block() const {
        for (const auto& b : degeneracy_blocks)
            if (b.size > 1) return true;
        return false;
    }
};

// Reshapes psi into the m x n coefficient matrix (row-major over the first
// factor) and runs the Jacobi SVD; singular values at or below tol_rank are
// treated as zero. Within a degenerate block the column order is stabilized
// lexicographically by the left vectors so identical inputs give identical
// output. Throws NotNormalized, ShapeMismatch.
SchmidtDecomposition schmidt_decompose(const std::vector<Complex>& psi, BipartiteDims dims,
                                       double tol_rank = 1e-9);

std::size_t schmidt_rank(const std::vector<Complex>& psi, BipartiteDims dims,
                         double tol_rank = 1e-9);

// Clusters a descending list into runs of values equal within tol.
std::vector<DegeneracyBlock> cluster_descending(const std::vector<double>& values, double tol);

}  // namespace lueq
