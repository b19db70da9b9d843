#pragma once

#include <vector>

#include "lueq/schmidt.hpp"
#include "lueq/states.hpp"
#include "lueq/tolerances.hpp"

namespace lueq {

// One spectral item: eigenvalue, Schmidt data of its eigenvector, and the
// coordinate matrices of the Schmidt vectors in the completed bases:
//   (a^i_1 ... a^i_k) = (a_1 ... a_m) X_i,   (b^i_1 ... b^i_k) = (b_1 ... b_n) Y_i.
struct RepresentationItem {
    double eigenvalue = 0.0;
    SchmidtDecomposition schmidt;
    ComplexMatrix x;  // m x k_i, orthonormal columns
    ComplexMatrix y;  // n x k_i, orthonormal columns
};

// The representation r(rho): spectral decomposition, per-eigenvector Schmidt
// data, and bases of both factors anchored on the first eigenvector. Under
// the anchor convention X_1 and Y_1 are exactly the padded identity.
struct Representation {
    BipartiteDims dims;
    std::size_t rank = 0;  // number of nonzero eigenvalues
    std::vector<RepresentationItem> items;
    ComplexMatrix basis_a;  // m x m unitary
    ComplexMatrix basis_b;  // n x n unitary
    std::vector<DegeneracyBlock> eigenvalue_blocks;
    // Raised when the anchor eigenvector is not gauge-unique (top eigenvalue
    // degenerate, or anchor Schmidt coefficients degenerate): the canonical
    // form is then convention-dependent and equivalence checking must not
    // trust it alone.
    bool degenerate_anchor = false;

    std::size_t anchor_rank() const { return items.empty() ? 0 : items.front().schmidt.rank; }
};

// Residual gauge freedoms left after canonicalization. Phases count U(1)
// factors; block lists hold U(d) factors with d >= 2. Paired actions (one
// parameter showing up on both factors) are counted on both sides and then
// removed once via constraint_count, so
//   free_parameter_count = phases + sum d^2 over all blocks + per-item phases
//                          - constraint_count.
struct GaugeDescriptor {
    std::size_t left_a_phases = 0;
    std::size_t left_b_phases = 0;
    std::vector<std::size_t> left_a_blocks;
    std::vector<std::size_t> left_b_blocks;
    std::size_t per_item_phase = 0;
    // Per non-anchor item: Schmidt block sizes (singletons included; each
    // singleton is the paired +/- phase acting on X and Y together).
    std::vector<std::vector<std::size_t>> schmidt_blocks;
    std::vector<std::size_t> eigen_blocks;  // sizes >= 2 of degenerate eigenvalue clusters
    std::size_t constraint_count = 0;
    std::size_t free_parameter_count = 0;
};

// An element of the residual gauge group in explicit coordinates.
// schmidt_rotations[i] must be block-diagonal with respect to item i's
// degeneracy blocks, otherwise the transformed tuple no longer represents
// the same state.
struct GaugeElement {
    std::vector<double> item_phases;               // psi_i per item
    std::vector<ComplexMatrix> schmidt_rotations;  // W_i, k_i x k_i unitary per item
    ComplexMatrix completion_a;                    // (m - k_1)^2 unitary; empty if k_1 = m
    ComplexMatrix completion_b;                    // (n - k_1)^2 unitary; empty if k_1 = n

    bool has_completion_a() const { return completion_a.rows() > 0; }
    bool has_completion_b() const { return completion_b.rows() > 0; }
};

// Builds r(rho): eigendecomposition, per-eigenvector Schmidt decomposition,
// basis completion anchored on the first eigenvector, coordinate extraction.
Representation build_representation(const DensityMatrix& rho,
                                    const ToleranceConfig& tol = ToleranceConfig{});

// Enumerates the residual gauge group of a representation.
GaugeDescriptor gauge_descriptor(const Representation& rep,
                                 const ToleranceConfig& tol = ToleranceConfig{});

// Acts with a gauge element; the result is another representation of the
// same state, in canonical anchor form.
Representation apply_gauge(const Representation& rep, const GaugeElement& g);

// Samples a gauge element (uniform phases, Haar blocks) consistent with the
// representation's degeneracy structure.
GaugeElement random_gauge_element(const Representation& rep, Rng& rng);

// The eigenvector of item i reconstructed from bases, coordinates and
// Schmidt coefficients.
std::vector<Complex> item_vector(const Representation& rep, std::size_t i);

// sum_i lambda_i |e_i><e_i| reconstructed from the representation.
DensityMatrix representation_to_state(const Representation& rep);

}  // namespace lueq
