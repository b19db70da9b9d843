#include "lueq/representation.hpp"

#include <cmath>
#include <string>

namespace lueq {

namespace {

constexpr Complex kI{0.0, 1.0};

// X_1 = Y_1 = (I_k ; 0), the anchor convention, written out exactly.
ComplexMatrix padded_identity(std::size_t rows, std::size_t k) {
    ComplexMatrix out(rows, k);
    for (std::size_t j = 0; j < k; ++j) out(j, j) = 1.0;
    return out;
}

// blockdiag(top, bottom) for square blocks.
ComplexMatrix block_diag(const ComplexMatrix& top, const ComplexMatrix& bottom) {
    const std::size_t d1 = top.rows();
    const std::size_t d2 = bottom.rows();
    ComplexMatrix out(d1 + d2, d1 + d2);
    for (std::size_t r = 0; r < d1; ++r)
        for (std::size_t c = 0; c < d1; ++c) out(r, c) = top(r, c);
    for (std::size_t r = 0; r < d2; ++r)
        for (std::size_t c = 0; c < d2; ++c) out(d1 + r, d1 + c) = bottom(r, c);
    return out;
}

ComplexMatrix basis_rotation(const ComplexMatrix& anchor_block, const ComplexMatrix& completion,
                             std::size_t dim) {
    if (completion.rows() == 0) return anchor_block;
    ComplexMatrix rot = block_diag(anchor_block, completion);
    if (rot.rows() != dim) {
        throw ShapeMismatch("apply_gauge: completion block size does not match basis");
    }
    return rot;
}

}  // namespace

Representation build_representation(const DensityMatrix& rho, const ToleranceConfig& tol) {
    const HermitianEig eig = eigh(rho.mat);

    Representation rep;
    rep.dims = rho.dims;
    std::size_t rank = 0;
    while (rank < eig.eigenvalues.size() && eig.eigenvalues[rank] > tol.tol_rank) ++rank;
    rep.rank = rank;
    if (rank == 0) {
        throw NotPositiveSemidefinite("build_representation: no eigenvalue above tol_rank");
    }

    rep.items.resize(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        rep.items[i].eigenvalue = eig.eigenvalues[i];
        rep.items[i].schmidt =
            schmidt_decompose(eig.eigenvectors.column_vector(i), rho.dims, tol.tol_rank);
    }

    std::vector<double> lambdas(rank);
    for (std::size_t i = 0; i < rank; ++i) lambdas[i] = rep.items[i].eigenvalue;
    rep.eigenvalue_blocks = cluster_descending(lambdas, tol.tol_cluster);

    const SchmidtDecomposition& anchor = rep.items.front().schmidt;
    rep.degenerate_anchor =
        rep.eigenvalue_blocks.front().size > 1 || anchor.has_degenerate_block();

    rep.basis_a = complete_basis(anchor.left_vectors, rho.dims.m);
    rep.basis_b = complete_basis(anchor.right_vectors, rho.dims.n);

    const ComplexMatrix basis_a_adj = rep.basis_a.adjoint();
    const ComplexMatrix basis_b_adj = rep.basis_b.adjoint();
    for (std::size_t i = 0; i < rank; ++i) {
        if (i == 0) {
            // The leading basis columns are bit-for-bit copies of the anchor
            // Schmidt vectors, so the coordinates are the identity exactly.
            rep.items[i].x = padded_identity(rho.dims.m, anchor.rank);
            rep.items[i].y = padded_identity(rho.dims.n, anchor.rank);
        } else {
            rep.items[i].x = basis_a_adj * rep.items[i].schmidt.left_vectors;
            rep.items[i].y = basis_b_adj * rep.items[i].schmidt.right_vectors;
        }
    }
    return rep;
}

GaugeDescriptor gauge_descriptor(const Representation& rep, const ToleranceConfig&) {
    GaugeDescriptor out;
    const std::size_t l = rep.rank;
    out.per_item_phase = l;

    std::size_t raw = l;

    // Anchor freedoms act on both completed bases, paired: W on the a-side
    // columns, conj(W) on the b-side columns.
    const SchmidtDecomposition& anchor = rep.items.front().schmidt;
    for (const DegeneracyBlock& block : anchor.degeneracy_blocks) {
        if (block.size == 1) {
            out.left_a_phases += 1;
            out.left_b_phases += 1;
            out.constraint_count += 1;
            raw += 2;
        } else {
            out.left_a_blocks.push_back(block.size);
            out.left_b_blocks.push_back(block.size);
            out.constraint_count += block.size * block.size;
            raw += 2 * block.size * block.size;
        }
    }

    // Unused basis columns carry an unconstrained unitary each.
    const std::size_t comp_a = rep.dims.m - anchor.rank;
    const std::size_t comp_b = rep.dims.n - anchor.rank;
    if (comp_a == 1) {
        out.left_a_phases += 1;
        raw += 1;
    } else if (comp_a >= 2) {
        out.left_a_blocks.push_back(comp_a);
        raw += comp_a * comp_a;
    }
    if (comp_b == 1) {
        out.left_b_phases += 1;
        raw += 1;
    } else if (comp_b >= 2) {
        out.left_b_blocks.push_back(comp_b);
        raw += comp_b * comp_b;
    }

    // Non-anchor items: one U(d) per Schmidt block, acting as X W and
    // Y conj(W); counted once, no pairing constraint left over.
    out.schmidt_blocks.resize(l);
    for (std::size_t i = 1; i < l; ++i) {
        for (const DegeneracyBlock& block : rep.items[i].schmidt.degeneracy_blocks) {
            out.schmidt_blocks[i].push_back(block.size);
            raw += block.size * block.size;
        }
    }

    // Degenerate eigenvalue clusters mix whole eigenvectors; the diagonal
    // phases of that U(d) are the per-item phases already counted.
    for (const DegeneracyBlock& block : rep.eigenvalue_blocks) {
        if (block.size < 2) continue;
        out.eigen_blocks.push_back(block.size);
        out.constraint_count += block.size;
        raw += block.size * block.size;
    }

    out.free_parameter_count = raw - out.constraint_count;
    return out;
}

Representation apply_gauge(const Representation& rep, const GaugeElement& g) {
    const std::size_t l = rep.rank;
    if (g.item_phases.size() != l || g.schmidt_rotations.size() != l) {
        throw ShapeMismatch("apply_gauge: element arity does not match representation rank");
    }
    const std::size_t k1 = rep.anchor_rank();

    const Complex anchor_phase = std::exp(kI * g.item_phases[0]);
    const ComplexMatrix& w1 = g.schmidt_rotations[0];
    if (w1.rows() != k1 || w1.cols() != k1) {
        throw ShapeMismatch("apply_gauge: anchor rotation must be k_1 x k_1");
    }

    ComplexMatrix rot_a = basis_rotation(anchor_phase * w1, g.completion_a, rep.dims.m);
    ComplexMatrix rot_b = basis_rotation(w1.conjugate(), g.completion_b, rep.dims.n);

    Representation out = rep;
    out.basis_a = rep.basis_a * rot_a;
    out.basis_b = rep.basis_b * rot_b;

    const ComplexMatrix rot_a_adj = rot_a.adjoint();
    const ComplexMatrix rot_b_adj = rot_b.adjoint();
    for (std::size_t i = 0; i < l; ++i) {
        const ComplexMatrix& wi = g.schmidt_rotations[i];
        const std::size_t ki = rep.items[i].schmidt.rank;
        if (wi.rows() != ki || wi.cols() != ki) {
            throw ShapeMismatch("apply_gauge: rotation " + std::to_string(i) +
                                " must be k_i x k_i");
        }
        if (i == 0) {
            out.items[0].x = padded_identity(rep.dims.m, k1);
            out.items[0].y = padded_identity(rep.dims.n, k1);
        } else {
            const Complex phase = std::exp(kI * g.item_phases[i]);
            out.items[i].x = rot_a_adj * (phase * (rep.items[i].x * wi));
            out.items[i].y = rot_b_adj * (rep.items[i].y * wi.conjugate());
        }
        // The Schmidt vectors move with the coordinates so the item stays
        // internally consistent: (a_1..a_m) X_i must reproduce them.
        out.items[i].schmidt.left_vectors = out.basis_a * out.items[i].x;
        out.items[i].schmidt.right_vectors = out.basis_b * out.items[i].y;
    }
    return out;
}

GaugeElement random_gauge_element(const Representation& rep, Rng& rng) {
    GaugeElement g;
    const std::size_t l = rep.rank;
    g.item_phases.resize(l);
    g.schmidt_rotations.resize(l);
    constexpr double two_pi = 6.283185307179586;
    for (std::size_t i = 0; i < l; ++i) {
        g.item_phases[i] = two_pi * rng.uniform();
        const std::size_t ki = rep.items[i].schmidt.rank;
        ComplexMatrix w(ki, ki);
        for (const DegeneracyBlock& block : rep.items[i].schmidt.degeneracy_blocks) {
            if (block.size == 1) {
                w(block.first, block.first) = std::exp(kI * (two_pi * rng.uniform()));
            } else {
                const ComplexMatrix u = haar_unitary(block.size, rng);
                for (std::size_t r = 0; r < block.size; ++r)
                    for (std::size_t c = 0; c < block.size; ++c)
                        w(block.first + r, block.first + c) = u(r, c);
            }
        }
        g.schmidt_rotations[i] = std::move(w);
    }
    const std::size_t comp_a = rep.dims.m - rep.anchor_rank();
    const std::size_t comp_b = rep.dims.n - rep.anchor_rank();
    if (comp_a > 0) g.completion_a = haar_unitary(comp_a, rng);
    if (comp_b > 0) g.completion_b = haar_unitary(comp_b, rng);
    return g;
}

std::vector<Complex> item_vector(const Representation& rep, std::size_t i) {
    const RepresentationItem& item = rep.items.at(i);
    const ComplexMatrix left = rep.basis_a * item.x;
    const ComplexMatrix right = rep.basis_b * item.y;
    const std::size_t m = rep.dims.m;
    const std::size_t n = rep.dims.n;
    std::vector<Complex> psi(m * n, Complex(0.0));
    for (std::size_t s = 0; s < item.schmidt.rank; ++s) {
        const double mu = item.schmidt.coefficients[s];
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = 0; q < n; ++q) psi[p * n + q] += mu * left(p, s) * right(q, s);
    }
    return psi;
}

DensityMatrix representation_to_state(const Representation& rep) {
    const std::size_t d = rep.dims.total();
    ComplexMatrix mat(d, d);
    for (std::size_t i = 0; i < rep.rank; ++i) {
        const std::vector<Complex> psi = item_vector(rep, i);
        const double lambda = rep.items[i].eigenvalue;
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) mat(r, c) += lambda * psi[r] * std::conj(psi[c]);
    }
    return DensityMatrix{rep.dims, mat};
}

}  // namespace lueq
