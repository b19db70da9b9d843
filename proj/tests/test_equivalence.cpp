#include <doctest.h>

#include "lueq/equivalence.hpp"
#include "test_support.hpp"

using namespace lueq;
using namespace lueq::testing;

namespace {

constexpr Complex kJ{0.0, 1.0};

// Rank-2 qubit-qutrit state with a product anchor (lambda_1 = 0.7) and a
// second eigenvector of the requested Schmidt rank; orthogonality comes from
// placing the second right factor(s) orthogonal to b_1.
DensityMatrix qubit_qutrit_rank2(std::size_t k2, std::uint64_t seed, double mu1_sq = 0.7) {
    Rng rng(seed);
    const ComplexMatrix a_frame = random_frame(2, 2, rng);
    const ComplexMatrix b_frame = haar_unitary(3, rng);
    const std::vector<Complex> e1 =
        product_vector(a_frame.column_vector(0), b_frame.column_vector(0));
    std::vector<Complex> e2;
    if (k2 == 1) {
        e2 = product_vector(a_frame.column_vector(1), b_frame.column_vector(1));
    } else {
        ComplexMatrix left(2, 2), right(3, 2);
        for (std::size_t r = 0; r < 2; ++r) {
            left(r, 0) = a_frame(r, 0);
            left(r, 1) = a_frame(r, 1);
        }
        for (std::size_t r = 0; r < 3; ++r) {
            right(r, 0) = b_frame(r, 1);
            right(r, 1) = b_frame(r, 2);
        }
        const double mu1 = std::sqrt(mu1_sq);
        const double mu2 = std::sqrt(1.0 - mu1_sq);
        e2 = assemble_schmidt_vector({mu1, mu2}, left, right);
    }
    ComplexMatrix frame(6, 2);
    for (std::size_t r = 0; r < 6; ++r) {
        frame(r, 0) = e1[r];
        frame(r, 1) = e2[r];
    }
    return state_from_frame({0.7, 0.3}, frame, BipartiteDims{2, 3});
}

// Two-qubit state with anchor |00> and a random frame in its orthogonal
// complement, conjugated by diag(1, e^{ia}, e^{ib}, e^{ic}). The diagonal is a
// local unitary exactly when c = a + b; otherwise the twist changes only the
// coordinate phases, leaving spectra, Schmidt data and entry moduli intact.
std::pair<DensityMatrix, DensityMatrix> twisted_pair(double a, double b, double c,
                                                     std::uint64_t seed) {
    Rng rng(seed);
    const ComplexMatrix q = haar_unitary(3, rng);
    ComplexMatrix frame(4, 4);
    frame(0, 0) = 1.0;
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t r = 0; r < 3; ++r) frame(1 + r, 1 + j) = q(r, j);
    const DensityMatrix rho =
        state_from_frame({0.4, 0.3, 0.2, 0.1}, frame, BipartiteDims{2, 2});
    ComplexMatrix d = ComplexMatrix::identity(4);
    d(1, 1) = std::exp(kJ * a);
    d(2, 2) = std::exp(kJ * b);
    d(3, 3) = std::exp(kJ * c);
    const DensityMatrix twisted{rho.dims, d * rho.mat * d.adjoint()};
    return {rho, twisted};
}

}  // namespace

TEST_CASE("spectral_gate: pass on self, mismatch on shifted Werner") {
    const ToleranceConfig tol;
    const Representation w3 = build_representation(werner(WernerParams{0.0, 0.3}));
    const Representation w4 = build_representation(werner(WernerParams{0.0, 0.4}));
    CHECK(spectral_gate(w3, w3, tol).outcome == GateOutcome::Pass);
    const GateResult gate = spectral_gate(w3, w4, tol);
    CHECK(gate.outcome == GateOutcome::Mismatch);

    for (int trial = 0; trial < 30; ++trial) {
        const BipartiteDims dims{2 + std::size_t(trial) % 2, 2 + std::size_t(trial) % 3};
        const DensityMatrix rho = random_density(dims, dims.total(), 600 + trial);
        const DensityMatrix moved =
            apply_local_unitary(rho, random_local_unitary(dims, 650 + trial));
        CHECK(spectral_gate(build_representation(rho), build_representation(moved), tol)
                  .outcome == GateOutcome::Pass);
    }
}

TEST_CASE("schmidt_gate: detects rank mismatch at equal spectra") {
    const ToleranceConfig tol;
    const DensityMatrix case1 = qubit_qutrit_rank2(1, 71);
    const DensityMatrix case2 = qubit_qutrit_rank2(2, 72);
    const Representation r1 = build_representation(case1);
    const Representation r2 = build_representation(case2);
    REQUIRE(spectral_gate(r1, r2, tol).outcome == GateOutcome::Pass);
    const GateResult gate = schmidt_gate(r1, r2, tol);
    CHECK(gate.outcome == GateOutcome::Mismatch);

    CHECK(schmidt_gate(r1, r1, tol).outcome == GateOutcome::Pass);

    for (int trial = 0; trial < 30; ++trial) {
        const BipartiteDims dims{2, 2 + std::size_t(trial) % 2};
        const DensityMatrix rho = random_density(dims, dims.total(), 700 + trial);
        const DensityMatrix moved =
            apply_local_unitary(rho, random_local_unitary(dims, 750 + trial));
        CHECK(schmidt_gate(build_representation(rho), build_representation(moved), tol)
                  .outcome == GateOutcome::Pass);
    }
}

TEST_CASE("schmidt_gate: degenerate clusters fall back instead of rejecting") {
    const ToleranceConfig tol;
    // e=0 Werner against a same-spectrum state whose unique eigenvector is
    // also maximally entangled but whose triple cluster is rotated: the
    // cluster's Schmidt multiset differs, which proves nothing.
    const DensityMatrix w = werner(WernerParams{0.0, 0.3});
    Rng rng(81);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::vector<Complex> singlet_like = assemble_schmidt_vector(
        {inv_sqrt2, inv_sqrt2}, haar_unitary(2, rng), haar_unitary(2, rng));
    ComplexMatrix anchor_col(4, 1);
    for (std::size_t r = 0; r < 4; ++r) anchor_col(r, 0) = singlet_like[r];
    const ComplexMatrix completed = complete_basis(anchor_col, 4);
    ComplexMatrix frame(4, 4);
    for (std::size_t r = 0; r < 4; ++r) {
        frame(r, 3) = completed(r, 0);  // the f-eigenvector
        for (std::size_t j = 0; j < 3; ++j) frame(r, j) = completed(r, j + 1);
    }
    const DensityMatrix other = state_from_frame(
        {(1.0 - 0.3) / 3.0, (1.0 - 0.3) / 3.0, (1.0 - 0.3) / 3.0, 0.3}, frame,
        BipartiteDims{2, 2});
    const Representation rw = build_representation(w);
    const Representation ro = build_representation(other);
    REQUIRE(spectral_gate(rw, ro, tol).outcome == GateOutcome::Pass);
    const GateResult gate = schmidt_gate(rw, ro, tol);
    CHECK(gate.outcome != GateOutcome::Mismatch);
}

TEST_CASE("solve_phase_alignment: identity alignment of a representation with itself") {
    const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 4, 90);
    const Representation rep = build_representation(rho);
    const PhaseAlignResult result = solve_phase_alignment(rep, rep, ToleranceConfig{});
    const auto* sol = std::get_if<PhaseSolution>(&result);
    REQUIRE(sol != nullptr);
    CHECK(sol->residual < 1e-12);
    for (double phi : sol->basis_a_phases) CHECK(std::abs(phi) < 1e-12);
    for (double phi : sol->basis_b_phases) CHECK(std::abs(phi) < 1e-12);
    for (double psi : sol->item_phases) CHECK(std::abs(psi) < 1e-12);

    const LocalUnitary lu = construct_certificate(rep, rep, *sol);
    CHECK(frobenius_distance(lu.u, ComplexMatrix::identity(2)) < 1e-12);
    CHECK(frobenius_distance(lu.v, ComplexMatrix::identity(2)) < 1e-12);
}

TEST_CASE("solve_phase_alignment: gauge round trips on the phase torus") {
    const ToleranceConfig tol;
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const BipartiteDims dims{2 + std::size_t(trial) % 2, 2 + std::size_t(trial) % 3};
        const std::size_t rank = 1 + std::size_t(trial) % dims.total();
        const DensityMatrix rho = random_density(dims, rank, 8000 + trial);
        const Representation rep = build_representation(rho, tol);
        if (rep.degenerate_anchor) continue;
        Rng rng(8100 + trial);
        const GaugeElement g = random_gauge_element(rep, rng);
        const Representation shifted = apply_gauge(rep, g);
        const PhaseAlignResult result = solve_phase_alignment(rep, shifted, tol);
        const auto* sol = std::get_if<PhaseSolution>(&result);
        if (sol == nullptr) continue;  // near-degenerate Schmidt data
        ++solved;
        CHECK(sol->residual < 1e-9);
        const LocalUnitary lu = construct_certificate(rep, shifted, *sol);
        CHECK(verify_certificate(rho, rho, lu) < 1e-8);
    }
    CHECK(solved > 30);
}

TEST_CASE("solve_phase_alignment: completion U(2) blocks handled exactly") {
    const ToleranceConfig tol;
    for (int trial = 0; trial < 40; ++trial) {
        // Product anchor in (2,3): the unused b-columns form a U(2) block.
        const DensityMatrix rho = qubit_qutrit_rank2(2, 9000 + trial);
        const Representation rep = build_representation(rho, tol);
        REQUIRE(rep.anchor_rank() == 1);
        Rng rng(9100 + trial);
        const GaugeElement g = random_gauge_element(rep, rng);
        REQUIRE(g.completion_b.rows() == 2);
        const Representation shifted = apply_gauge(rep, g);
        const PhaseAlignResult result = solve_phase_alignment(rep, shifted, tol);
        const auto* sol = std::get_if<PhaseSolution>(&result);
        REQUIRE(sol != nullptr);
        CHECK(sol->residual < 1e-9);
        const LocalUnitary lu = construct_certificate(rep, shifted, *sol);
        CHECK(verify_certificate(rho, rho, lu) < 1e-8);
    }
}

TEST_CASE("solve_phase_alignment: Schmidt-degenerate items route to the fallback") {
    const Representation rep = build_representation(werner(WernerParams{0.1, 0.2}));
    const PhaseAlignResult result = solve_phase_alignment(rep, rep, ToleranceConfig{});
    CHECK(std::holds_alternative<NeedsFallback>(result));
}

TEST_CASE("structural zeros: a disconnected phase graph stays sound") {
    // The anchor |00> zeroes row 0 of rho outside the diagonal, so diagonal
    // twists diag(1, e^{ia}, e^{ib}, e^{ic}) stay on the local orbit even for
    // c != a + b: the disconnected component absorbs the extra phase. The
    // solver must find the certificate, not a spurious obstruction.
    const EquivalenceConfig config;
    for (double c : {1.3, 2.0}) {
        const auto [rho, twisted] = twisted_pair(0.4, 0.9, c, 42);
        const Verdict verdict = decide_equivalence(rho, twisted, config);
        const auto* eq = std::get_if<Equivalent>(&verdict);
        REQUIRE(eq != nullptr);
        CHECK(eq->residual < 1e-8);
        CHECK(verify_certificate(rho, twisted, eq->certificate) < 1e-8);
    }
}

TEST_CASE("transpose pairs: equal spectra, Schmidt data and moduli, obstructed phases") {
    // rho^T = conj(rho) shares every modulus-level invariant with rho but has
    // all coordinate phases negated; for a generic full-rank two-qubit state
    // the two are not locally equivalent.
    const EquivalenceConfig config;
    int obstructed = 0;
    for (int seed = 0; seed < 4; ++seed) {
        const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 4, 3000 + seed);
        const DensityMatrix transposed{rho.dims, rho.mat.transpose()};
        const Verdict verdict = decide_equivalence(rho, transposed, config);
        const auto* in = std::get_if<Inequivalent>(&verdict);
        REQUIRE(in != nullptr);
        if (in->witness == WitnessKind::PhaseObstruction) ++obstructed;
    }
    CHECK(obstructed == 4);

    // Independent confirmation on one pair: multi-restart optimization also
    // fails to align them, with a clear residual floor.
    const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 4, 3000);
    const DensityMatrix transposed{rho.dims, rho.mat.transpose()};
    EquivalenceConfig weak = config;
    weak.restarts = 16;
    weak.max_iterations = 800;
    const Verdict opt = optimize_alignment(rho, transposed, weak);
    const auto* undecided = std::get_if<Undecided>(&opt);
    REQUIRE(undecided != nullptr);
    CHECK(undecided->best_residual > 1e-3);
}

TEST_CASE("solve_phase_alignment: engineered inconsistent cycle is an obstruction") {
    // Rotating one item's X by a left diagonal while leaving the others alone
    // pins phi_A inconsistently across items.
    const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 4, 90);
    const Representation rep = build_representation(rho);
    Representation bent = rep;
    ComplexMatrix twist = ComplexMatrix::identity(2);
    twist(0, 0) = std::exp(kJ * 0.7);
    bent.items[1].x = twist * bent.items[1].x;
    const PhaseAlignResult result = solve_phase_alignment(rep, bent, ToleranceConfig{});
    const auto* in = std::get_if<Inequivalent>(&result);
    REQUIRE(in != nullptr);
    CHECK(in->witness == WitnessKind::PhaseObstruction);
}

TEST_CASE("verify_certificate: measurement only") {
    const DensityMatrix rho = random_density(BipartiteDims{2, 3}, 4, 77);
    const LocalUnitary id{ComplexMatrix::identity(2), ComplexMatrix::identity(3)};
    CHECK(verify_certificate(rho, rho, id) == 0.0);

    const LocalUnitary lu = random_local_unitary(BipartiteDims{2, 3}, 78);
    const DensityMatrix moved = apply_local_unitary(rho, lu);
    CHECK(verify_certificate(rho, moved, lu) < 1e-12);

    const LocalUnitary wrong = random_local_unitary(BipartiteDims{2, 3}, 79);
    CHECK(verify_certificate(rho, moved, wrong) > 1e-3);
}

TEST_CASE("optimize_alignment: identical states converge immediately") {
    const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 3, 101);
    const Verdict verdict = optimize_alignment(rho, rho, EquivalenceConfig{});
    const auto* eq = std::get_if<Equivalent>(&verdict);
    REQUIRE(eq != nullptr);
    CHECK(eq->residual < 1e-10);
}

TEST_CASE("optimize_alignment: degenerate Werner orbit pairs") {
    EquivalenceConfig config;
    for (int trial = 0; trial < 3; ++trial) {
        config.seed = trial;
        const DensityMatrix w = werner(WernerParams{0.0, 0.3});
        const LocalUnitary lu = random_local_unitary(BipartiteDims{2, 2}, 200 + trial);
        const DensityMatrix moved = apply_local_unitary(w, lu);
        const Verdict verdict = optimize_alignment(w, moved, config);
        const auto* eq = std::get_if<Equivalent>(&verdict);
        REQUIRE(eq != nullptr);
        CHECK(eq->residual < 1e-8);
    }
}

TEST_CASE("optimize_alignment: same-spectrum off-orbit state stays undecided") {
    const DensityMatrix w = werner(WernerParams{0.0, 0.3});
    Rng rng(301);
    const ComplexMatrix frame = haar_unitary(4, rng);
    const double third = (1.0 - 0.3) / 3.0;
    const DensityMatrix other =
        state_from_frame({third, third, third, 0.3}, frame, BipartiteDims{2, 2});
    EquivalenceConfig config;
    config.restarts = 12;
    config.max_iterations = 600;
    const Verdict verdict = optimize_alignment(w, other, config);
    const auto* undecided = std::get_if<Undecided>(&verdict);
    REQUIRE(undecided != nullptr);
    CHECK(undecided->best_residual > 1e-3);
}

TEST_CASE("decide_equivalence: orbit round trips across dims and ranks") {
    const EquivalenceConfig config;
    for (int trial = 0; trial < 24; ++trial) {
        const BipartiteDims dims{2 + std::size_t(trial) % 2, 2 + std::size_t(trial) % 3};
        const std::size_t rank = 1 + std::size_t(trial) % dims.total();
        const DensityMatrix rho = random_density(dims, rank, 10000 + trial);
        const DensityMatrix moved =
            apply_local_unitary(rho, random_local_unitary(dims, 10100 + trial));
        const Verdict verdict = decide_equivalence(rho, moved, config);
        const auto* eq = std::get_if<Equivalent>(&verdict);
        REQUIRE(eq != nullptr);
        CHECK(eq->residual < 1e-8);
        CHECK(verify_certificate(rho, moved, eq->certificate) < 1e-8);
    }
}

TEST_CASE("decide_equivalence: Werner parameter changes are detected") {
    const EquivalenceConfig config;
    const Verdict verdict = decide_equivalence(werner(WernerParams{0.1, 0.2}),
                                               werner(WernerParams{0.2, 0.2}), config);
    const auto* in = std::get_if<Inequivalent>(&verdict);
    REQUIRE(in != nullptr);
    CHECK(in->witness == WitnessKind::SpectrumMismatch);
}

TEST_CASE("decide_equivalence: symmetry of the classification") {
    const EquivalenceConfig config;
    const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 4, 400);
    const DensityMatrix moved =
        apply_local_unitary(rho, random_local_unitary(BipartiteDims{2, 2}, 401));
    CHECK(std::holds_alternative<Equivalent>(decide_equivalence(rho, moved, config)));
    CHECK(std::holds_alternative<Equivalent>(decide_equivalence(moved, rho, config)));

    const DensityMatrix w3 = werner(WernerParams{0.0, 0.3});
    const DensityMatrix w4 = werner(WernerParams{0.0, 0.4});
    CHECK(std::holds_alternative<Inequivalent>(decide_equivalence(w3, w4, config)));
    CHECK(std::holds_alternative<Inequivalent>(decide_equivalence(w4, w3, config)));
}

TEST_CASE("decide_equivalence: degenerate strata never reject an orbit pair") {
    const EquivalenceConfig config;
    for (int trial = 0; trial < 3; ++trial) {
        const DensityMatrix w = werner(WernerParams{0.0, 0.25});
        const DensityMatrix moved =
            apply_local_unitary(w, random_local_unitary(BipartiteDims{2, 2}, 500 + trial));
        const Verdict verdict = decide_equivalence(w, moved, config);
        CHECK(!std::holds_alternative<Inequivalent>(verdict));
    }
}

TEST_CASE("decide_equivalence: rejects mismatched dims") {
    const DensityMatrix a = random_density(BipartiteDims{2, 2}, 2, 1);
    const DensityMatrix b = random_density(BipartiteDims{2, 3}, 2, 1);
    CHECK_THROWS_AS(decide_equivalence(a, b, EquivalenceConfig{}), DimsMismatch);
}

TEST_CASE("orbit_dimension: maximally mixed, generic, and along orbits") {
    ComplexMatrix mixed = ComplexMatrix::identity(4);
    mixed *= Complex(0.25);
    CHECK(orbit_dimension(DensityMatrix{BipartiteDims{2, 2}, mixed}) == 0);

    for (int seed = 0; seed < 10; ++seed) {
        const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 4, 600 + seed);
        CHECK(orbit_dimension(rho) == 6);
        const DensityMatrix moved =
            apply_local_unitary(rho, random_local_unitary(BipartiteDims{2, 2}, 700 + seed));
        CHECK(orbit_dimension(moved) == 6);
    }

    // The two trivial-phase directions act trivially by inspection.
    const DensityMatrix rho = random_density(BipartiteDims{2, 2}, 4, 800);
    const ComplexMatrix h = kron(kJ * ComplexMatrix::identity(2), ComplexMatrix::identity(2)) +
                            kron(ComplexMatrix::identity(2), kJ * ComplexMatrix::identity(2));
    CHECK(frobenius_distance(h * rho.mat, rho.mat * h) < 1e-14);
}

TEST_CASE("orbit_dimension: frozen values for other families") {
    // Generic full-rank states: the kernel is exactly the two scalar-phase
    // directions, so the orbit dimension is m^2 + n^2 - 2.
    CHECK(orbit_dimension(random_density(BipartiteDims{2, 3}, 6, 901)) == 11);
    CHECK(orbit_dimension(random_density(BipartiteDims{3, 3}, 9, 902)) == 16);
    // The U (x) U invariant Werner family has a large stabilizer.
    CHECK(orbit_dimension(werner(WernerParams{0.0, 0.1})) == 3);
    // At f = 1/4 the e=0 Werner state is exactly maximally mixed.
    CHECK(orbit_dimension(werner(WernerParams{0.0, 0.25})) == 0);
    // Pure states: product orbit is 4-dim, maximally entangled orbit 3-dim.
    CHECK(orbit_dimension(pure_density({1.0, 0.0, 0.0, 0.0}, BipartiteDims{2, 2})) == 4);
    const double s2 = 1.0 / std::sqrt(2.0);
    CHECK(orbit_dimension(pure_density({s2, 0.0, 0.0, s2}, BipartiteDims{2, 2})) == 3);
}
