#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lueq/representation.hpp"

namespace lueq {

// Witnesses are genuine LU invariants. SpectrumMismatch and SchmidtMismatch
// may be issued for any pair; ModulusMismatch and PhaseObstruction only on
// the fully non-degenerate stratum, where the residual gauge is completely
// enumerated and the comparison is exact.
enum class WitnessKind {
    SpectrumMismatch,
    SchmidtMismatch,
    ModulusMismatch,
    PhaseObstruction,
};

std::string witness_name(WitnessKind kind);

struct Equivalent {
    LocalUnitary certificate;
    double residual = 0.0;
};

struct Inequivalent {
    WitnessKind witness;
    std::string detail;
};

struct Undecided {
    std::string reason;
    double best_residual = 0.0;
};

using Verdict = std::variant<Equivalent, Inequivalent, Undecided>;

// Solved residual-gauge angles aligning two representations.
// basis entries under a completion block of size >= 2 are not phase
// variables; their alignment lives in the completion_* unitaries.
struct PhaseSolution {
    std::vector<double> basis_a_phases;              // per basis_a column
    std::vector<double> basis_b_phases;              // per basis_b column
    std::vector<double> item_phases;                 // per eigenvector
    std::vector<std::vector<double>> pair_phases;    // sigma, per item per Schmidt index
    ComplexMatrix completion_a;                      // empty unless m - k_1 >= 2
    ComplexMatrix completion_b;                      // empty unless n - k_1 >= 2
    double residual = 0.0;                           // max cycle inconsistency (radians)
};

struct NeedsFallback {
    std::string reason;
};

enum class GateOutcome { Pass, Mismatch, Fallback };

struct GateResult {
    GateOutcome outcome = GateOutcome::Pass;
    std::string detail;
};

using PhaseAlignResult = std::variant<PhaseSolution, Inequivalent, NeedsFallback>;

struct EquivalenceConfig {
    ToleranceConfig tol;
    int restarts = 32;
    int max_iterations = 2000;
    double gradient_tol = 1e-10;
    std::uint64_t seed = 0;
};

// Eigenvalue lists (including rank) must agree elementwise within tol_cluster.
GateResult spectral_gate(const Representation& rep, const Representation& rep2,
                         const ToleranceConfig& tol);

// Schmidt coefficient lists compared per item for non-degenerate eigenvalues;
// for degenerate clusters only the block multiset is compared, and a mismatch
// there demands the fallback because eigenvectors inside a cluster are
// basis-dependent.
GateResult schmidt_gate(const Representation& rep, const Representation& rep2,
                        const ToleranceConfig& tol);

// Aligns two representations over the residual gauge torus. Requires the
// fully non-degenerate stratum (distinct eigenvalues with safe gaps, distinct
// per-item Schmidt coefficients); otherwise returns NeedsFallback. Checks
// entry moduli first, then solves the angular system
//   arg X~_i[r][s] - arg X_i[r][s] = psi_i + phiA_r + sigma_i[s]
//   arg Y~_i[c][s] - arg Y_i[c][s] = phiB_c - sigma_i[s]   (mod 2pi)
// exactly over the integer constraint lattice; leftover dependency rows are
// the cycle checks. Basis columns beyond the anchor that form a block of
// size >= 2 are aligned afterwards by a unitary Procrustes fit.
PhaseAlignResult solve_phase_alignment(const Representation& rep, const Representation& rep2,
                                       const ToleranceConfig& tol);

// U = basis_a~ . diag(e^{i phiA}) . basis_a^dag (with the completion block
// spliced in), and likewise for V.
LocalUnitary construct_certificate(const Representation& rep, const Representation& rep2,
                                   const PhaseSolution& sol);

// ||(U (x) V) rho (U (x) V)^dag - rho2||_F; pure measurement.
double verify_certificate(const DensityMatrix& rho, const DensityMatrix& rho2,
                          const LocalUnitary& lu);

// Multi-start gradient descent on U(m) x U(n) in the Lie-algebra
// parameterization. Never returns Inequivalent: failure to align is not a
// proof. Returns Equivalent (re-verified) or Undecided with the best residual.
Verdict optimize_alignment(const DensityMatrix& rho, const DensityMatrix& rho2,
                           const EquivalenceConfig& config,
                           const std::vector<LocalUnitary>& extra_starts = {});

// Full decision pipeline: invariant gates, exact phase alignment on the
// non-degenerate stratum, optimization fallback elsewhere. Every Equivalent
// verdict carries a certificate re-verified against tol_accept.
Verdict decide_equivalence(const DensityMatrix& rho, const DensityMatrix& rho2,
                           const EquivalenceConfig& config = EquivalenceConfig{});

// Real dimension of the LU orbit through rho: the rank of the tangent map
// (H1, H2) -> [H1 (x) I + I (x) H2, rho] over anti-Hermitian pairs.
std::size_t orbit_dimension(const DensityMatrix& rho, double tol = 1e-8);

}  // namespace lueq
