#pragma once

namespace lueq {

// All numerical knobs in one place, passed explicitly for reproducibility.
struct ToleranceConfig {
    // Eigen/singular values at or below this count as zero (rank cut), and
    // Schmidt coefficients within it cluster into one degenerate block.
    double tol_rank = 1e-9;
    // Eigenvalues within this cluster into one degenerate block.
    double tol_cluster = 1e-8;
    // Entries below this modulus are structural zeros for the phase solver.
    double tol_zero = 1e-10;
    // Entrywise |X|, |Y| comparison bound for the modulus gate.
    double tol_modulus = 1e-5;
    // Accepted cycle inconsistency of the angular system (radians).
    double tol_phase = 1e-4;
    // Certificate residual accepted as Equivalent.
    double tol_accept = 1e-8;
    // Guard band: spectra or Schmidt spectra with a gap below this are routed
    // through the degenerate path, where no rejection is ever issued. Keeps
    // invariant comparisons on well-conditioned data only.
    double tol_gap_safe = 1e-4;
    // Entries below this modulus are kept out of the angular system (their
    // phase is too noisy to constrain); the certificate check still covers them.
    double tol_phase_entry = 1e-6;
};

}  // namespace lueq
