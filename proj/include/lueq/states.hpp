#pragma once

#include <cstdint>
#include <random>

#include "lueq/errors.hpp"
#include "lueq/linalg.hpp"
#include "lueq/matrix.hpp"

namespace lueq {

// Factor dimensions of H = H1 (x) H2. The flat index convention is row-major
// over the first factor: basis element i*n + j (0-based) is |i> (x) |j>.
struct BipartiteDims {
    std::size_t m = 2;
    std::size_t n = 2;

    std::size_t total() const { return m * n; }
    bool operator==(const BipartiteDims&) const = default;
};

struct DensityMatrix {
    BipartiteDims dims;
    ComplexMatrix mat;  // mn x mn, Hermitian, PSD, trace one
};

struct LocalUnitary {
    ComplexMatrix u;  // m x m
    ComplexMatrix v;  // n x n
};

// Parameters of the modified two-qubit Werner family: e >= 0, 0 <= f <= 1-e.
struct WernerParams {
    double e = 0.0;
    double f = 0.0;
};

// Seeded random source; passed explicitly so every generator is deterministic
// per seed and safe to use from concurrent callers owning their own instance.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    Complex complex_gaussian() {
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return Complex(re, im);
    }
    double uniform() { return uniform_(engine_); }
    std::uint64_t next_seed() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Ingestion guard: checks shape, Hermiticity, unit trace and positive
// semidefiniteness, naming the violated invariant with the measured value.
DensityMatrix validate(const ComplexMatrix& mat, BipartiteDims dims, double tol = 1e-10);

// (U (x) V) rho (U (x) V)^dag. Throws ShapeMismatch.
DensityMatrix apply_local_unitary(const DensityMatrix& rho, const LocalUnitary& lu);

// The modified Werner state, emitted entry-for-entry:
//   diag((1-e-f)/3, (1+2f)/6, (1+2f)/6, (1+e-f)/3), central off-diagonal (1-4f)/6.
DensityMatrix werner(WernerParams params);

// rho = G G^dag / tr(G G^dag) with G an (mn x rank) matrix of standard complex
// Gaussians; full measure over rank-r states. Throws InvalidRank.
DensityMatrix random_density(BipartiteDims dims, std::size_t rank, std::uint64_t seed);

// Haar pair via Gram-Schmidt QR of Ginibre matrices; the orthonormalization
// keeps the R diagonal real-positive, which is exactly the Haar phase fix.
LocalUnitary random_local_unitary(BipartiteDims dims, std::uint64_t seed);
ComplexMatrix haar_unitary(std::size_t dim, Rng& rng);

// Reduced states tr_2(rho) (m x m) and tr_1(rho) (n x n).
ComplexMatrix partial_trace_second(const ComplexMatrix& mat, BipartiteDims dims);
ComplexMatrix partial_trace_first(const ComplexMatrix& mat, BipartiteDims dims);

// |psi><psi| for a unit column vector of length mn.
DensityMatrix pure_density(const std::vector<Complex>& psi, BipartiteDims dims);

}  // namespace lueq
