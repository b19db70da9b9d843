#include "lueq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lueq {

namespace {

// Unitary 2x2 that diagonalizes the Hermitian block [[a_pp, a_pq], [conj(a_pq), a_qq]]
// using the inner (small-angle) rotation, phase-split so the diagonal stays real:
//   Q = [[c, s*e^{i phi}], [-s*e^{-i phi}, c]],  phi = arg(a_pq).
struct JacobiRotation {
    double c = 1.0;
    Complex s_pos;  // Q(p,q) =  s * e^{ i phi}
    Complex s_neg;  // Q(q,p) = -s * e^{-i phi}
};

JacobiRotation make_rotation(double app, double aqq, Complex apq) {
    JacobiRotation rot;
    const double b = std::abs(apq);
    if (b == 0.0) return rot;
    const Complex phase = apq / b;
    const double tau = (aqq - app) / (2.0 * b);
    const double sign = tau >= 0.0 ? 1.0 : -1.0;
    const double t = sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    rot.c = c;
    rot.s_pos = s * phase;
    rot.s_neg = -s * std::conj(phase);
    return rot;
}

// B <- B * Q on columns p, q.
void apply_right(ComplexMatrix& b, std::size_t p, std::size_t q, const JacobiRotation& rot) {
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const Complex bp = b(i, p);
        const Complex bq = b(i, q);
        b(i, p) = rot.c * bp + rot.s_neg * bq;
        b(i, q) = rot.s_pos * bp + rot.c * bq;
    }
}

// B <- Q^dag * B on rows p, q.
void apply_left_adjoint(ComplexMatrix& b, std::size_t p, std::size_t q, const JacobiRotation& rot) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const Complex bp = b(p, j);
        const Complex bq = b(q, j);
        b(p, j) = rot.c * bp + std::conj(rot.s_neg) * bq;
        b(q, j) = std::conj(rot.s_pos) * bp + rot.c * bq;
    }
}

// Gram-Schmidt completion of the leading `filled` orthonormal columns of q
// against the standard basis, in index order. Returns the count reached.
std::size_t gs_complete_columns(ComplexMatrix& q, std::size_t filled, std::size_t want,
                                double tol) {
    const std::size_t dim = q.rows();
    for (std::size_t cand = 0; cand < dim && filled < want; ++cand) {
        std::vector<Complex> w(dim, Complex(0.0));
        w[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t c = 0; c < filled; ++c) {
                Complex proj = 0.0;
                for (std::size_t r = 0; r < dim; ++r) proj += std::conj(q(r, c)) * w[r];
                for (std::size_t r = 0; r < dim; ++r) w[r] -= proj * q(r, c);
            }
        }
        double nrm = 0.0;
        for (const Complex& z : w) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        if (nrm < tol) continue;
        for (std::size_t r = 0; r < dim; ++r) q(r, filled) = w[r] / nrm;
        ++filled;
    }
    return filled;
}

double offdiag_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

// Rotates the column so its largest-modulus entry (lowest index on ties)
// becomes real-positive. Returns the applied factor so a partner column can
// co-rotate.
Complex fix_column_phase(ComplexMatrix& m, std::size_t j) {
    std::size_t best = 0;
    double best_abs = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double a = std::abs(m(r, j));
        if (a > best_abs) {
            best_abs = a;
            best = r;
        }
    }
    if (best_abs == 0.0) return Complex(1.0, 0.0);
    const Complex factor = std::conj(m(best, j) / best_abs);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, j) *= factor;
    m(best, j) = Complex(std::abs(m(best, j)), 0.0);
    return factor;
}

}  // namespace

HermitianEig eigh(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) {
        throw ShapeMismatch("eigh: matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square");
    }
    const std::size_t n = a.rows();
    const double scale = a.frobenius_norm();
    const double herm_dev = frobenius_distance(a, a.adjoint());
    if (herm_dev > tol * std::max(scale, 1e-300)) {
        throw NotHermitian("eigh: ||a - a^dag||_F = " + std::to_string(herm_dev) +
                           " exceeds tol * ||a||_F");
    }

    ComplexMatrix work = a;
    ComplexMatrix vecs = ComplexMatrix::identity(n);
    if (scale > 0.0) {
        const double target = 1e-14 * scale;
        bool converged = offdiag_norm(work) <= target;
        int sweep = 0;
        while (!converged) {
            if (++sweep > kJacobiSweepBudget) {
                throw NoConvergence("eigh: off-diagonal norm " +
                                    std::to_string(offdiag_norm(work)) + " after " +
                                    std::to_string(kJacobiSweepBudget) + " sweeps");
            }
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    if (std::abs(work(p, q)) == 0.0) continue;
                    const JacobiRotation rot =
                        make_rotation(work(p, p).real(), work(q, q).real(), work(p, q));
                    apply_right(work, p, q, rot);
                    apply_left_adjoint(work, p, q, rot);
                    work(p, q) = 0.0;
                    work(q, p) = 0.0;
                    apply_right(vecs, p, q, rot);
                }
            }
            converged = offdiag_norm(work) <= target;
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return work(i, i).real() > work(j, j).real();
    });

    HermitianEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = work(order[j], order[j]).real();
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, j) = vecs(r, order[j]);
        fix_column_phase(out.eigenvectors, j);
    }
    return out;
}

Svd svd(const ComplexMatrix& a, double tol) {
    if (a.rows() < a.cols()) {
        Svd t = svd(a.adjoint(), tol);
        return Svd{std::move(t.v), std::move(t.singular_values), std::move(t.u)};
    }
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const double scale = a.frobenius_norm();

    ComplexMatrix work = a;
    ComplexMatrix v = ComplexMatrix::identity(n);
    if (scale > 0.0) {
        bool converged = false;
        int sweep = 0;
        while (!converged) {
            if (++sweep > kJacobiSweepBudget) {
                throw NoConvergence("svd: column pairs still coupled after " +
                                    std::to_string(kJacobiSweepBudget) + " sweeps");
            }
            converged = true;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    double gpp = 0.0, gqq = 0.0;
                    Complex gpq = 0.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        gpp += std::norm(work(i, p));
                        gqq += std::norm(work(i, q));
                        gpq += std::conj(work(i, p)) * work(i, q);
                    }
                    if (std::abs(gpq) <= tol * std::sqrt(gpp * gqq)) continue;
                    converged = false;
                    const JacobiRotation rot = make_rotation(gpp, gqq, gpq);
                    apply_right(work, p, q, rot);
                    apply_right(v, p, q, rot);
                }
            }
        }
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::norm(work(i, j));
        norms[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

    const double sigma_floor = scale * 1e-15;
    Svd out;
    out.singular_values.resize(n);
    out.u = ComplexMatrix(m, n);
    out.v = ComplexMatrix(n, n);
    std::size_t filled = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.singular_values[j] = norms[src];
        for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, src);
        if (norms[src] > sigma_floor) {
            for (std::size_t r = 0; r < m; ++r) out.u(r, j) = work(r, src) / norms[src];
            const Complex factor = fix_column_phase(out.u, j);
            for (std::size_t r = 0; r < n; ++r) out.v(r, j) *= factor;
            ++filled;
        }
    }
    if (filled < n) {
        // Null directions: complete the left factor so its columns stay orthonormal.
        ComplexMatrix completed(m, m);
        for (std::size_t j = 0; j < filled; ++j)
            for (std::size_t r = 0; r < m; ++r) completed(r, j) = out.u(r, j);
        if (gs_complete_columns(completed, filled, n, 0.5 / double(m)) < n) {
            throw NoConvergence("svd: could not complete orthonormal left factor");
        }
        for (std::size_t j = filled; j < n; ++j) {
            for (std::size_t r = 0; r < m; ++r) out.u(r, j) = completed(r, j);
            fix_column_phase(out.u, j);
        }
    }
    return out;
}

ComplexMatrix complete_basis(const ComplexMatrix& cols, std::size_t dim, double tol) {
    if (cols.rows() != dim) {
        throw ShapeMismatch("complete_basis: cols have " + std::to_string(cols.rows()) +
                            " rows, expected " + std::to_string(dim));
    }
    const std::size_t k = cols.cols();
    if (k > dim) {
        throw ShapeMismatch("complete_basis: more columns than dim");
    }
    double gram_dev = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            Complex g = 0.0;
            for (std::size_t r = 0; r < dim; ++r) g += std::conj(cols(r, i)) * cols(r, j);
            gram_dev += std::norm(g - (i == j ? Complex(1.0) : Complex(0.0)));
        }
    gram_dev = std::sqrt(gram_dev);
    if (gram_dev >= tol) {
        throw NotOrthonormal("complete_basis: ||C^dag C - I||_F = " + std::to_string(gram_dev));
    }

    ComplexMatrix q(dim, dim);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t r = 0; r < dim; ++r) q(r, j) = cols(r, j);

    const std::size_t reached = gs_complete_columns(q, k, dim, tol);
    if (reached < dim) {
        throw RankDeficient("complete_basis: found only " + std::to_string(reached) +
                            " of " + std::to_string(dim) + " independent directions");
    }
    return q;
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeMismatch("frobenius_distance: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.entries()[i] - b.entries()[i]);
    return std::sqrt(s);
}

}  // namespace lueq
