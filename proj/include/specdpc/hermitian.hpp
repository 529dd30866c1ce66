#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "specdpc/complex_matrix.hpp"

namespace specdpc {

/// Eigenvalues in descending order; eigenvectors are the matching columns.
struct HermitianEigen {
    std::vector<double> values;
    ComplexMatrix vectors;
};

inline double frobenius_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (const auto& z : a.data()) s += std::norm(z);
    return std::sqrt(s);
}

/// ||A - A^H||_F; zero for exactly Hermitian input.
inline double hermitian_defect(const ComplexMatrix& a) {
    if (!a.is_square()) throw NotSquare("hermitian_defect of a non-square matrix");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - std::conj(a(j, i)));
    return std::sqrt(s);
}

namespace detail {

// Cyclic Jacobi on a Hermitian matrix. `a` is overwritten by its (nearly)
// diagonal form; `v` accumulates the rotations.
inline void jacobi_sweeps(ComplexMatrix& a, ComplexMatrix& v, double scale) {
    const std::size_t n = a.rows();
    constexpr int kMaxSweeps = 100;
    const double stop = 1e-14 * scale;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off += std::norm(a(i, j));
        if (std::sqrt(off) <= stop) return;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double g = std::abs(apq);
                if (g == 0.0) continue;
                const cplx phase_conj = std::conj(apq / g);
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    // Equal diagonals rotate the larger eigenvalue into slot p.
                    const double sgn = theta > 0.0 ? 1.0 : -1.0;
                    t = sgn / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx gpp = c, gpq = s, gqp = -s * phase_conj, gqq = c * phase_conj;

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = a(q, p) = cplx{};
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input must be Hermitian to `hermitian_tol` relative Frobenius error; it is
/// symmetrized before rotating. Eigenvalues come back descending, ties keep the
/// order in which the rotations left them on the diagonal.
inline HermitianEigen eig_hermitian(const ComplexMatrix& a_in, double hermitian_tol = 1e-10) {
    if (!a_in.is_square()) throw NotSquare("eig_hermitian needs a square matrix");
    const std::size_t n = a_in.rows();
    const double scale = frobenius_norm(a_in);
    if (hermitian_defect(a_in) > hermitian_tol * scale) {
        throw NotHermitian("matrix is not Hermitian within tolerance");
    }

    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (a_in(i, j) + std::conj(a_in(j, i)));
    ComplexMatrix v = ComplexMatrix::identity(n);
    if (scale > 0.0) detail::jacobi_sweeps(a, v, scale);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a(x, x).real() > a(y, y).real();
    });

    HermitianEigen out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

/// Zero out eigenvalues in [-1e-12 * ||A||_2, 0); anything more negative is an error.
inline void clamp_nonnegative(HermitianEigen& e, double rel_tol = 1e-12) {
    double scale = 0.0;
    for (double x : e.values) scale = std::max(scale, std::abs(x));
    for (double& x : e.values) {
        if (x >= 0.0) continue;
        if (x < -rel_tol * scale) {
            throw NotPositiveSemidefinite("matrix has a significantly negative eigenvalue");
        }
        x = 0.0;
    }
}

/// Largest singular value, from the eigenvalues of A^H A.
inline double spectral_norm(const ComplexMatrix& a) {
    if (a.empty()) return 0.0;
    const ComplexMatrix gram = a.adjoint() * a;
    const HermitianEigen e = eig_hermitian(gram);
    return std::sqrt(std::max(e.values.front(), 0.0));
}

/// V diag(values) V^H.
inline ComplexMatrix reconstruct(const HermitianEigen& e) {
    const std::size_t n = e.vectors.rows();
    const std::size_t k = e.values.size();
    ComplexMatrix out(n, n);
    for (std::size_t c = 0; c < k; ++c) {
        if (e.values[c] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = e.values[c] * e.vectors(i, c);
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * std::conj(e.vectors(j, c));
        }
    }
    return out;
}

}  // namespace specdpc
