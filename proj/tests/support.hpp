#pragma once

// Generators and small oracles shared by the unit tests, property tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "specdpc/specdpc.hpp"

namespace testing_support {

using specdpc::ComplexMatrix;
using specdpc::cplx;
using specdpc::kPi;
using specdpc::kTwoPi;

struct Gen {
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    std::size_t integer(std::size_t a, std::size_t b) { return std::uniform_int_distribution<std::size_t>(a, b)(rng); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
    cplx cnormal() { return {normal(), normal()}; }
    cplx unit() { return std::polar(1.0, uniform(-kPi, kPi)); }

    ComplexMatrix matrix(std::size_t r, std::size_t c) {
        ComplexMatrix a(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) a(i, j) = cnormal();
        return a;
    }

    ComplexMatrix hermitian(std::size_t d) {
        ComplexMatrix b = matrix(d, d);
        return 0.5 * (b + b.adjoint());
    }

    ComplexMatrix psd(std::size_t d, std::size_t rank) {
        const ComplexMatrix b = matrix(d, rank);
        return specdpc::mul_adjoint(b, b);
    }

    std::vector<cplx> unit_vector(std::size_t d) {
        std::vector<cplx> v(d);
        double s = 0.0;
        for (auto& x : v) {
            x = cnormal();
            s += std::norm(x);
        }
        for (auto& x : v) x /= std::sqrt(s);
        return v;
    }

    std::mt19937_64 rng;
};

/// f(w) = A(w) A(w)^* / 2pi with A(w) = sum_{k<=K} A_k e^{-ikw}, d x q. A_0 carries well separated
/// singular values so eigenvalue channels never cross; the higher terms are small.
struct SmoothModel {
    std::size_t dim = 0;
    std::size_t rank = 0;
    std::vector<ComplexMatrix> coeffs;

    ComplexMatrix factor(double w) const {
        ComplexMatrix a(dim, rank);
        for (std::size_t k = 0; k < coeffs.size(); ++k) a += std::polar(1.0, -static_cast<double>(k) * w) * coeffs[k];
        return a;
    }
    ComplexMatrix density(double w) const {
        const ComplexMatrix a = factor(w);
        return specdpc::mul_adjoint(a, a) * cplx{1.0 / kTwoPi};
    }
    specdpc::SpectralMeasure measure(std::size_t n) const {
        return specdpc::SpectralMeasure::from_function(dim, specdpc::FrequencyGrid(n),
                                                       [this](double w) { return density(w); });
    }
    /// Exact C(h) = sum_k A_{k+h} A_k^*.
    ComplexMatrix covariance(long h) const {
        ComplexMatrix c(dim, dim);
        const long kk = static_cast<long>(coeffs.size());
        for (long k = 0; k < kk; ++k) {
            const long a = k + h;
            if (a < 0 || a >= kk) continue;
            c += coeffs[static_cast<std::size_t>(a)] * coeffs[static_cast<std::size_t>(k)].adjoint();
        }
        return c;
    }
};

inline SmoothModel smooth_model(Gen& g, std::size_t dim, std::size_t rank, std::size_t degree, double wiggle = 0.15) {
    SmoothModel m{dim, rank, {}};
    // A_0 = first q columns of a random unitary times diag(s)
    Eigen::MatrixXcd z(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) z(i, j) = g.cnormal();
    const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
    ComplexMatrix a0(dim, rank);
    for (std::size_t j = 0; j < rank; ++j) {
        const double s = 1.0 + 1.2 * static_cast<double>(rank - 1 - j);
        for (std::size_t i = 0; i < dim; ++i) a0(i, j) = s * q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    m.coeffs.push_back(a0);
    for (std::size_t k = 1; k <= degree; ++k) m.coeffs.push_back(g.matrix(dim, rank) * cplx{wiggle / static_cast<double>(k)});
    return m;
}

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& a) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
    return out;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& a) {
    ComplexMatrix out(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = a(i, j);
    return out;
}

/// Eigenvalues in descending order from Eigen's self-adjoint solver.
inline std::vector<double> eigen_oracle(const ComplexMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a), Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::reverse(v.begin(), v.end());
    return v;
}

/// Prediction error covariance from the block Toeplitz matrix: Schur complement of the past.
inline ComplexMatrix schur_prediction_error(const std::function<ComplexMatrix(long)>& c, std::size_t d, std::size_t n) {
    const auto dd = static_cast<Eigen::Index>(d);
    const auto big = static_cast<Eigen::Index>(d * (n + 1));
    Eigen::MatrixXcd g(big, big);
    // block (a, b) = C(a - b), blocks ordered X_t, X_{t-1}, ..., X_{t-n}
    for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = 0; b <= n; ++b)
            g.block(static_cast<Eigen::Index>(a) * dd, static_cast<Eigen::Index>(b) * dd, dd, dd) =
                to_eigen(c(static_cast<long>(b) - static_cast<long>(a)));
    if (n == 0) return from_eigen(g);
    const Eigen::MatrixXcd a = g.topLeftCorner(dd, dd);
    const Eigen::MatrixXcd b = g.topRightCorner(dd, big - dd);
    const Eigen::MatrixXcd p = g.bottomRightCorner(big - dd, big - dd);
    return from_eigen(a - b * p.ldlt().solve(b.adjoint()));
}

/// E|X - T X|^2 = integral of tr[(I - T) f (I - T)^*] for a per-node linear map T.
inline double projector_mse(const specdpc::SpectralMeasure& s, const std::vector<ComplexMatrix>& t) {
    const std::size_t d = s.dim();
    const ComplexMatrix eye = ComplexMatrix::identity(d);
    double acc = 0.0;
    for (std::size_t m = 0; m < s.grid().size(); ++m) {
        const ComplexMatrix r = eye - t[m];
        acc += (r * s.density(m) * r.adjoint()).trace().real();
    }
    return s.grid().spacing() * acc;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace testing_support
