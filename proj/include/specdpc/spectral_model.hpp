#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "specdpc/complex_matrix.hpp"
#include "specdpc/fft.hpp"
#include "specdpc/hermitian.hpp"

namespace specdpc {

/// Uniform grid w_m = -pi + 2 pi m / N on [-pi, pi), N a power of two.
class FrequencyGrid {
public:
    static constexpr std::size_t kDefaultSize = 4096;

    explicit FrequencyGrid(std::size_t size = kDefaultSize) : size_(size) {
        if (size < 2 || !std::has_single_bit(size)) {
            throw BadParams("grid size must be a power of two >= 2, got " + std::to_string(size));
        }
    }

    std::size_t size() const noexcept { return size_; }
    double spacing() const noexcept { return kTwoPi / static_cast<double>(size_); }
    double node(std::size_t m) const noexcept {
        return -kPi + kTwoPi * static_cast<double>(m) / static_cast<double>(size_);
    }
    FrequencyGrid refined() const { return FrequencyGrid(2 * size_); }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    std::size_t size_;
};

/// Point mass of the spectral measure at `omega` in (-pi, pi].
struct Atom {
    double omega = 0.0;
    ComplexMatrix mass;
};

namespace detail {

// PSD within tolerance: Cholesky of A + tol * ||A||_F * I succeeds.
inline bool psd_within(const ComplexMatrix& a, double tol) {
    const std::size_t n = a.rows();
    const double shift = tol * frobenius_norm(a);
    if (shift == 0.0) return true;
    std::vector<cplx> l(n * n, cplx{});
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real() + shift;
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l[j * n + k]);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        l[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * std::conj(l[j * n + k]);
            l[i * n + j] = s / ljj;
        }
    }
    return true;
}

inline void require_hermitian_psd(const ComplexMatrix& a, std::size_t dim, double tol,
                                  const std::string& what) {
    if (a.rows() != dim || a.cols() != dim) {
        throw DimensionMismatch(what + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    if (hermitian_defect(a) > tol * frobenius_norm(a)) throw NotHermitian(what + " is not Hermitian");
    if (!psd_within(a, tol)) throw NotPositiveSemidefinite(what + " is not positive semidefinite");
}

}  // namespace detail

/// Second-order law of a d-dimensional process: density sampled on a grid plus atoms.
class SpectralMeasure {
public:
    SpectralMeasure(std::size_t dim, FrequencyGrid grid, std::vector<ComplexMatrix> density,
                    std::vector<Atom> atoms = {}, bool singular_continuous = false,
                    double tolerance = 1e-10)
        : dim_(dim), grid_(grid), density_(std::move(density)), atoms_(std::move(atoms)),
          singular_continuous_(singular_continuous) {
        if (density_.size() != grid_.size()) {
            throw DimensionMismatch("density must have one matrix per grid node");
        }
        for (std::size_t m = 0; m < density_.size(); ++m) {
            detail::require_hermitian_psd(density_[m], dim_, tolerance,
                                          "density at node " + std::to_string(m));
        }
        for (const auto& atom : atoms_) {
            if (!(atom.omega > -kPi && atom.omega <= kPi)) {
                throw BadParams("atom frequency must lie in (-pi, pi]");
            }
            detail::require_hermitian_psd(atom.mass, dim_, tolerance, "atom mass");
        }
    }

    /// Absolutely continuous, atom-free measure with density `f(w)` evaluated on the grid.
    template <class F>
    static SpectralMeasure from_function(std::size_t dim, FrequencyGrid grid, F&& f) {
        std::vector<ComplexMatrix> density;
        density.reserve(grid.size());
        for (std::size_t m = 0; m < grid.size(); ++m) density.push_back(f(grid.node(m)));
        return SpectralMeasure(dim, grid, std::move(density));
    }

    std::size_t dim() const noexcept { return dim_; }
    const FrequencyGrid& grid() const noexcept { return grid_; }
    const ComplexMatrix& density(std::size_t m) const { return density_[m]; }
    const std::vector<ComplexMatrix>& densities() const noexcept { return density_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    bool singular_continuous() const noexcept { return singular_continuous_; }
    bool has_singular_part() const noexcept { return !atoms_.empty() || singular_continuous_; }

    /// Same measure with every density value and atom mass multiplied by c >= 0.
    SpectralMeasure scaled(double c) const {
        std::vector<ComplexMatrix> dens = density_;
        for (auto& f : dens) f *= c;
        std::vector<Atom> atoms = atoms_;
        for (auto& a : atoms) a.mass *= c;
        return SpectralMeasure(dim_, grid_, std::move(dens), std::move(atoms), singular_continuous_);
    }

    /// Absolutely continuous part only.
    SpectralMeasure density_part() const { return SpectralMeasure(dim_, grid_, density_); }

    /// Density restricted to the channels in `idx` (principal submatrices).
    SpectralMeasure subprocess(std::span<const std::size_t> idx) const {
        std::vector<ComplexMatrix> dens;
        dens.reserve(density_.size());
        for (const auto& f : density_) dens.push_back(f.principal(idx));
        std::vector<Atom> atoms;
        for (const auto& a : atoms_) atoms.push_back({a.omega, a.mass.principal(idx)});
        return SpectralMeasure(idx.size(), grid_, std::move(dens), std::move(atoms),
                               singular_continuous_);
    }

private:
    std::size_t dim_;
    FrequencyGrid grid_;
    std::vector<ComplexMatrix> density_;
    std::vector<Atom> atoms_;
    bool singular_continuous_;
};

/// Matrix covariance function C(h), stored for h = 0..H; C(-h) = C(h)^H.
class CovarianceSequence {
public:
    CovarianceSequence(std::size_t dim, std::vector<ComplexMatrix> lags) : dim_(dim), lags_(std::move(lags)) {
        if (lags_.empty()) throw BadParams("covariance sequence needs at least C(0)");
        for (const auto& c : lags_) {
            if (c.rows() != dim_ || c.cols() != dim_) throw DimensionMismatch("covariance lag has wrong shape");
        }
        auto& c0 = lags_.front();
        if (hermitian_defect(c0) > 1e-10 * frobenius_norm(c0)) throw NotHermitian("C(0) is not Hermitian");
        c0 = 0.5 * (c0 + c0.adjoint());
        if (!detail::psd_within(c0, 1e-10)) throw NotPositiveSemidefinite("C(0) is not PSD");
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t max_lag() const noexcept { return lags_.size() - 1; }

    ComplexMatrix at(long h) const {
        const auto k = static_cast<std::size_t>(h < 0 ? -h : h);
        if (k > max_lag()) throw BadParams("lag outside the stored window");
        return h < 0 ? lags_[k].adjoint() : lags_[k];
    }
    const std::vector<ComplexMatrix>& nonnegative_lags() const noexcept { return lags_; }

    CovarianceSequence subprocess(std::span<const std::size_t> idx) const {
        std::vector<ComplexMatrix> out;
        out.reserve(lags_.size());
        for (const auto& c : lags_) {
            ComplexMatrix s(idx.size(), idx.size());
            for (std::size_t p = 0; p < idx.size(); ++p)
                for (std::size_t q = 0; q < idx.size(); ++q) s(p, q) = c(idx[p], idx[q]);
            out.push_back(std::move(s));
        }
        return CovarianceSequence(idx.size(), std::move(out));
    }

private:
    std::size_t dim_;
    std::vector<ComplexMatrix> lags_;
};

enum class Taper { rectangular, bartlett };

inline double taper_weight(Taper taper, long h, std::size_t max_lag) {
    if (taper == Taper::rectangular || max_lag == 0) return 1.0;
    return 1.0 - static_cast<double>(h < 0 ? -h : h) / static_cast<double>(max_lag);
}

/// Periodic trapezoid (rectangle) rule: (2 pi / N) sum_m values[m].
inline double trapezoid_integral(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return kTwoPi / static_cast<double>(values.size()) * s;
}

inline ComplexMatrix trapezoid_integral(std::span<const ComplexMatrix> values) {
    if (values.empty()) throw BadParams("empty integrand");
    ComplexMatrix s(values.front().rows(), values.front().cols());
    for (const auto& v : values) s += v;
    return s * cplx{kTwoPi / static_cast<double>(values.size())};
}

namespace detail {

// sum_m f_m e^{i h w_m} for h = 0..max_lag, entrywise via one backward FFT per entry.
inline std::vector<ComplexMatrix> density_moments(std::span<const ComplexMatrix> density,
                                                  std::size_t dim, std::size_t max_lag) {
    const std::size_t n = density.size();
    std::vector<ComplexMatrix> out(max_lag + 1, ComplexMatrix(dim, dim));
    std::vector<cplx> seq(n);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            for (std::size_t m = 0; m < n; ++m) seq[m] = density[m](i, j);
            const auto x = fft::dft(seq, fft::Direction::backward);
            for (std::size_t h = 0; h <= max_lag; ++h) {
                const double sign = (h % 2 == 0) ? 1.0 : -1.0;
                out[h](i, j) = sign * x[h % n];
            }
        }
    return out;
}

}  // namespace detail

/// C(h) = (2 pi / N) sum_m e^{i h w_m} f(w_m) + sum_atoms e^{i h w_j} M_j, h = 0..H.
inline CovarianceSequence covariance_from_measure(const SpectralMeasure& s, std::size_t max_lag) {
    const std::size_t d = s.dim();
    auto lags = detail::density_moments(s.densities(), d, max_lag);
    const cplx weight{s.grid().spacing()};
    for (std::size_t h = 0; h <= max_lag; ++h) {
        lags[h] *= weight;
        for (const auto& atom : s.atoms()) {
            lags[h] += std::polar(1.0, static_cast<double>(h) * atom.omega) * atom.mass;
        }
    }
    return CovarianceSequence(d, std::move(lags));
}

/// Lag-window estimate f(w_m) = (1/2pi) sum_{|h|<=H} taper(h/H) C(h) e^{-i h w_m},
/// projected onto the PSD cone node by node. H = 0 gives the constant C(0)/2pi.
inline SpectralMeasure measure_from_covariance(const CovarianceSequence& c, FrequencyGrid grid,
                                               Taper taper = Taper::bartlett) {
    const std::size_t d = c.dim();
    const std::size_t n = grid.size();
    const auto max_lag = static_cast<long>(c.max_lag());
    std::vector<ComplexMatrix> dens(n, ComplexMatrix(d, d));
    std::vector<cplx> seq(n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            std::fill(seq.begin(), seq.end(), cplx{});
            for (long h = -max_lag; h <= max_lag; ++h) {
                const auto k = static_cast<std::size_t>(h < 0 ? -h : h);
                const cplx chij = h >= 0 ? c.nonnegative_lags()[k](i, j)
                                         : std::conj(c.nonnegative_lags()[k](j, i));
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                const auto slot = static_cast<std::size_t>(((h % static_cast<long>(n)) + static_cast<long>(n)) %
                                                           static_cast<long>(n));
                seq[slot] += sign * taper_weight(taper, h, c.max_lag()) * chij;
            }
            const auto x = fft::dft(seq, fft::Direction::forward);
            for (std::size_t m = 0; m < n; ++m) dens[m](i, j) = x[m] / kTwoPi;
        }
    for (auto& f : dens) {
        f = 0.5 * (f + f.adjoint());
        HermitianEigen e = eig_hermitian(f);
        for (double& v : e.values) v = std::max(v, 0.0);
        f = reconstruct(e);
    }
    return SpectralMeasure(d, grid, std::move(dens));
}

}  // namespace specdpc
