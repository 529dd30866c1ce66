#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specdpc/complex_matrix.hpp"
#include "specdpc/fft.hpp"
#include "specdpc/hermitian.hpp"
#include "specdpc/parallel.hpp"
#include "specdpc/spectral_model.hpp"

namespace specdpc {

/// How the per-node eigenvector phases are fixed across the grid.
enum class GaugeStrategy {
    raw,          // as returned by the eigensolver
    anchor_real,  // largest-modulus entry of each column real positive, node by node
    continuity,   // anchor at the first node, then maximize overlap with the previous node
    winding,      // continuity, then spread the closing phase and pick the best integer winding
};

/// Channel ordering across nodes: descending eigenvalues, or matched by subspace overlap.
enum class ChannelOrder { sorted, track };

inline std::string to_string(GaugeStrategy g) {
    switch (g) {
        case GaugeStrategy::raw: return "raw";
        case GaugeStrategy::anchor_real: return "anchor-real";
        case GaugeStrategy::continuity: return "continuity";
        case GaugeStrategy::winding: return "winding";
    }
    return "raw";
}

inline GaugeStrategy parse_gauge(std::string_view s) {
    if (s == "raw" || s == "none") return GaugeStrategy::raw;
    if (s == "anchor-real") return GaugeStrategy::anchor_real;
    if (s == "continuity" || s == "phase-continuity") return GaugeStrategy::continuity;
    if (s == "winding") return GaugeStrategy::winding;
    throw BadParams("unknown gauge strategy '" + std::string(s) + "'");
}

inline std::string to_string(ChannelOrder o) { return o == ChannelOrder::sorted ? "sorted" : "track"; }

inline ChannelOrder parse_channel_order(std::string_view s) {
    if (s == "sorted") return ChannelOrder::sorted;
    if (s == "track") return ChannelOrder::track;
    throw BadParams("unknown channel order '" + std::string(s) + "'");
}

/// Eigenvalues and eigenvectors of a density at every grid node, for a fixed rank r.
class EigenField {
public:
    EigenField(FrequencyGrid grid, std::size_t dim, std::size_t rank,
               std::vector<std::vector<double>> lambdas, std::vector<ComplexMatrix> vectors,
               GaugeStrategy gauge = GaugeStrategy::raw, ChannelOrder order = ChannelOrder::sorted)
        : grid_(grid), dim_(dim), rank_(rank), lambdas_(std::move(lambdas)),
          vectors_(std::move(vectors)), gauge_(gauge), order_(order) {
        if (lambdas_.size() != grid_.size() || vectors_.size() != grid_.size()) {
            throw DimensionMismatch("eigen field needs one entry per grid node");
        }
        if (rank_ > dim_) throw RankOutOfRange("rank exceeds dimension");
        const ComplexMatrix eye = ComplexMatrix::identity(rank_);
        for (std::size_t m = 0; m < grid_.size(); ++m) {
            if (lambdas_[m].size() != rank_) throw DimensionMismatch("eigenvalue count differs from rank");
            if (vectors_[m].rows() != dim_ || vectors_[m].cols() != rank_) {
                throw DimensionMismatch("eigenvector block has the wrong shape");
            }
            for (double v : lambdas_[m])
                if (!(v >= 0.0) || !std::isfinite(v)) throw BadParams("eigenvalues must be finite and >= 0");
            if (frobenius_norm(vectors_[m].adjoint() * vectors_[m] - eye) > 1e-10) {
                throw BadParams("eigenvector columns are not orthonormal at node " + std::to_string(m));
            }
        }
    }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t rank() const noexcept { return rank_; }
    GaugeStrategy gauge() const noexcept { return gauge_; }
    ChannelOrder order() const noexcept { return order_; }

    double lambda(std::size_t m, std::size_t j) const { return lambdas_[m][j]; }
    std::span<const double> lambdas(std::size_t m) const { return lambdas_[m]; }
    const ComplexMatrix& vectors(std::size_t m) const { return vectors_[m]; }
    const std::vector<ComplexMatrix>& all_vectors() const noexcept { return vectors_; }

    /// lambda_j over the whole grid.
    std::vector<double> channel(std::size_t j) const {
        std::vector<double> out(size());
        for (std::size_t m = 0; m < size(); ++m) out[m] = lambdas_[m][j];
        return out;
    }

    /// U_k Lambda_k U_k^* at node m, using the first k channels.
    ComplexMatrix density(std::size_t m, std::size_t k) const {
        ComplexMatrix out(dim_, dim_);
        const auto& u = vectors_[m];
        for (std::size_t c = 0; c < k; ++c) {
            const double l = lambdas_[m][c];
            if (l == 0.0) continue;
            for (std::size_t i = 0; i < dim_; ++i) {
                const cplx ui = l * u(i, c);
                for (std::size_t j = 0; j < dim_; ++j) out(i, j) += ui * std::conj(u(j, c));
            }
        }
        return out;
    }
    ComplexMatrix density(std::size_t m) const { return density(m, rank_); }

    EigenField with_vectors(std::vector<ComplexMatrix> vectors, GaugeStrategy gauge) const {
        return EigenField(grid_, dim_, rank_, lambdas_, std::move(vectors), gauge, order_);
    }

private:
    FrequencyGrid grid_;
    std::size_t dim_;
    std::size_t rank_;
    std::vector<std::vector<double>> lambdas_;
    std::vector<ComplexMatrix> vectors_;
    GaugeStrategy gauge_;
    ChannelOrder order_;
};

namespace detail {

// Per-node eigendecompositions with eigenvalues clamped at zero.
inline std::vector<HermitianEigen> eig_nodes(const SpectralMeasure& s) {
    std::vector<HermitianEigen> out(s.grid().size());
    parallel_for(out.size(), [&](std::size_t m) {
        out[m] = eig_hermitian(s.density(m));
        for (double& v : out[m].values) v = std::max(v, 0.0);
    });
    return out;
}

inline double global_max_eigenvalue(const std::vector<HermitianEigen>& eigs) {
    double mx = 0.0;
    for (const auto& e : eigs)
        if (!e.values.empty()) mx = std::max(mx, e.values.front());
    return mx;
}

inline std::vector<std::size_t> rank_profile(const std::vector<HermitianEigen>& eigs, double rank_tol) {
    const double cut = rank_tol * global_max_eigenvalue(eigs);
    std::vector<std::size_t> profile(eigs.size());
    for (std::size_t m = 0; m < eigs.size(); ++m) {
        profile[m] = static_cast<std::size_t>(
            std::count_if(eigs[m].values.begin(), eigs[m].values.end(), [&](double v) { return v > cut; }));
    }
    return profile;
}

inline std::size_t median_rank(std::vector<std::size_t> profile) {
    if (profile.empty()) return 0;
    auto mid = profile.begin() + static_cast<std::ptrdiff_t>(profile.size() / 2);
    std::nth_element(profile.begin(), mid, profile.end());
    return *mid;
}

// Min-cost perfect assignment (Hungarian method, O(n^3)); returns column per row.
inline std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col(n);
    for (std::size_t j = 1; j <= n; ++j) col[p[j] - 1] = j - 1;
    return col;
}

inline EigenField field_from_eigs(const FrequencyGrid& grid, std::size_t dim,
                                  const std::vector<HermitianEigen>& eigs, std::size_t rank,
                                  ChannelOrder order) {
    const std::size_t n = eigs.size();
    std::vector<std::vector<double>> lambdas(n);
    std::vector<ComplexMatrix> vectors(n);
    for (std::size_t m = 0; m < n; ++m) {
        lambdas[m].assign(eigs[m].values.begin(), eigs[m].values.begin() + static_cast<std::ptrdiff_t>(rank));
        vectors[m] = eigs[m].vectors.leading_columns(rank);
    }
    if (order == ChannelOrder::track && rank > 1) {
        for (std::size_t m = 1; m < n; ++m) {
            std::vector<std::vector<double>> cost(rank, std::vector<double>(rank));
            for (std::size_t a = 0; a < rank; ++a)
                for (std::size_t b = 0; b < rank; ++b) {
                    cplx z{};
                    for (std::size_t i = 0; i < dim; ++i) z += std::conj(vectors[m - 1](i, a)) * vectors[m](i, b);
                    cost[a][b] = -std::norm(z);
                }
            const auto match = hungarian(cost);
            ComplexMatrix u(dim, rank);
            std::vector<double> l(rank);
            for (std::size_t a = 0; a < rank; ++a) {
                l[a] = lambdas[m][match[a]];
                for (std::size_t i = 0; i < dim; ++i) u(i, a) = vectors[m](i, match[a]);
            }
            vectors[m] = std::move(u);
            lambdas[m] = std::move(l);
        }
    }
    return EigenField(grid, dim, rank, std::move(lambdas), std::move(vectors), GaugeStrategy::raw, order);
}

}  // namespace detail

/// Field of the leading `rank` eigenpairs at every node, without checking rank constancy.
inline EigenField decompose_rank(const SpectralMeasure& s, std::size_t rank,
                                 ChannelOrder order = ChannelOrder::sorted) {
    if (rank > s.dim()) throw RankOutOfRange("rank exceeds dimension");
    return detail::field_from_eigs(s.grid(), s.dim(), detail::eig_nodes(s), rank, order);
}

/// Parsimonious decomposition of the density. Throws RankNotConstant when the number of
/// eigenvalues above rank_tol * (global max eigenvalue) varies over the grid.
inline EigenField decompose(const SpectralMeasure& s, double rank_tol = 1e-10,
                            ChannelOrder order = ChannelOrder::sorted) {
    const auto eigs = detail::eig_nodes(s);
    auto profile = detail::rank_profile(eigs, rank_tol);
    const std::size_t r = detail::median_rank(profile);
    if (std::any_of(profile.begin(), profile.end(), [&](std::size_t x) { return x != r; })) {
        throw RankNotConstant(std::move(profile), r);
    }
    return detail::field_from_eigs(s.grid(), s.dim(), eigs, r, order);
}

/// Fourier coefficients psi(j) = (1/N) sum_m U(w_m) e^{i j w_m}, j = -N/2 .. N/2-1.
class FourierSeries {
public:
    FourierSeries(std::vector<ComplexMatrix> coefficients, std::string gauge = "raw")
        : coeffs_(std::move(coefficients)), gauge_(std::move(gauge)) {
        for (long j = j_min(); j <= j_max(); ++j) {
            const double e = energy(j);
            total_ += e;
            if (j < 0) negative_ += e;
        }
    }

    long j_min() const noexcept { return -static_cast<long>(coeffs_.size() / 2); }
    long j_max() const noexcept { return static_cast<long>(coeffs_.size()) / 2 - 1; }
    const ComplexMatrix& operator[](long j) const { return coeffs_.at(static_cast<std::size_t>(j - j_min())); }

    double energy(long j) const {
        const double f = frobenius_norm((*this)[j]);
        return f * f;
    }
    double total_energy() const noexcept { return total_; }
    double negative_energy() const noexcept { return negative_; }
    /// Share of coefficient energy at negative indices; 0 for an all-zero series.
    double rho_minus() const noexcept { return total_ > 0.0 ? negative_ / total_ : 0.0; }
    const std::string& gauge() const noexcept { return gauge_; }

private:
    std::vector<ComplexMatrix> coeffs_;
    std::string gauge_;
    double total_ = 0.0;
    double negative_ = 0.0;
};

namespace detail {

// psi(j) = (1/N) sum_m x_m e^{i j w_m} = (1/N) (-1)^j BACKWARD[j mod N].
inline std::vector<cplx> grid_fourier(std::span<const cplx> x) {
    const std::size_t n = x.size();
    const auto y = fft::dft(x, fft::Direction::backward);
    std::vector<cplx> out(n);
    const long half = static_cast<long>(n / 2);
    for (long j = -half; j < half; ++j) {
        const auto idx = static_cast<std::size_t>((j + static_cast<long>(n)) % static_cast<long>(n));
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        out[static_cast<std::size_t>(j + half)] = sign * y[idx] / static_cast<double>(n);
    }
    return out;
}

}  // namespace detail

/// Fourier series of the first `columns` eigenvector columns of the field.
inline FourierSeries fourier_of_columns(const EigenField& e, std::size_t columns) {
    const std::size_t n = e.size(), d = e.dim();
    std::vector<ComplexMatrix> coeffs(n, ComplexMatrix(d, columns));
    std::vector<cplx> seq(n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t c = 0; c < columns; ++c) {
            for (std::size_t m = 0; m < n; ++m) seq[m] = e.vectors(m)(i, c);
            const auto psi = detail::grid_fourier(seq);
            for (std::size_t k = 0; k < n; ++k) coeffs[k](i, c) = psi[k];
        }
    return FourierSeries(std::move(coeffs), to_string(e.gauge()));
}

inline FourierSeries fourier_of_field(const EigenField& e) { return fourier_of_columns(e, e.rank()); }

struct OneSidedness {
    bool one_sided = true;
    double rho_minus = 0.0;
};

inline OneSidedness one_sidedness(const FourierSeries& f, double tol = 1e-6) {
    return {f.rho_minus() <= tol, f.rho_minus()};
}

namespace detail {

inline void rotate_column(ComplexMatrix& u, std::size_t c, cplx phase) {
    for (std::size_t i = 0; i < u.rows(); ++i) u(i, c) *= phase;
}

inline cplx anchor_phase(const ComplexMatrix& u, std::size_t c) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < u.rows(); ++i)
        if (std::abs(u(i, c)) > std::abs(u(best, c))) best = i;
    const cplx z = u(best, c);
    return z == cplx{} ? cplx{1.0} : std::conj(z) / std::abs(z);
}

inline cplx column_overlap(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t c) {
    cplx z{};
    for (std::size_t i = 0; i < a.rows(); ++i) z += std::conj(a(i, c)) * b(i, c);
    return z;
}

constexpr double kCollapseTol = 1e-8;

inline void continuity_sweep(std::vector<ComplexMatrix>& u, std::size_t rank) {
    for (std::size_t c = 0; c < rank; ++c) {
        rotate_column(u[0], c, anchor_phase(u[0], c));
        for (std::size_t m = 0; m + 1 < u.size(); ++m) {
            const cplx z = column_overlap(u[m], u[m + 1], c);
            if (std::abs(z) < kCollapseTol) throw ChannelCollapse(m + 1, c);
            rotate_column(u[m + 1], c, std::conj(z) / std::abs(z));
        }
    }
}

// After a continuity sweep the only phase jump left is between the last and first node.
// Spread it linearly over the grid and add the integer winding n (a shift of the Fourier
// index) that leaves the least coefficient energy at negative indices.
inline void distribute_winding(std::vector<ComplexMatrix>& u, std::size_t rank) {
    const std::size_t n = u.size();
    const auto nl = static_cast<long>(n);
    for (std::size_t c = 0; c < rank; ++c) {
        const cplx z = column_overlap(u[n - 1], u[0], c);
        if (std::abs(z) < kCollapseTol) throw ChannelCollapse(0, c);
        const double alpha = std::arg(z);
        for (std::size_t m = 0; m < n; ++m)
            rotate_column(u[m], c, std::polar(1.0, alpha * static_cast<double>(m) / static_cast<double>(n)));

        std::vector<double> energy(n, 0.0);  // by index j + N/2
        std::vector<cplx> seq(n);
        for (std::size_t i = 0; i < u[0].rows(); ++i) {
            for (std::size_t m = 0; m < n; ++m) seq[m] = u[m](i, c);
            const auto psi = grid_fourier(seq);
            for (std::size_t k = 0; k < n; ++k) energy[k] += std::norm(psi[k]);
        }
        // Twisting by e^{2 pi i s m / N} maps psi(j) to +-psi(j + s) cyclically, so the new
        // negative-index energy is the energy on the cyclic window [-N/2 + s, s - 1].
        std::vector<double> prefix(2 * n + 1, 0.0);
        for (std::size_t k = 0; k < 2 * n; ++k) prefix[k + 1] = prefix[k] + energy[k % n];
        auto negative_after = [&](long s) {
            const long lo = ((s % nl) + nl) % nl;  // index of j = -N/2 + s
            return prefix[static_cast<std::size_t>(lo) + n / 2] - prefix[static_cast<std::size_t>(lo)];
        };
        const double slack = 1e-12 * prefix[n];  // ignore roundoff-level improvements
        long best = 0;
        double best_val = negative_after(0);
        for (long a = 1; a < nl / 2; ++a) {
            for (long s : {a, -a}) {
                const double v = negative_after(s);
                if (v < best_val - slack) {
                    best_val = v;
                    best = s;
                }
            }
        }
        if (best != 0) {
            for (std::size_t m = 0; m < n; ++m)
                rotate_column(u[m], c, std::polar(1.0, kTwoPi * static_cast<double>(best) * static_cast<double>(m) /
                                                           static_cast<double>(n)));
        }
    }
}

}  // namespace detail

/// Re-phase every eigenvector column of the field. Eigenvalues and the projectors
/// U_k U_k^* are untouched.
inline EigenField align_gauge(const EigenField& e, GaugeStrategy strategy) {
    std::vector<ComplexMatrix> u = e.all_vectors();
    const std::size_t r = e.rank();
    switch (strategy) {
        case GaugeStrategy::raw: break;
        case GaugeStrategy::anchor_real:
            for (auto& um : u)
                for (std::size_t c = 0; c < r; ++c) detail::rotate_column(um, c, detail::anchor_phase(um, c));
            break;
        case GaugeStrategy::continuity: detail::continuity_sweep(u, r); break;
        case GaugeStrategy::winding:
            detail::continuity_sweep(u, r);
            detail::distribute_winding(u, r);
            break;
    }
    return e.with_vectors(std::move(u), strategy);
}

/// Outer factor of a scalar spectral channel: |D|^2 = 2 pi lambda on the grid, D in H^2.
struct ScalarOuterFactor {
    std::vector<cplx> boundary;      // D(w_m)
    std::vector<cplx> coefficients;  // delta(n), n = 0 .. N/2 - 1
    double negative_energy = 0.0;    // share of |delta|^2 found at negative n (aliasing)
    double log_integral = 0.0;       // integral of log lambda
};

inline constexpr double kDefaultDivergenceThreshold = -50.0 * kTwoPi;

/// Cepstral construction: c_n are the grid Fourier coefficients of log(2 pi lambda),
/// D = exp(c_0/2 + sum_{n>=1} c_n e^{-i n w}) with the Nyquist term split evenly.
inline ScalarOuterFactor scalar_outer_factor(std::span<const double> lambda,
                                             double divergence_threshold = kDefaultDivergenceThreshold) {
    const std::size_t n = lambda.size();
    if (n < 2 || !std::has_single_bit(n)) throw BadParams("channel length must be a power of two");
    std::vector<cplx> logs(n);
    double log_sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        if (!(lambda[m] >= 1e-300)) {
            throw LogDivergence("eigenvalue channel vanishes at node " + std::to_string(m));
        }
        logs[m] = std::log(kTwoPi * lambda[m]);
        log_sum += std::log(lambda[m]);
    }
    ScalarOuterFactor out;
    out.log_integral = kTwoPi / static_cast<double>(n) * log_sum;
    if (out.log_integral < divergence_threshold) {
        throw LogDivergence("log-integral " + std::to_string(out.log_integral) + " below divergence threshold");
    }

    const auto c = detail::grid_fourier(logs);  // index j + N/2
    const long half = static_cast<long>(n / 2);
    auto coef = [&](long j) { return c[static_cast<std::size_t>(j + half)]; };
    // exponent(w_m) = sum_{j=0}^{N/2} a_j e^{-i j w_m} = FORWARD[(-1)^j a_j][m]
    std::vector<cplx> seq(n, cplx{});
    seq[0] = 0.5 * coef(0).real();
    for (long j = 1; j < half; ++j) seq[static_cast<std::size_t>(j)] = ((j % 2 == 0) ? 1.0 : -1.0) * coef(j);
    seq[static_cast<std::size_t>(half)] = ((half % 2 == 0) ? 1.0 : -1.0) * 0.5 * coef(-half);
    const auto expo = fft::dft(seq, fft::Direction::forward);
    out.boundary.resize(n);
    for (std::size_t m = 0; m < n; ++m) out.boundary[m] = std::exp(expo[m]);

    const auto delta = detail::grid_fourier(out.boundary);
    double total = 0.0, negative = 0.0;
    for (long j = -half; j < half; ++j) {
        const double e = std::norm(delta[static_cast<std::size_t>(j + half)]);
        total += e;
        if (j < 0) negative += e;
    }
    out.negative_energy = total > 0.0 ? negative / total : 0.0;
    out.coefficients.assign(delta.begin() + half, delta.end());
    return out;
}

/// phi(w_m) = U(w_m) diag(D_j(w_m)) and its causal coefficients b(l).
struct SpectralFactor {
    std::vector<ComplexMatrix> boundary;      // d x r per node
    std::vector<ComplexMatrix> coefficients;  // b(0) .. b(L)
    double reconstruction_error = 0.0;        // max_m ||phi phi^*/2pi - U Lambda U^*||_F / (1 + ||f||_F)
};

/// Combine an aligned field with per-channel outer factors.
/// b(l) = sum_{j=0}^{l} psi(j) delta(l - j) for l = 0..max_lag.
inline SpectralFactor compose_spectral_factor(const EigenField& e, std::span<const ScalarOuterFactor> factors,
                                              std::size_t max_lag) {
    const std::size_t n = e.size(), d = e.dim(), r = e.rank();
    if (factors.size() != r) throw DimensionMismatch("need one outer factor per channel");
    for (const auto& f : factors)
        if (f.boundary.size() != n) throw DimensionMismatch("outer factor on a different grid");
    if (max_lag >= n / 2) throw BadParams("coefficient window must stay below N/2");

    SpectralFactor out;
    out.boundary.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        ComplexMatrix phi = e.vectors(m);
        for (std::size_t c = 0; c < r; ++c) detail::rotate_column(phi, c, factors[c].boundary[m]);
        const ComplexMatrix f = e.density(m);
        const ComplexMatrix rec = mul_adjoint(phi, phi) * cplx{1.0 / kTwoPi};
        out.reconstruction_error =
            std::max(out.reconstruction_error, frobenius_norm(rec - f) / (1.0 + frobenius_norm(f)));
        out.boundary[m] = std::move(phi);
    }

    const FourierSeries psi = fourier_of_field(e);
    out.coefficients.assign(max_lag + 1, ComplexMatrix(d, r));
    for (std::size_t l = 0; l <= max_lag; ++l)
        for (std::size_t j = 0; j <= l; ++j) {
            const ComplexMatrix& p = psi[static_cast<long>(j)];
            for (std::size_t c = 0; c < r; ++c) {
                const cplx dl = factors[c].coefficients[l - j];
                for (std::size_t i = 0; i < d; ++i) out.coefficients[l](i, c) += p(i, c) * dl;
            }
        }
    return out;
}

}  // namespace specdpc
