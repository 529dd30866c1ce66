#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "specdpc/eigen_field.hpp"
#include "specdpc/spectral_model.hpp"

namespace specdpc {

namespace detail {
inline void check_rank(const EigenField& e, std::size_t k) {
    if (k < 1 || k > e.rank()) {
        throw RankOutOfRange("rank " + std::to_string(k) + " outside 1.." + std::to_string(e.rank()));
    }
}
}  // namespace detail

/// T(w_m) = U_k U_k^* at every node.
inline std::vector<ComplexMatrix> projector(const EigenField& e, std::size_t k) {
    detail::check_rank(e, k);
    std::vector<ComplexMatrix> out(e.size());
    for (std::size_t m = 0; m < e.size(); ++m) {
        const ComplexMatrix uk = e.vectors(m).leading_columns(k);
        out[m] = mul_adjoint(uk, uk);
    }
    return out;
}

/// f_k = U_k Lambda_k U_k^*.
inline SpectralMeasure approx_density(const EigenField& e, std::size_t k) {
    detail::check_rank(e, k);
    std::vector<ComplexMatrix> dens(e.size());
    for (std::size_t m = 0; m < e.size(); ++m) dens[m] = e.density(m, k);
    return SpectralMeasure(e.dim(), e.grid(), std::move(dens));
}

inline CovarianceSequence approx_covariance(const EigenField& e, std::size_t k, std::size_t max_lag) {
    return covariance_from_measure(approx_density(e, k), max_lag);
}

enum class BoundStatus { not_requested, attached, violated };

inline std::string to_string(BoundStatus b) {
    switch (b) {
        case BoundStatus::not_requested: return "not_requested";
        case BoundStatus::attached: return "attached";
        case BoundStatus::violated: return "violated";
    }
    return "not_requested";
}

struct EpsBounds {
    double delta = 0.0;
    double eps = 0.0;
};

struct ApproximationCertificate {
    std::size_t k = 0;
    std::size_t rank = 0;
    double mse = 0.0;            // integral of sum_{j>k} lambda_j
    double total_power = 0.0;    // integral of sum_{j<=r} lambda_j = tr C(0)
    double relative_error = 0.0;
    double covariance_error_bound = 0.0;  // integral of lambda_{k+1}
    BoundStatus bound_status = BoundStatus::not_requested;
    std::optional<double> eps_bound;      // 2 pi (r - k) eps
    std::optional<double> rel_eps_bound;  // (r - k) eps / (k Delta)
    std::optional<std::size_t> violating_node;
};

/// Mean square error of the rank-k approximation and the optional (Delta, eps) bounds.
/// Bounds are attached only if lambda_k >= Delta > eps >= lambda_{k+1} holds at every node.
inline ApproximationCertificate certificate(const EigenField& e, std::size_t k,
                                            std::optional<EpsBounds> bounds = std::nullopt) {
    detail::check_rank(e, k);
    const std::size_t r = e.rank();
    ApproximationCertificate c;
    c.k = k;
    c.rank = r;
    double tail = 0.0, total = 0.0, next = 0.0;
    for (std::size_t m = 0; m < e.size(); ++m) {
        for (std::size_t j = 0; j < r; ++j) {
            total += e.lambda(m, j);
            if (j >= k) tail += e.lambda(m, j);
        }
        if (k < r) next += e.lambda(m, k);
    }
    const double h = e.grid().spacing();
    c.mse = h * tail;
    c.total_power = h * total;
    c.relative_error = c.total_power > 0.0 ? c.mse / c.total_power : 0.0;
    c.covariance_error_bound = h * next;

    if (bounds) {
        c.bound_status = BoundStatus::attached;
        const bool strict = bounds->delta > bounds->eps;
        for (std::size_t m = 0; m < e.size() && c.bound_status == BoundStatus::attached; ++m) {
            const double lk = e.lambda(m, k - 1);
            const double lk1 = k < r ? e.lambda(m, k) : 0.0;
            if (!strict || lk < bounds->delta || lk1 > bounds->eps) {
                c.bound_status = BoundStatus::violated;
                c.violating_node = m;
            }
        }
        if (c.bound_status == BoundStatus::attached) {
            const auto rk = static_cast<double>(r - k);
            c.eps_bound = kTwoPi * rk * bounds->eps;
            c.rel_eps_bound = rk * bounds->eps / (static_cast<double>(k) * bounds->delta);
        }
    }
    return c;
}

enum class Sidedness { two_sided, one_sided };
enum class SidedRequest { automatic, two, one };

inline std::string to_string(Sidedness s) { return s == Sidedness::one_sided ? "one" : "two"; }

inline SidedRequest parse_sided(std::string_view s) {
    if (s == "auto") return SidedRequest::automatic;
    if (s == "one") return SidedRequest::one;
    if (s == "two") return SidedRequest::two;
    throw BadParams("sided must be auto, one or two");
}

/// Truncated DPC filters: psi(j) for the analysis/synthesis pair and the direct filter w(m).
struct FilterBank {
    std::size_t dim = 0;
    std::size_t rank = 0;  // k
    Sidedness sided = Sidedness::two_sided;
    long j_min = 0;
    long j_max = 0;
    std::vector<ComplexMatrix> taps;  // psi(j_min) .. psi(j_max), d x k
    long m_min = 0;
    long m_max = 0;
    std::vector<ComplexMatrix> direct;  // w(m_min) .. w(m_max), d x d
    double tail_energy = 0.0;           // share of coefficient energy outside the stored window
    double rho_minus = 0.0;
    bool causal = false;                // w(m) for m < 0 dropped
    std::string gauge;

    const ComplexMatrix& psi(long j) const { return taps.at(static_cast<std::size_t>(j - j_min)); }
    const ComplexMatrix& w(long m) const { return direct.at(static_cast<std::size_t>(m - m_min)); }
};

struct FilterOptions {
    std::size_t window = 0;  // J; 0 means N/8
    SidedRequest sided = SidedRequest::automatic;
    bool regular = false;  // classifier verdict was regular
    double one_sided_tol = 1e-6;
    double max_tail_energy = 0.01;
    bool causal = false;
};

namespace detail {

// w(m) = sum_j psi(j) psi(j - m)^* over the stored taps, via zero-padded FFTs.
inline std::vector<ComplexMatrix> direct_from_taps(const std::vector<ComplexMatrix>& taps, std::size_t d,
                                                   std::size_t k) {
    const std::size_t len = taps.size();
    const std::size_t p = std::bit_ceil(2 * len);
    std::vector<std::vector<cplx>> spec(d * k);
    std::vector<cplx> seq(p);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t c = 0; c < k; ++c) {
            std::fill(seq.begin(), seq.end(), cplx{});
            for (std::size_t n = 0; n < len; ++n) seq[n] = taps[n](i, c);
            spec[i * k + c] = fft::dft(seq, fft::Direction::forward);
        }
    const std::size_t out_len = 2 * len - 1;
    std::vector<ComplexMatrix> w(out_len, ComplexMatrix(d, d));
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            for (std::size_t v = 0; v < p; ++v) {
                cplx s{};
                for (std::size_t c = 0; c < k; ++c) s += spec[a * k + c][v] * std::conj(spec[b * k + c][v]);
                seq[v] = s;
            }
            const auto corr = fft::dft(seq, fft::Direction::backward);
            const auto shift = static_cast<long>(len) - 1;
            for (long m = -shift; m <= shift; ++m) {
                const auto idx = static_cast<std::size_t>((m + static_cast<long>(p)) % static_cast<long>(p));
                w[static_cast<std::size_t>(m + shift)](a, b) = corr[idx] / static_cast<double>(p);
            }
        }
    return w;
}

}  // namespace detail

/// Builds the rank-k DPC filter bank from an aligned field.
inline FilterBank build_filter_bank(const EigenField& e, std::size_t k, const FilterOptions& opt = {}) {
    detail::check_rank(e, k);
    const std::size_t n = e.size();
    const std::size_t window = opt.window == 0 ? n / 8 : opt.window;
    if (window > n / 2) throw BadParams("filter window must be at most N/2");
    const FourierSeries series = fourier_of_columns(e, k);

    FilterBank bank;
    bank.dim = e.dim();
    bank.rank = k;
    bank.rho_minus = series.rho_minus();
    bank.gauge = series.gauge();
    bank.causal = opt.causal;
    switch (opt.sided) {
        case SidedRequest::one: bank.sided = Sidedness::one_sided; break;
        case SidedRequest::two: bank.sided = Sidedness::two_sided; break;
        case SidedRequest::automatic:
            bank.sided = opt.regular && series.rho_minus() <= opt.one_sided_tol ? Sidedness::one_sided
                                                                                : Sidedness::two_sided;
            break;
    }
    const auto jw = static_cast<long>(std::min(window, n / 2 - 1));
    bank.j_min = bank.sided == Sidedness::one_sided ? 0 : std::max(-jw, series.j_min());
    bank.j_max = jw;
    double kept = 0.0;
    for (long j = bank.j_min; j <= bank.j_max; ++j) {
        bank.taps.push_back(series[j]);
        kept += series.energy(j);
    }
    const double total = series.total_energy();
    bank.tail_energy = total > 0.0 ? std::max(0.0, (total - kept) / total) : 0.0;
    if (bank.tail_energy > opt.max_tail_energy) throw ExcessTailEnergy(bank.tail_energy);

    bank.direct = detail::direct_from_taps(bank.taps, bank.dim, k);
    const long span = bank.j_max - bank.j_min;
    bank.m_min = -span;
    bank.m_max = span;
    if (opt.causal) {
        bank.direct.erase(bank.direct.begin(), bank.direct.begin() + span);
        bank.m_min = 0;
    }
    return bank;
}

}  // namespace specdpc
