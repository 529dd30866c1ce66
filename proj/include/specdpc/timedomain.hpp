#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specdpc/eigen_field.hpp"
#include "specdpc/hermitian.hpp"
#include "specdpc/lowrank.hpp"
#include "specdpc/parallel.hpp"
#include "specdpc/spectral_model.hpp"

namespace specdpc {

/// Stateless counter-based generator: every draw is a hash of (seed, stream, lane, counter).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane = 0)
        : key_(mix(mix(mix(seed) ^ stream) ^ (lane * 0xD1B54A32D192ED03ULL))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter)); }

    /// Uniform on (0, 1].
    double uniform(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Circular complex Gaussian with E|z|^2 = 1 (real and imaginary parts N(0, 1/2)).
    cplx complex_normal(std::uint64_t index) const {
        const double u1 = uniform(2 * index);
        const double u2 = uniform(2 * index + 1);
        return std::polar(std::sqrt(-std::log(u1)), kTwoPi * u2);
    }

private:
    std::uint64_t key_;
};

/// d-dimensional path X_0 .. X_{T-1}, stored row by row.
struct SamplePath {
    std::size_t dim = 0;
    std::size_t length = 0;
    std::vector<cplx> values;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t burn_in = 0;
    std::string generator;

    SamplePath() = default;
    SamplePath(std::size_t d, std::size_t t) : dim(d), length(t), values(d * t) {}

    cplx& at(std::size_t t, std::size_t i) { return values[t * dim + i]; }
    const cplx& at(std::size_t t, std::size_t i) const { return values[t * dim + i]; }
};

struct SimulationOptions {
    std::size_t window = 0;  // largest |lag| of the moving-average taps; 0 means N/8
    bool allow_two_sided = true;
    bool real_valued = false;
    double one_sided_tol = 1e-6;
    double rank_tol = 1e-10;
    double tap_trim = 1e-13;
    std::uint64_t stream = 0;
};

/// X_t = sum_l b(l) xi_{t-l}, l = l_min .. l_min + taps.size() - 1.
struct MovingAverage {
    long l_min = 0;
    std::vector<ComplexMatrix> taps;
    std::string route;

    long l_max() const { return l_min + static_cast<long>(taps.size()) - 1; }
};

namespace detail {

inline void trim_taps(MovingAverage& ma, double rel) {
    double mx = 0.0;
    for (const auto& b : ma.taps) mx = std::max(mx, frobenius_norm(b));
    const double cut = rel * mx;
    std::size_t lo = 0, hi = ma.taps.size();
    while (lo < hi && frobenius_norm(ma.taps[lo]) <= cut) ++lo;
    while (hi > lo && frobenius_norm(ma.taps[hi - 1]) <= cut) --hi;
    ma.taps = std::vector<ComplexMatrix>(ma.taps.begin() + static_cast<std::ptrdiff_t>(lo),
                                         ma.taps.begin() + static_cast<std::ptrdiff_t>(hi));
    ma.l_min += static_cast<long>(lo);
}

// phi = V sqrt(2 pi Lambda) node by node; its Fourier coefficients are two-sided in general.
inline MovingAverage two_sided_taps(const SpectralMeasure& s, long window) {
    const std::size_t n = s.grid().size(), d = s.dim();
    std::vector<ComplexMatrix> phi(n);
    detail::parallel_for(n, [&](std::size_t m) {
        HermitianEigen e = eig_hermitian(s.density(m));
        ComplexMatrix p = e.vectors;
        for (std::size_t c = 0; c < d; ++c) {
            const double root = std::sqrt(kTwoPi * std::max(e.values[c], 0.0));
            for (std::size_t i = 0; i < d; ++i) p(i, c) *= root;
        }
        phi[m] = std::move(p);
    });
    std::vector<ComplexMatrix> coeffs(n, ComplexMatrix(d, d));
    std::vector<cplx> seq(n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t m = 0; m < n; ++m) seq[m] = phi[m](i, c);
            const auto b = grid_fourier(seq);
            for (std::size_t k = 0; k < n; ++k) coeffs[k](i, c) = b[k];
        }
    MovingAverage ma;
    ma.route = "two-sided-ma";
    ma.l_min = -window;
    const long half = static_cast<long>(n / 2);
    for (long l = -window; l <= window; ++l) ma.taps.push_back(coeffs[static_cast<std::size_t>(l + half)]);
    return ma;
}

}  // namespace detail

/// Moving-average representation used to simulate the absolutely continuous part.
/// Prefers the causal factor U D (continuity gauge, cepstral outer factors); falls back to
/// the two-sided square root when the rank varies, a log-integral diverges or the aligned
/// field is not one-sided.
inline MovingAverage moving_average_taps(const SpectralMeasure& s, const SimulationOptions& opt = {}) {
    const std::size_t n = s.grid().size();
    const auto window = static_cast<long>(std::min(opt.window == 0 ? n / 8 : opt.window, n / 2 - 1));
    std::string why;
    try {
        const EigenField field = align_gauge(decompose(s, opt.rank_tol), GaugeStrategy::continuity);
        if (field.rank() == 0) return {0, {}, "zero"};
        if (fourier_of_field(field).rho_minus() <= opt.one_sided_tol) {
            std::vector<ScalarOuterFactor> factors;
            for (std::size_t j = 0; j < field.rank(); ++j) factors.push_back(scalar_outer_factor(field.channel(j)));
            auto factor = compose_spectral_factor(field, factors, static_cast<std::size_t>(window));
            MovingAverage ma{0, std::move(factor.coefficients), "causal-ma"};
            detail::trim_taps(ma, opt.tap_trim);
            return ma;
        }
        why = "eigenvector field is not one-sided";
    } catch (const RankNotConstant&) {
        why = "rank is not constant";
    } catch (const LogDivergence& e) {
        why = e.what();
    } catch (const ChannelCollapse& e) {
        why = e.what();
    }
    if (!opt.allow_two_sided) throw UnsimulableModel("no causal factor: " + why);
    MovingAverage ma = detail::two_sided_taps(s, window);
    detail::trim_taps(ma, opt.tap_trim);
    return ma;
}

/// Sample path of length T. Atoms become random amplitudes A_j with E A_j A_j^* = mass.
inline SamplePath simulate(const SpectralMeasure& s, std::size_t length, std::uint64_t seed,
                           const SimulationOptions& opt = {}) {
    const std::size_t d = s.dim();
    SamplePath path(d, length);
    path.seed = seed;
    path.stream = opt.stream;
    std::vector<std::string> parts;

    if (opt.real_valued) {
        const std::size_t n = s.grid().size();
        for (std::size_t m = 0; m < n; ++m) {
            const ComplexMatrix& a = s.density(m);
            const ComplexMatrix& b = s.density((n - m) % n);
            double diff = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) diff += std::norm(a(i, j) - std::conj(b(i, j)));
            if (std::sqrt(diff) > 1e-10 * (1.0 + frobenius_norm(a))) {
                throw BadParams("real-valued simulation needs f(-w) = conj f(w)");
            }
        }
    }

    const bool has_density = std::any_of(s.densities().begin(), s.densities().end(),
                                         [](const ComplexMatrix& f) { return frobenius_norm(f) > 0.0; });
    if (has_density) {
        const MovingAverage ma = moving_average_taps(s.density_part(), opt);
        parts.push_back(ma.route);
        if (!ma.taps.empty()) {
            const std::size_t width = ma.taps.front().cols();
            const long lmax = ma.l_max();
            path.burn_in = static_cast<std::size_t>(std::max(0L, lmax));
            const CounterRng rng(seed, opt.stream, 0);
            // xi_u for u = -lmax .. T-1-l_min, counter shifted to start at zero
            const long u0 = -lmax;
            const long u1 = static_cast<long>(length) - 1 - ma.l_min;
            std::vector<cplx> xi(static_cast<std::size_t>(u1 - u0 + 1) * width);
            for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = rng.complex_normal(k);
            detail::parallel_for(length, [&](std::size_t t) {
                for (std::size_t l = 0; l < ma.taps.size(); ++l) {
                    const long u = static_cast<long>(t) - (ma.l_min + static_cast<long>(l));
                    const cplx* z = &xi[static_cast<std::size_t>(u - u0) * width];
                    const ComplexMatrix& b = ma.taps[l];
                    for (std::size_t i = 0; i < d; ++i) {
                        cplx acc{};
                        for (std::size_t c = 0; c < width; ++c) acc += b(i, c) * z[c];
                        path.at(t, i) += acc;
                    }
                }
            }, 1024);
        }
    }

    for (std::size_t a = 0; a < s.atoms().size(); ++a) {
        const Atom& atom = s.atoms()[a];
        HermitianEigen e = eig_hermitian(atom.mass);
        for (double& v : e.values) v = std::max(v, 0.0);
        const CounterRng rng(seed, opt.stream, 1 + a);
        std::vector<cplx> amp(d);
        for (std::size_t c = 0; c < d; ++c) {
            const cplx z = rng.complex_normal(c) * std::sqrt(e.values[c]);
            for (std::size_t i = 0; i < d; ++i) amp[i] += e.vectors(i, c) * z;
        }
        for (std::size_t t = 0; t < length; ++t) {
            const cplx rot = std::polar(1.0, static_cast<double>(t) * atom.omega);
            for (std::size_t i = 0; i < d; ++i) path.at(t, i) += amp[i] * rot;
        }
    }
    if (!s.atoms().empty()) parts.push_back("harmonic");

    if (opt.real_valued) {
        for (auto& v : path.values) v = std::sqrt(2.0) * v.real();
        parts.push_back("real-part");
    }
    path.generator = "counter-splitmix64/box-muller";
    for (const auto& p : parts) path.generator += ";" + p;
    return path;
}

/// y_t = sum_m h(m) x_{t-m}, m = m_min .. m_min + taps.size() - 1.
struct LagFilter {
    long m_min = 0;
    std::vector<ComplexMatrix> taps;

    long m_max() const { return m_min + static_cast<long>(taps.size()) - 1; }
};

/// X^(k)_t = sum_m w(m) X_{t-m}.
inline LagFilter direct_filter(const FilterBank& bank) { return {bank.m_min, bank.direct}; }

/// V_t = sum_j psi(j)^* X_{t+j}, i.e. h(m) = psi(-m)^*.
inline LagFilter analysis_filter(const FilterBank& bank) {
    LagFilter f;
    f.m_min = -bank.j_max;
    for (long m = f.m_min; m <= -bank.j_min; ++m) f.taps.push_back(bank.psi(-m).adjoint());
    return f;
}

/// X^(k)_t = sum_j psi(j) V_{t-j}.
inline LagFilter synthesis_filter(const FilterBank& bank) { return {bank.j_min, bank.taps}; }

enum class EdgePolicy { truncate, zero_pad };

struct FilteredPath {
    SamplePath path;
    long time_offset = 0;  // output row q holds time t = q + time_offset
    std::size_t valid_begin = 0;  // output rows [valid_begin, valid_end) use no padded input
    std::size_t valid_end = 0;
};

/// Exact finite convolution. Taps below 1e-13 of the largest tap norm are skipped.
inline FilteredPath apply_filter(const LagFilter& filter, const SamplePath& x,
                                 EdgePolicy edge = EdgePolicy::truncate) {
    if (filter.taps.empty()) throw BadParams("empty filter");
    const std::size_t p = filter.taps.front().rows(), d = filter.taps.front().cols();
    if (d != x.dim) throw DimensionMismatch("filter input dimension differs from the path");
    const auto tl = static_cast<long>(x.length);
    const long lo = std::max(0L, filter.m_max());
    const long hi = std::min(tl, tl + filter.m_min);
    if (hi <= lo) throw PathTooShort("path of length " + std::to_string(x.length) + " is shorter than the filter");

    double mx = 0.0;
    for (const auto& h : filter.taps) mx = std::max(mx, frobenius_norm(h));
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < filter.taps.size(); ++k)
        if (frobenius_norm(filter.taps[k]) > 1e-13 * mx) active.push_back(k);

    FilteredPath out;
    const long first = edge == EdgePolicy::truncate ? lo : 0;
    const long count = edge == EdgePolicy::truncate ? hi - lo : tl;
    out.time_offset = first;
    out.valid_begin = static_cast<std::size_t>(lo - first);
    out.valid_end = static_cast<std::size_t>(hi - first);
    out.path = SamplePath(p, static_cast<std::size_t>(count));
    out.path.seed = x.seed;
    out.path.stream = x.stream;
    out.path.generator = x.generator;
    detail::parallel_for(static_cast<std::size_t>(count), [&](std::size_t q) {
        const long t = static_cast<long>(q) + first;
        for (std::size_t k : active) {
            const long src = t - (filter.m_min + static_cast<long>(k));
            if (src < 0 || src >= tl) continue;
            const ComplexMatrix& h = filter.taps[k];
            for (std::size_t i = 0; i < p; ++i) {
                cplx acc{};
                for (std::size_t j = 0; j < d; ++j) acc += h(i, j) * x.at(static_cast<std::size_t>(src), j);
                out.path.at(q, i) += acc;
            }
        }
    }, 1024);
    return out;
}

/// Biased sample covariance C(h) = (1/T) sum_t X_{t+h} X_t^*, h = 0..H.
inline CovarianceSequence sample_covariance(const SamplePath& x, std::size_t max_lag) {
    if (max_lag >= x.length) throw PathTooShort("lag window exceeds the path length");
    const std::size_t d = x.dim;
    std::vector<ComplexMatrix> lags(max_lag + 1, ComplexMatrix(d, d));
    detail::parallel_for(max_lag + 1, [&](std::size_t h) {
        ComplexMatrix& c = lags[h];
        for (std::size_t t = 0; t + h < x.length; ++t)
            for (std::size_t i = 0; i < d; ++i) {
                const cplx a = x.at(t + h, i);
                for (std::size_t j = 0; j < d; ++j) c(i, j) += a * std::conj(x.at(t, j));
            }
        c *= cplx{1.0 / static_cast<double>(x.length)};
    }, 1);
    return CovarianceSequence(d, std::move(lags));
}

/// Forward prediction-error covariances from a finite past.
struct PredictionResult {
    std::vector<ComplexMatrix> sigma;  // Sigma_0 = C(0), Sigma_1, ...
    std::vector<double> det;           // det Sigma_n
    bool stopped_early = false;        // a singular block ended the recursion

    std::size_t past_length() const { return sigma.empty() ? 0 : sigma.size() - 1; }
};

/// Multichannel Levinson (Whittle) recursion on C(0..n_max).
inline PredictionResult levinson_prediction(const CovarianceSequence& c, std::size_t n_max,
                                            double singular_tol = 1e-12) {
    if (n_max > c.max_lag()) throw BadParams("covariance window shorter than the requested past");
    const std::size_t d = c.dim();
    auto is_singular = [&](const ComplexMatrix& s) {
        const double scale = std::abs(s.trace());
        if (scale == 0.0) return true;
        HermitianEigen e = eig_hermitian(0.5 * (s + s.adjoint()));
        return e.values.back() <= singular_tol * scale;
    };

    PredictionResult out;
    ComplexMatrix sf = c.at(0), sb = c.at(0);
    out.sigma.push_back(sf);
    out.det.push_back(determinant(sf).real());
    std::vector<ComplexMatrix> a, b;  // A_{n,1..n}, B_{n,1..n}
    for (std::size_t n = 0; n < n_max; ++n) {
        if (is_singular(sf) || is_singular(sb)) {
            out.stopped_early = true;
            break;
        }
        ComplexMatrix delta = c.at(static_cast<long>(n + 1));
        for (std::size_t i = 1; i <= n; ++i) delta -= a[i - 1] * c.at(static_cast<long>(n + 1 - i));
        const ComplexMatrix akk = delta * inverse(sb);
        const ComplexMatrix bkk = delta.adjoint() * inverse(sf);
        std::vector<ComplexMatrix> a2(n + 1, ComplexMatrix(d, d)), b2(n + 1, ComplexMatrix(d, d));
        for (std::size_t i = 1; i <= n; ++i) {
            a2[i - 1] = a[i - 1] - akk * b[n - i];
            b2[i - 1] = b[i - 1] - bkk * a[n - i];
        }
        a2[n] = akk;
        b2[n] = bkk;
        sf = sf - akk * delta.adjoint();
        sb = sb - bkk * delta;
        sf = 0.5 * (sf + sf.adjoint());
        sb = 0.5 * (sb + sb.adjoint());
        a = std::move(a2);
        b = std::move(b2);
        out.sigma.push_back(sf);
        out.det.push_back(determinant(sf).real());
    }
    return out;
}

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> per_rep;
};

/// Average of |X_t - X^(k)_t|^2 over the valid region, rep by rep; reps run in parallel
/// on independent streams and are reduced in rep order.
inline MonteCarloEstimate monte_carlo_mse(const SpectralMeasure& s, const FilterBank& bank, std::size_t length,
                                          std::size_t reps, std::uint64_t seed, SimulationOptions sim = {}) {
    if (reps == 0) throw BadParams("need at least one Monte Carlo repetition");
    const LagFilter w = direct_filter(bank);
    MonteCarloEstimate out;
    out.per_rep.assign(reps, 0.0);
    detail::parallel_for(reps, [&](std::size_t rep) {
        SimulationOptions o = sim;
        o.stream = sim.stream + rep;
        const SamplePath x = simulate(s, length, seed, o);
        const FilteredPath y = apply_filter(w, x, EdgePolicy::truncate);
        double acc = 0.0;
        for (std::size_t q = y.valid_begin; q < y.valid_end; ++q) {
            const auto t = static_cast<std::size_t>(static_cast<long>(q) + y.time_offset);
            for (std::size_t i = 0; i < x.dim; ++i) acc += std::norm(x.at(t, i) - y.path.at(q, i));
        }
        out.per_rep[rep] = acc / static_cast<double>(y.valid_end - y.valid_begin);
    }, 1);
    double sum = 0.0;
    for (double v : out.per_rep) sum += v;
    out.mean = sum / static_cast<double>(reps);
    if (reps > 1) {
        double ss = 0.0;
        for (double v : out.per_rep) ss += (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
    }
    return out;
}

}  // namespace specdpc
