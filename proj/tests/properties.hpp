#pragma once

// Property checks over generated inputs. Each returns a Check so the gtest suites and the
// acceptance runner can share them.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "specdpc/corpus.hpp"
#include "specdpc/specdpc.hpp"
#include "support.hpp"

namespace properties {

using namespace specdpc;
using testing_support::Gen;

struct Check {
    bool ok = true;
    std::string detail;
    std::size_t cases = 0;

    void fail(const std::string& what) {
        if (ok) detail = what;
        ok = false;
    }
    void expect(bool cond, const std::string& what) {
        if (!cond) fail(what);
    }
};

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

// hermitian-core

inline Check eig_reconstruction(std::uint64_t seed, std::size_t trials = 300) {
    Check c;
    Gen g(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(1, 12);
        const double scale = std::pow(10.0, g.uniform(-3.0, 3.0));
        const ComplexMatrix a = g.hermitian(d) * cplx{scale};
        const HermitianEigen e = eig_hermitian(a);
        const double rec = frobenius_norm(reconstruct(e) - a) / frobenius_norm(a);
        const double orth = frobenius_norm(e.vectors.adjoint() * e.vectors - ComplexMatrix::identity(d));
        worst = std::max(worst, rec);
        c.expect(rec <= 1e-10, "reconstruction " + fmt(rec) + " at d=" + std::to_string(d));
        c.expect(orth <= 1e-12, "orthonormality " + fmt(orth) + " at d=" + std::to_string(d));
        c.expect(std::is_sorted(e.values.rbegin(), e.values.rend()), "eigenvalues not descending");
        const auto oracle = testing_support::eigen_oracle(a);
        const double s2 = spectral_norm(a), fro = frobenius_norm(a);
        for (std::size_t i = 0; i < d; ++i)
            c.expect(std::abs(oracle[i] - e.values[i]) <= 1e-10 * s2, "eigenvalue differs from Eigen oracle");
        c.expect(s2 <= fro * (1 + 1e-12) && fro <= std::sqrt(static_cast<double>(d)) * s2 * (1 + 1e-12),
                 "norm sandwich violated");
    }
    if (c.ok) c.detail = "worst relative reconstruction " + fmt(worst);
    return c;
}

inline Check psd_eigenvalues(std::uint64_t seed, std::size_t trials = 200) {
    Check c;
    Gen g(seed);
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(1, 10);
        const std::size_t r = g.integer(0, d);
        const ComplexMatrix a = r == 0 ? ComplexMatrix(d, d) : g.psd(d, r);
        HermitianEigen e = eig_hermitian(a);
        const double s2 = spectral_norm(a);
        c.expect(e.values.back() >= -1e-12 * s2 - 1e-300, "eigenvalue " + fmt(e.values.back()) + " of a PSD matrix");
        clamp_nonnegative(e);
        c.expect(e.values.back() >= 0.0, "clamp left a negative eigenvalue");
    }
    return c;
}

// spectral-model

inline Check density_roundtrip(std::uint64_t seed, std::size_t trials = 40) {
    Check c;
    Gen g(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(1, 4), q = g.integer(1, d), deg = g.integer(0, 4);
        const std::size_t n = 64;
        const auto model = testing_support::smooth_model(g, d, q, deg);
        const SpectralMeasure s = model.measure(n);
        const CovarianceSequence cov = covariance_from_measure(s, n / 2 - 1);
        const SpectralMeasure back = measure_from_covariance(cov, s.grid(), Taper::rectangular);
        for (std::size_t m = 0; m < n; ++m) {
            const double err = frobenius_norm(back.density(m) - s.density(m)) / frobenius_norm(s.density(m));
            worst = std::max(worst, err);
        }
        // trace identity against the exact covariance, with random atoms added
        std::vector<Atom> atoms;
        double atom_trace = 0.0;
        for (std::size_t j = 0, na = g.integer(0, 2); j < na; ++j) {
            atoms.push_back({g.uniform(-3.0, kPi), g.psd(d, 1)});
            atom_trace += atoms.back().mass.trace().real();
        }
        const SpectralMeasure with_atoms(d, s.grid(), s.densities(), atoms);
        const CovarianceSequence c2 = covariance_from_measure(with_atoms, 8);
        const double exact = model.covariance(0).trace().real() + atom_trace;
        const double tr = c2.at(0).trace().real();
        c.expect(std::abs(tr - exact) <= 1e-10 * exact, "tr C(0) " + fmt(tr) + " vs " + fmt(exact));
        for (long h = -8; h <= 8; ++h)
            c.expect(c2.at(-h) == c2.at(h).adjoint(), "C(-h) differs from C(h)^* at h=" + std::to_string(h));
    }
    c.expect(worst <= 1e-6, "round trip error " + fmt(worst));
    if (c.ok) c.detail = "worst round trip error " + fmt(worst);
    return c;
}

// eigen-field

inline Check field_reconstruction(std::uint64_t seed, std::size_t trials = 20) {
    Check c;
    Gen g(seed);
    const GaugeStrategy gauges[] = {GaugeStrategy::anchor_real, GaugeStrategy::continuity, GaugeStrategy::winding};
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(2, 4), q = g.integer(1, d);
        const auto model = testing_support::smooth_model(g, d, q, g.integer(1, 3));
        const SpectralMeasure s = model.measure(256);
        const EigenField raw = decompose(s);
        c.expect(raw.rank() == q, "rank " + std::to_string(raw.rank()) + " expected " + std::to_string(q));
        if (raw.rank() != q) continue;
        const auto proj0 = projector(raw, q);
        for (GaugeStrategy gs : gauges) {
            const EigenField e = align_gauge(raw, gs);
            for (std::size_t m = 0; m < e.size(); ++m) {
                const ComplexMatrix& f = s.density(m);
                const double err = frobenius_norm(e.density(m) - f);
                worst = std::max(worst, err / (1.0 + frobenius_norm(f)));
                c.expect(err <= 1e-8 * (1.0 + frobenius_norm(f)), "reconstruction under " + to_string(gs));
                for (std::size_t j = 0; j < q; ++j)
                    c.expect(std::abs(e.lambda(m, j) - raw.lambda(m, j)) <= 1e-10, "lambda changed by gauge");
            }
            const auto proj = projector(e, q);
            for (std::size_t m = 0; m < e.size(); ++m)
                c.expect(frobenius_norm(proj[m] - proj0[m]) <= 1e-10, "projector changed by " + to_string(gs));
        }
    }
    if (c.ok) c.detail = "worst relative reconstruction " + fmt(worst);
    return c;
}

inline Check parseval(std::uint64_t seed, std::size_t trials = 20) {
    Check c;
    Gen g(seed);
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(2, 4), q = g.integer(1, d);
        const auto model = testing_support::smooth_model(g, d, q, 2, 0.4);
        EigenField e = align_gauge(decompose(model.measure(128)), GaugeStrategy::raw);
        // random per-node phases make the coefficients spread over all lags
        std::vector<ComplexMatrix> v = e.all_vectors();
        for (auto& u : v)
            for (std::size_t j = 0; j < q; ++j) detail::rotate_column(u, j, g.unit());
        e = e.with_vectors(v, GaugeStrategy::raw);
        for (std::size_t k = 1; k <= q; ++k) {
            const FourierSeries f = fourier_of_columns(e, k);
            double grid_energy = 0.0;
            for (std::size_t m = 0; m < e.size(); ++m) {
                const double x = frobenius_norm(e.vectors(m).leading_columns(k));
                grid_energy += x * x;
            }
            grid_energy /= static_cast<double>(e.size());
            const double err = std::abs(f.total_energy() - grid_energy) / grid_energy;
            c.expect(err <= 1e-8, "Parseval mismatch " + fmt(err));
            c.expect(std::abs(grid_energy - static_cast<double>(k)) <= 1e-10, "unit columns should carry energy k");
        }
    }
    return c;
}

inline Check outer_factor(std::uint64_t seed, std::size_t trials = 30) {
    Check c;
    Gen g(seed);
    double worst = 0.0, worst_tail = 0.0;
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t n = 512;
        std::vector<cplx> a{1.0};
        double budget = 0.85;
        for (std::size_t k = 1, deg = g.integer(1, 4); k <= deg; ++k) {
            const double r = g.uniform(0.0, budget);
            budget -= r;
            a.push_back(std::polar(r, g.uniform(-kPi, kPi)));
        }
        const double scale = std::pow(10.0, g.uniform(-2.0, 2.0));
        std::vector<double> lambda(n);
        const FrequencyGrid grid(n);
        for (std::size_t m = 0; m < n; ++m) {
            cplx p{};
            for (std::size_t k = 0; k < a.size(); ++k) p += a[k] * std::polar(1.0, -static_cast<double>(k) * grid.node(m));
            lambda[m] = scale * std::norm(p) / kTwoPi;
        }
        const ScalarOuterFactor f = scalar_outer_factor(lambda);
        for (std::size_t m = 0; m < n; ++m) {
            const double err = std::abs(std::norm(f.boundary[m]) - kTwoPi * lambda[m]) / (kTwoPi * lambda[m]);
            worst = std::max(worst, err);
        }
        double total = 0.0, tail = 0.0;
        for (std::size_t j = 0; j < f.coefficients.size(); ++j) {
            total += std::norm(f.coefficients[j]);
            if (j >= n / 4) tail += std::norm(f.coefficients[j]);
        }
        worst_tail = std::max(worst_tail, tail / total);
    }
    c.expect(worst <= 1e-6, "|D|^2 vs 2 pi lambda " + fmt(worst));
    c.expect(worst_tail < 1e-6, "coefficient tail share " + fmt(worst_tail));
    if (c.ok) c.detail = "worst |D|^2 error " + fmt(worst) + ", tail share " + fmt(worst_tail);
    return c;
}

// lowrank-dpc

inline Check projector_idempotent(std::uint64_t seed, std::size_t trials = 20) {
    Check c;
    Gen g(seed);
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(2, 5), q = g.integer(1, d);
        const auto model = testing_support::smooth_model(g, d, q, 2);
        const EigenField e = decompose(model.measure(128));
        for (std::size_t k = 1; k <= e.rank(); ++k)
            for (const auto& p : projector(e, k)) {
                c.expect(frobenius_norm(p * p - p) <= 1e-10, "T^2 != T");
                c.expect(hermitian_defect(p) <= 1e-12, "T not self-adjoint");
                c.expect(std::abs(p.trace() - cplx(static_cast<double>(k))) <= 1e-10, "tr T != k");
            }
    }
    return c;
}

inline Check pythagoras_and_monotone(std::uint64_t seed, std::size_t trials = 20) {
    Check c;
    Gen g(seed);
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(2, 5), q = g.integer(1, d);
        const auto model = testing_support::smooth_model(g, d, q, 2);
        const SpectralMeasure s = model.measure(128);
        const EigenField e = decompose(s);
        const double tr0 = covariance_from_measure(s, 0).at(0).trace().real();
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= e.rank(); ++k) {
            const auto cert = certificate(e, k);
            const double trk = approx_covariance(e, k, 0).at(0).trace().real();
            c.expect(std::abs(tr0 - trk - cert.mse) <= 1e-8 * tr0, "tr C(0) != tr C_k(0) + mse at k=" + std::to_string(k));
            c.expect(cert.mse <= prev, "mse increased with k");
            prev = cert.mse;
            if (k == e.rank()) c.expect(cert.relative_error == 0.0, "relative error at k = r is not zero");
        }
    }
    return c;
}

struct NamedField {
    std::string name;
    SpectralMeasure measure;
    EigenField field;
};

inline std::vector<NamedField> corpus_fields(std::size_t n) {
    std::vector<NamedField> out;
    for (const std::string id : {"type1", "type2", "regular", "type3_illustration", "type3_candidate", "scalar_ma1",
                                 "scalar_white"}) {
        const auto ex = corpus::example(id, {}, n);
        const std::size_t r = ex.measure.dim() == 1 ? 1 : 2;
        out.push_back({id, ex.measure, decompose_rank(ex.measure, r)});
    }
    return out;
}

inline Check corollary2(std::uint64_t seed, std::size_t random_models = 6) {
    Check c;
    Gen g(seed);
    auto fields = corpus_fields(1024);
    for (std::size_t t = 0; t < random_models; ++t) {
        const auto model = testing_support::smooth_model(g, 3, g.integer(2, 3), 2, 0.3);
        const SpectralMeasure s = model.measure(1024);
        fields.push_back({"random" + std::to_string(t), s, decompose(s)});
    }
    double margin = std::numeric_limits<double>::infinity();
    const std::size_t lags = 64;
    for (const auto& nf : fields) {
        const CovarianceSequence cov = covariance_from_measure(nf.measure, lags);
        for (std::size_t k = 1; k <= nf.field.rank(); ++k, ++c.cases) {
            const CovarianceSequence ck = approx_covariance(nf.field, k, lags);
            const double bound = certificate(nf.field, k).covariance_error_bound;
            double worst = 0.0;
            for (long h = -static_cast<long>(lags); h <= static_cast<long>(lags); ++h)
                worst = std::max(worst, spectral_norm(cov.at(h) - ck.at(h)));
            margin = std::min(margin, bound + 1e-6 - worst);
            c.expect(worst <= bound + 1e-6, nf.name + " k=" + std::to_string(k) + ": " + fmt(worst) + " > " + fmt(bound));
        }
    }
    if (c.ok) c.detail = "smallest margin " + fmt(margin);
    return c;
}

inline SamplePath white_path(Gen& g, std::size_t d, std::size_t length) {
    SamplePath x(d, length);
    for (auto& v : x.values) v = g.cnormal();
    return x;
}

// Analysis then synthesis against the direct filter on the same stored taps.
inline Check filter_consistency(std::uint64_t seed) {
    Check c;
    Gen g(seed);
    struct Case {
        EigenField field;
        std::size_t k;
        std::size_t window;
    };
    std::vector<Case> cases;
    const auto reg = corpus::example("regular", {}, 512);
    cases.push_back({corpus::given_field(reg), 1, 16});
    cases.push_back({corpus::given_field(reg), 2, 16});
    const auto ill = corpus::example("type3_illustration", {}, 512);
    cases.push_back({corpus::given_field(ill), 2, 64});
    for (int t = 0; t < 3; ++t) {
        const auto model = testing_support::smooth_model(g, 3, 2, 1, 0.3);
        cases.push_back({align_gauge(decompose(model.measure(256)), GaugeStrategy::continuity), static_cast<std::size_t>(1 + t % 2), 32});
    }
    double worst = 0.0;
    for (const auto& cs : cases) {
        ++c.cases;
        FilterOptions fo;
        fo.window = cs.window;
        fo.sided = SidedRequest::two;
        fo.max_tail_energy = 1.0;
        const FilterBank bank = build_filter_bank(cs.field, cs.k, fo);
        const SamplePath x = white_path(g, cs.field.dim(), 600);
        const FilteredPath v = apply_filter(analysis_filter(bank), x);
        const FilteredPath y = apply_filter(synthesis_filter(bank), v.path);
        const FilteredPath z = apply_filter(direct_filter(bank), x);
        double scale = 0.0, diff = 0.0;
        for (std::size_t q = 0; q < y.path.length; ++q) {
            const long t = static_cast<long>(q) + y.time_offset + v.time_offset;
            const long qz = t - z.time_offset;
            if (qz < 0 || qz >= static_cast<long>(z.path.length)) continue;
            for (std::size_t i = 0; i < x.dim; ++i) {
                const cplx a = y.path.at(q, i), b = z.path.at(static_cast<std::size_t>(qz), i);
                scale = std::max(scale, std::abs(b));
                diff = std::max(diff, std::abs(a - b));
            }
        }
        const double rel = diff / scale;
        worst = std::max(worst, rel);
        c.expect(rel <= 1e-9 + bank.tail_energy, "composition differs from direct filter by " + fmt(rel));
    }
    if (c.ok) c.detail = "worst relative mismatch " + fmt(worst);
    return c;
}

inline Check optimality(const SpectralMeasure& s, const EigenField& e, std::size_t k, std::uint64_t seed,
                        std::size_t trials = 200) {
    Check c;
    Gen g(seed);
    const double best = certificate(e, k).mse;
    const double via_form = testing_support::projector_mse(s, projector(e, k));
    c.expect(std::abs(best - via_form) <= 1e-10 * (1.0 + best), "certificate disagrees with the quadratic form");
    const std::size_t d = s.dim(), n = s.grid().size();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const bool perturb = t % 2 == 1;
        const double eps = std::pow(10.0, g.uniform(-5.0, -0.3));
        std::vector<ComplexMatrix> proj(n);
        for (std::size_t m = 0; m < n; ++m) {
            ComplexMatrix basis(d, k);
            for (std::size_t j = 0; j < k; ++j) {
                auto v = g.unit_vector(d);
                for (std::size_t i = 0; i < d; ++i) {
                    basis(i, j) = perturb ? e.vectors(m)(i, j) + eps * v[i] : v[i];
                }
            }
            // orthonormalise the columns (Gram-Schmidt)
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t p = 0; p < j; ++p) {
                    cplx dot{};
                    for (std::size_t i = 0; i < d; ++i) dot += std::conj(basis(i, p)) * basis(i, j);
                    for (std::size_t i = 0; i < d; ++i) basis(i, j) -= dot * basis(i, p);
                }
                double nrm = 0.0;
                for (std::size_t i = 0; i < d; ++i) nrm += std::norm(basis(i, j));
                for (std::size_t i = 0; i < d; ++i) basis(i, j) /= std::sqrt(nrm);
            }
            proj[m] = mul_adjoint(basis, basis);
        }
        const double alt = testing_support::projector_mse(s, proj);
        gap = std::min(gap, alt - best);
        c.expect(best <= alt + 1e-12, "random projector beat the certificate: " + fmt(alt) + " < " + fmt(best));
    }
    if (c.ok) c.detail = "certificate mse " + fmt(best) + ", smallest gap " + fmt(gap);
    return c;
}

// timedomain

inline Check levinson_monotone(std::uint64_t seed, std::size_t trials = 10) {
    Check c;
    Gen g(seed);
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        SpectralMeasure s = corpus::example("scalar_white", {}, 8).measure;
        std::function<ComplexMatrix(long)> cov;
        if (t % 2 == 0) {
            const double theta = g.uniform(-0.9, 0.9);
            const auto ex = corpus::example("scalar_ma1", {{"theta", {theta}}}, 1024);
            s = ex.measure;
            cov = ex.covariance;
        } else {
            const auto model = testing_support::smooth_model(g, 2, 2, 2, 0.3);
            s = model.measure(1024);
            cov = [model](long h) { return model.covariance(h); };
        }
        const std::size_t n_max = 24;
        std::vector<ComplexMatrix> lags;
        for (std::size_t h = 0; h <= n_max; ++h) lags.push_back(cov(static_cast<long>(h)));
        const auto pred = levinson_prediction(CovarianceSequence(s.dim(), lags), n_max);
        const double ks = select_full_rank_subprocess(s, decompose(s)).det_sigma;
        for (std::size_t n = 0; n < pred.det.size(); ++n) {
            if (n > 0) c.expect(pred.det[n] <= pred.det[n - 1] * (1.0 + 1e-12), "det Sigma_n increased");
            c.expect(pred.det[n] >= ks - 1e-6 * std::max(1.0, ks), "det Sigma_n below the KS value");
        }
    }
    return c;
}

inline Check simulation_reproducible(std::uint64_t seed) {
    Check c;
    for (const std::string id : {"regular", "type0", "type1", "type3_candidate", "scalar_ma1"}) {
        const auto ex = corpus::example(id, {}, 512);
        for (bool real : {false, true}) {
            ++c.cases;
            SimulationOptions o;
            o.real_valued = real && id != "type0";
            const SamplePath a = simulate(ex.measure, 400, seed, o);
            const SamplePath b = simulate(ex.measure, 400, seed, o);
            c.expect(a.values == b.values, id + ": repeated simulation differs");
            const SamplePath other = simulate(ex.measure, 400, seed + 1, o);
            c.expect(other.values != a.values, id + ": seed has no effect");
        }
    }
    return c;
}

inline Check filter_linear(std::uint64_t seed, std::size_t trials = 20) {
    Check c;
    Gen g(seed);
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(1, 4), p = g.integer(1, 4);
        LagFilter f;
        f.m_min = -static_cast<long>(g.integer(0, 5));
        for (std::size_t k = 0, len = g.integer(1, 9); k < len; ++k) f.taps.push_back(g.matrix(p, d));
        const SamplePath x = white_path(g, d, 100), y = white_path(g, d, 100);
        const cplx a = g.cnormal(), b = g.cnormal();
        SamplePath z(d, 100);
        for (std::size_t i = 0; i < z.values.size(); ++i) z.values[i] = a * x.values[i] + b * y.values[i];
        for (EdgePolicy edge : {EdgePolicy::truncate, EdgePolicy::zero_pad}) {
            const auto fx = apply_filter(f, x, edge), fy = apply_filter(f, y, edge), fz = apply_filter(f, z, edge);
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < fz.path.values.size(); ++i) {
                const cplx lin = a * fx.path.values[i] + b * fy.path.values[i];
                diff = std::max(diff, std::abs(fz.path.values[i] - lin));
                scale = std::max(scale, std::abs(lin));
            }
            c.expect(diff <= 1e-12 * (1.0 + scale), "filter not linear: " + fmt(diff));
        }
    }
    return c;
}

// regularity

inline Check regularity_invariants(std::uint64_t seed, std::size_t trials = 6) {
    Check c;
    Gen g(seed);
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(2, 3);
        const auto model = testing_support::smooth_model(g, d, t % 2 == 0 ? d : d - 1, 2, 0.3);
        const SpectralMeasure s = model.measure(512);
        const auto a = classify(s), b = classify(s);
        c.expect(a.verdict == b.verdict && a.ks_lambda == b.ks_lambda && a.ks_subprocess == b.ks_subprocess,
                 "classify is not deterministic");
        if (a.rank == d) {
            c.expect(a.verdict == Verdict::full_rank_regular, "full-rank model not full_rank_regular");
            for (GaugeStrategy gs : {GaugeStrategy::raw, GaugeStrategy::anchor_real, GaugeStrategy::winding}) {
                ClassifyOptions o;
                o.gauges = {gs};
                c.expect(classify(s, o).verdict == a.verdict, "full-rank verdict depends on the gauge");
            }
        }
        const double scale = std::pow(10.0, g.uniform(-1.0, 1.0));
        const auto sc = classify(s.scaled(scale));
        c.expect(sc.verdict == a.verdict, "verdict changed under scaling");
        if (a.ks_lambda && sc.ks_lambda) {
            const double expect = *a.ks_lambda * std::pow(scale, static_cast<double>(a.rank));
            c.expect(std::abs(*sc.ks_lambda - expect) <= 1e-8 * expect, "ks_lambda does not scale as c^r");
        }
        if (a.ks_subprocess && sc.ks_subprocess) {
            const double expect = *a.ks_subprocess * std::pow(scale, static_cast<double>(a.rank));
            c.expect(std::abs(*sc.ks_subprocess - expect) <= 1e-8 * expect, "ks_subprocess does not scale as c^r");
        }
    }
    // diagonal full-rank densities: product of scalar values
    for (std::size_t t = 0; t < trials; ++t, ++c.cases) {
        const std::size_t d = g.integer(2, 4);
        std::vector<double> th(d), s2(d);
        for (std::size_t i = 0; i < d; ++i) {
            th[i] = g.uniform(-0.8, 0.8);
            s2[i] = g.uniform(0.2, 3.0);
        }
        const auto s = SpectralMeasure::from_function(d, FrequencyGrid(512), [&](double w) {
            ComplexMatrix f(d, d);
            for (std::size_t i = 0; i < d; ++i) f(i, i) = s2[i] * std::norm(1.0 + th[i] * std::polar(1.0, -w)) / kTwoPi;
            return f;
        });
        const auto rep = classify(s);
        double product = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t idx[] = {i};
            product *= *classify(s.subprocess(idx)).ks_subprocess;
        }
        c.expect(rep.ks_subprocess && std::abs(*rep.ks_subprocess - product) <= 1e-8 * product,
                 "diagonal ks_subprocess is not the product of scalar values");
    }
    return c;
}

struct NamedCheck {
    std::string name;
    Check result;
};

/// Everything the module invariants call for, with the trial counts used in the acceptance run.
inline std::vector<NamedCheck> all_invariants(std::uint64_t seed = 20240601) {
    std::vector<NamedCheck> out;
    out.push_back({"eig reconstruction", eig_reconstruction(seed)});
    out.push_back({"psd eigenvalues", psd_eigenvalues(seed + 1)});
    out.push_back({"density round trip", density_roundtrip(seed + 2)});
    out.push_back({"field reconstruction and gauge invariance", field_reconstruction(seed + 3)});
    out.push_back({"parseval", parseval(seed + 4)});
    out.push_back({"outer factor", outer_factor(seed + 5)});
    out.push_back({"projector idempotence", projector_idempotent(seed + 6)});
    out.push_back({"pythagoras and mse monotonicity", pythagoras_and_monotone(seed + 7)});
    out.push_back({"covariance error bound", corollary2(seed + 8)});
    out.push_back({"filter consistency", filter_consistency(seed + 9)});
    out.push_back({"prediction error monotonicity", levinson_monotone(seed + 10)});
    out.push_back({"simulation reproducibility", simulation_reproducible(seed + 11)});
    out.push_back({"filter linearity", filter_linear(seed + 12)});
    out.push_back({"regularity invariants", regularity_invariants(seed + 13)});
    return out;
}

}  // namespace properties
