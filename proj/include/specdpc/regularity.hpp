#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "specdpc/eigen_field.hpp"
#include "specdpc/spectral_model.hpp"

namespace specdpc {

enum class Verdict { regular, full_rank_regular, type0, type1, type2, inconclusive_condition3 };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::regular: return "regular";
        case Verdict::full_rank_regular: return "full_rank_regular";
        case Verdict::type0: return "type0";
        case Verdict::type1: return "type1";
        case Verdict::type2: return "type2";
        case Verdict::inconclusive_condition3: return "inconclusive_condition3";
    }
    return "regular";
}

/// Quadrature of sum_j log lambda_j over the nodes where every channel is positive.
struct LogDetIntegral {
    double total = 0.0;
    std::vector<double> per_channel;
    std::vector<std::size_t> nonpositive_nodes;  // skipped by the quadrature
};

inline LogDetIntegral log_det_lambda_parts(const EigenField& e) {
    const std::size_t n = e.size(), r = e.rank();
    LogDetIntegral out;
    out.per_channel.assign(r, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        const auto l = e.lambdas(m);
        if (std::any_of(l.begin(), l.end(), [](double v) { return v <= 0.0; })) {
            out.nonpositive_nodes.push_back(m);
            continue;
        }
        for (std::size_t j = 0; j < r; ++j) out.per_channel[j] += std::log(l[j]);
    }
    const double h = e.grid().spacing();
    for (double& v : out.per_channel) {
        v *= h;
        out.total += v;
    }
    return out;
}

/// Integral of log det Lambda_r; throws NonpositiveEigenvalue if lambda_r <= 0 at a node.
inline LogDetIntegral log_det_lambda_integral(const EigenField& e) {
    auto parts = log_det_lambda_parts(e);
    if (!parts.nonpositive_nodes.empty()) throw NonpositiveEigenvalue(parts.nonpositive_nodes, parts.total);
    return parts;
}

/// (2 pi)^r exp(integral of log det Lambda_r / 2 pi).
inline double kolmogorov_szego_lambda(const EigenField& e) {
    const double li = log_det_lambda_integral(e).total;
    return std::pow(kTwoPi, static_cast<double>(e.rank())) * std::exp(li / kTwoPi);
}

struct SubprocessSelection {
    std::vector<std::size_t> indices;  // 0-based channels
    double min_abs_det = 0.0;          // min over nodes of |det f_r|
    double log_integral = 0.0;         // integral of log det f_r
    double det_sigma = 0.0;            // (2 pi)^r exp(log_integral / 2 pi)
};

namespace detail {

inline double min_abs_minor(const SpectralMeasure& s, const std::vector<std::size_t>& idx) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& f : s.densities()) mn = std::min(mn, std::abs(determinant(f.principal(idx))));
    return mn;
}

}  // namespace detail

/// r channels whose principal minor of the density stays furthest from zero over the grid.
/// Exhaustive search for d <= 16, greedy growth beyond. Ties keep the lexicographically first set.
inline SubprocessSelection select_full_rank_subprocess(const SpectralMeasure& s, const EigenField& e,
                                                       double rel_tol = 1e-12) {
    const std::size_t d = s.dim(), r = e.rank();
    if (r == 0) throw RankOutOfRange("no channels to select for rank 0");
    SubprocessSelection best;
    best.min_abs_det = -1.0;
    if (d <= 16) {
        std::vector<bool> mask(d, false);
        std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(r), true);
        do {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < d; ++i)
                if (mask[i]) idx.push_back(i);
            const double v = detail::min_abs_minor(s, idx);
            if (v > best.min_abs_det) {
                best.min_abs_det = v;
                best.indices = std::move(idx);
            }
        } while (std::prev_permutation(mask.begin(), mask.end()));
    } else {
        std::vector<std::size_t> chosen;
        for (std::size_t step = 0; step < r; ++step) {
            double step_best = -1.0;
            std::size_t pick = 0;
            for (std::size_t i = 0; i < d; ++i) {
                if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
                auto trial = chosen;
                trial.push_back(i);
                std::sort(trial.begin(), trial.end());
                const double v = detail::min_abs_minor(s, trial);
                if (v > step_best) {
                    step_best = v;
                    pick = i;
                }
            }
            chosen.push_back(pick);
            std::sort(chosen.begin(), chosen.end());
            best.min_abs_det = step_best;
        }
        best.indices = chosen;
    }

    double lmax = 0.0;
    for (std::size_t m = 0; m < e.size(); ++m)
        if (r > 0) lmax = std::max(lmax, e.lambda(m, 0));
    const double scale = std::pow(lmax, static_cast<double>(r));
    if (!(best.min_abs_det > rel_tol * scale)) throw NoNonvanishingMinor(best.indices, best.min_abs_det);

    double sum = 0.0;
    for (const auto& f : s.densities()) sum += std::log(std::abs(determinant(f.principal(best.indices))));
    best.log_integral = s.grid().spacing() * sum;
    best.det_sigma = std::pow(kTwoPi, static_cast<double>(r)) * std::exp(best.log_integral / kTwoPi);
    return best;
}

/// Builds the same model on another grid size; used for the refinement test.
using MeasureSource = std::function<SpectralMeasure(std::size_t grid_size)>;

struct ClassifyOptions {
    double rank_tol = 1e-10;
    double type1_fraction = 0.05;  // share of nodes whose rank differs from the median
    double one_sided_tol = 1e-6;
    double divergence_threshold = kDefaultDivergenceThreshold;
    double refinement_drop = 0.10;  // required relative decrease of the log-integral from N to 2N
    std::vector<GaugeStrategy> gauges{GaugeStrategy::continuity, GaugeStrategy::raw};
    ChannelOrder order = ChannelOrder::sorted;
};

struct GaugeOutcome {
    GaugeStrategy gauge = GaugeStrategy::raw;
    bool one_sided = false;
    double rho_minus = 1.0;
    std::optional<std::string> failure;  // e.g. channel collapse during alignment
};

struct RegularityReport {
    Verdict verdict = Verdict::regular;
    std::size_t grid_size = 0;
    std::size_t dim = 0;
    std::size_t rank = 0;
    std::vector<std::size_t> rank_profile;
    double rank_mismatch_fraction = 0.0;
    std::optional<double> log_integral;          // finite part at N
    std::optional<double> log_integral_refined;  // finite part at 2N
    std::vector<double> per_channel_log_integral;
    std::size_t nonpositive_nodes = 0;
    std::size_t deficient_run = 0;          // longest cyclic run of nodes with lambda_r below tolerance
    std::size_t deficient_run_refined = 0;  // same at 2N
    bool divergence_rule = false;
    bool deficient_cluster_rule = false;
    std::vector<GaugeOutcome> gauges;
    std::optional<double> ks_lambda;
    std::optional<double> ks_subprocess;
    std::vector<std::size_t> subprocess_indices;  // 0-based
    ChannelOrder order = ChannelOrder::sorted;
    std::vector<std::string> notes;
    std::vector<RegularityReport> continuous_part;  // sub-report for mixed spectra
};

namespace detail {

inline std::size_t longest_cyclic_run(const std::vector<bool>& flag) {
    const std::size_t n = flag.size();
    if (n == 0) return 0;
    if (std::all_of(flag.begin(), flag.end(), [](bool b) { return b; })) return n;
    std::size_t best = 0, cur = 0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
        cur = flag[k % n] ? cur + 1 : 0;
        best = std::max(best, std::min(cur, n));
    }
    return best;
}

inline std::size_t deficient_run(const EigenField& e, double cut) {
    std::vector<bool> flag(e.size());
    const std::size_t r = e.rank();
    for (std::size_t m = 0; m < e.size(); ++m) flag[m] = e.lambda(m, r - 1) <= cut;
    return longest_cyclic_run(flag);
}

inline void add_kolmogorov_szego(RegularityReport& rep, const SpectralMeasure& s, const EigenField& e) {
    const auto parts = log_det_lambda_parts(e);
    if (parts.nonpositive_nodes.empty()) {
        rep.ks_lambda = std::pow(kTwoPi, static_cast<double>(e.rank())) * std::exp(parts.total / kTwoPi);
    }
    try {
        const auto sel = select_full_rank_subprocess(s, e);
        rep.ks_subprocess = sel.det_sigma;
        rep.subprocess_indices = sel.indices;
    } catch (const NoNonvanishingMinor&) {
        rep.notes.push_back("no principal minor of order r stays away from zero");
    }
}

}  // namespace detail

/// Place a spectral measure in the regularity taxonomy. Always produces a verdict;
/// `refine` (optional) rebuilds the model at 2N for the divergence trend test.
inline RegularityReport classify(const SpectralMeasure& s, const ClassifyOptions& opt = {},
                                 const MeasureSource& refine = {}) {
    RegularityReport rep;
    rep.grid_size = s.grid().size();
    rep.dim = s.dim();
    rep.order = opt.order;

    if (s.has_singular_part()) {
        rep.verdict = Verdict::type0;
        rep.notes.push_back(s.atoms().empty() ? "declared singular continuous part" : "spectral measure has atoms");
        const SpectralMeasure ac = s.density_part();
        const bool nonzero = std::any_of(ac.densities().begin(), ac.densities().end(),
                                         [](const ComplexMatrix& f) { return frobenius_norm(f) > 0.0; });
        if (nonzero) {
            MeasureSource sub;
            if (refine) sub = [refine](std::size_t n) { return refine(n).density_part(); };
            rep.continuous_part.push_back(classify(ac, opt, sub));
        }
        return rep;
    }

    const auto eigs = detail::eig_nodes(s);
    const double lmax = detail::global_max_eigenvalue(eigs);
    rep.rank_profile = detail::rank_profile(eigs, opt.rank_tol);
    if (lmax == 0.0) {
        rep.verdict = Verdict::regular;
        rep.rank = 0;
        rep.notes.push_back("zero density: degenerate rank-0 process");
        return rep;
    }
    const std::size_t r = detail::median_rank(rep.rank_profile);
    rep.rank = r;
    const auto mismatched = static_cast<std::size_t>(std::count_if(
        rep.rank_profile.begin(), rep.rank_profile.end(), [&](std::size_t x) { return x != r; }));
    rep.rank_mismatch_fraction = static_cast<double>(mismatched) / static_cast<double>(rep.rank_profile.size());
    if (rep.rank_mismatch_fraction >= opt.type1_fraction) {
        rep.verdict = Verdict::type1;
        return rep;
    }

    const EigenField field = detail::field_from_eigs(s.grid(), s.dim(), eigs, r, opt.order);
    const double cut = opt.rank_tol * lmax;
    const auto parts = log_det_lambda_parts(field);
    rep.log_integral = parts.total;
    rep.per_channel_log_integral = parts.per_channel;
    rep.nonpositive_nodes = parts.nonpositive_nodes.size();
    rep.deficient_run = detail::deficient_run(field, cut);

    if (refine) {
        const SpectralMeasure fine = refine(2 * s.grid().size());
        const auto fine_eigs = detail::eig_nodes(fine);
        const EigenField fine_field = detail::field_from_eigs(fine.grid(), fine.dim(), fine_eigs, r, opt.order);
        rep.log_integral_refined = log_det_lambda_parts(fine_field).total;
        rep.deficient_run_refined =
            detail::deficient_run(fine_field, opt.rank_tol * detail::global_max_eigenvalue(fine_eigs));
        rep.divergence_rule = parts.total < opt.divergence_threshold &&
                              *rep.log_integral_refined < parts.total - opt.refinement_drop * std::abs(parts.total);
        rep.deficient_cluster_rule = rep.deficient_run >= 2 && rep.deficient_run_refined >= 2;
    } else {
        rep.divergence_rule = parts.total < opt.divergence_threshold;
        rep.deficient_cluster_rule = rep.deficient_run >= 2;
        rep.notes.push_back("no refined grid available: divergence trend not tested");
    }
    if (rep.divergence_rule || rep.deficient_cluster_rule) {
        rep.verdict = Verdict::type2;
        return rep;
    }
    if (!parts.nonpositive_nodes.empty()) {
        rep.notes.push_back("isolated zero eigenvalues dropped from the log-integral");
    }

    detail::add_kolmogorov_szego(rep, s, field);
    if (r == s.dim()) {
        rep.verdict = Verdict::full_rank_regular;
        return rep;
    }

    bool any_one_sided = false;
    for (GaugeStrategy g : opt.gauges) {
        GaugeOutcome out;
        out.gauge = g;
        try {
            const auto side = one_sidedness(fourier_of_field(align_gauge(field, g)), opt.one_sided_tol);
            out.one_sided = side.one_sided;
            out.rho_minus = side.rho_minus;
        } catch (const ChannelCollapse& ex) {
            out.failure = ex.what();
        }
        any_one_sided = any_one_sided || out.one_sided;
        rep.gauges.push_back(std::move(out));
    }
    rep.verdict = any_one_sided ? Verdict::regular : Verdict::inconclusive_condition3;
    return rep;
}

}  // namespace specdpc
