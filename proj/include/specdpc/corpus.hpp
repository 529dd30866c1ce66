#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specdpc/eigen_field.hpp"
#include "specdpc/regularity.hpp"
#include "specdpc/spectral_model.hpp"

namespace specdpc::corpus {

/// Named numeric parameters; scalars are one-element lists.
using Params = std::map<std::string, std::vector<double>>;

/// A built-in model plus whatever closed forms are known for it.
struct ExampleModel {
    std::string id;
    Params params;
    SpectralMeasure measure;
    MeasureSource source;  // same model on another grid
    std::function<ComplexMatrix(long h)> covariance;            // exact C(h), if known
    std::function<std::vector<double>(double omega)> eigenvalues;  // exact nonzero eigenvalues, descending
    std::function<ComplexMatrix(double omega)> given_vectors;      // eigenvector field as printed
};

inline std::vector<std::string> example_ids() {
    return {"type0", "type1", "type2", "type3_illustration", "type3_candidate", "regular", "scalar_ma1", "scalar_white"};
}

namespace detail {

// Shared 3 x 3 template: X^3 = X^1 + X^2 with X^1, X^2 orthogonal.
inline ComplexMatrix template_matrix(double a, double b) {
    return ComplexMatrix{{a, 0.0, a}, {0.0, b, b}, {a, b, a + b}};
}

inline std::vector<double> template_eigenvalues(double f11, double f22) {
    const double s = f11 + f22;
    const double root = std::sqrt(std::max(0.0, f11 * f11 + f22 * f22 - f11 * f22));
    return {s + root, s - root};
}

inline double type1_f22(double w) { return std::abs(w) <= 1.0 ? 0.5 : 0.0; }
inline double type2_f22(double w) { return w == 0.0 ? 0.0 : std::exp(-1.0 / std::abs(w)); }

// (e^{-iw} + e^{2iw}) / (2 sqrt2 |cos(3w/2)|); where the cosine vanishes the limit from the
// right is used (numerator and denominator vanish together, |g| = 1/sqrt2).
inline cplx g_entry(double w) {
    const double c = std::cos(1.5 * w);
    if (std::abs(c) > 1e-9) {
        return (std::polar(1.0, -w) + std::polar(1.0, 2.0 * w)) / (2.0 * std::sqrt(2.0) * std::abs(c));
    }
    const double side = std::cos(1.5 * (w + 1e-6)) >= 0.0 ? 1.0 : -1.0;
    return side * std::polar(1.0 / std::sqrt(2.0), 0.5 * w);
}

inline cplx candidate_u22(double w) { return (std::polar(1.0, -w) + std::polar(1.0, 2.0 * w)) / 3.0; }

inline cplx candidate_u32(double w) {
    const double x = 1.0 + std::cos(3.0 * w);
    const double c2 = (1.0 - 2.0 / 9.0 * x) / (1.0 + 4.0 * x);
    return std::sqrt(c2) * (2.0 + std::polar(1.0, 3.0 * w));
}

inline ComplexMatrix candidate_vectors(double w) {
    ComplexMatrix u(3, 2);
    u(0, 0) = 1.0;
    u(1, 1) = candidate_u22(w);
    u(2, 1) = candidate_u32(w);
    return u;
}

inline ComplexMatrix regular_density() {
    return ComplexMatrix{{0.5, 0.0, 0.5}, {0.0, 1.0, 0.0}, {0.5, 0.0, 0.5}};
}

inline double scalar(const Params& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    if (it == p.end()) return fallback;
    if (it->second.size() != 1) throw BadParams("parameter '" + key + "' must be a single number");
    return it->second.front();
}

inline void allow_only(const Params& p, std::initializer_list<std::string> keys) {
    const std::set<std::string> ok(keys);
    for (const auto& [k, v] : p) {
        if (!ok.count(k)) throw BadParams("unknown parameter '" + k + "'");
        for (double x : v)
            if (!std::isfinite(x)) throw BadParams("parameter '" + k + "' must be finite");
    }
}

template <class F>
MeasureSource density_source(std::size_t dim, F f) {
    return [dim, f](std::size_t n) { return SpectralMeasure::from_function(dim, FrequencyGrid(n), f); };
}

}  // namespace detail

/// Built-in model `id` sampled on an N-node grid.
inline ExampleModel example(const std::string& id, const Params& params = {},
                            std::size_t grid_size = FrequencyGrid::kDefaultSize) {
    const FrequencyGrid grid(grid_size);
    auto model = [&](MeasureSource source) {
        SpectralMeasure m = source(grid.size());
        return ExampleModel{id, params, std::move(m), std::move(source), {}, {}, {}};
    };

    if (id == "type0") {
        detail::allow_only(params, {"omega", "v1", "v2"});
        const auto get = [&](const std::string& k, double def) {
            const auto it = params.find(k);
            return it == params.end() ? std::vector<double>{def} : it->second;
        };
        const auto omega = get("omega", 1.0), v1 = get("v1", 1.0), v2 = get("v2", 1.0);
        if (omega.empty() || omega.size() != v1.size() || omega.size() != v2.size()) {
            throw BadParams("omega, v1 and v2 need the same positive length");
        }
        std::vector<Atom> atoms;
        for (std::size_t j = 0; j < omega.size(); ++j) {
            if (!(omega[j] > -kPi && omega[j] <= kPi)) throw BadParams("atom frequencies must lie in (-pi, pi]");
            if (!(v1[j] > 0.0 && v2[j] > 0.0)) throw BadParams("atom variances must be positive");
            for (std::size_t i = 0; i < j; ++i)
                if (omega[i] == omega[j]) throw BadParams("atom frequencies must be distinct");
            atoms.push_back({omega[j], detail::template_matrix(v1[j], v2[j])});
        }
        const auto make = [atoms](std::size_t n) {
            return SpectralMeasure(3, FrequencyGrid(n), std::vector<ComplexMatrix>(n, ComplexMatrix(3, 3)), atoms);
        };
        ExampleModel ex = model(make);
        ex.covariance = [atoms](long h) {
            ComplexMatrix c(3, 3);
            for (const auto& a : atoms) c += std::polar(1.0, static_cast<double>(h) * a.omega) * a.mass;
            return c;
        };
        return ex;
    }
    if (id == "type1" || id == "type2") {
        detail::allow_only(params, {});
        const bool one = id == "type1";
        const auto f22 = [one](double w) { return one ? detail::type1_f22(w) : detail::type2_f22(w); };
        const auto dens = [f22](double w) { return detail::template_matrix(1.0 / kTwoPi, f22(w)); };
        ExampleModel ex = model(detail::density_source(3, dens));
        ex.eigenvalues = [f22](double w) { return detail::template_eigenvalues(1.0 / kTwoPi, f22(w)); };
        if (one) {
            ex.covariance = [](long h) {
                const double c11 = h == 0 ? 1.0 : 0.0;
                const double c22 = h == 0 ? 1.0 : std::sin(static_cast<double>(h)) / static_cast<double>(h);
                return detail::template_matrix(c11, c22);
            };
        }
        return ex;
    }
    if (id == "regular" || id == "type3_illustration") {
        detail::allow_only(params, {});
        const auto dens = [](double) { return detail::regular_density(); };
        ExampleModel ex = model(detail::density_source(3, dens));
        ex.eigenvalues = [](double) { return std::vector<double>{1.0, 1.0}; };
        ex.covariance = [](long h) {
            return h == 0 ? detail::regular_density() * cplx{kTwoPi} : ComplexMatrix(3, 3);
        };
        if (id == "regular") {
            ex.given_vectors = [](double w) {
                const cplx p = std::polar(1.0, -w);
                ComplexMatrix u(3, 2);
                u(0, 0) = u(2, 0) = p / std::sqrt(2.0);
                u(1, 1) = p;
                return u;
            };
        } else {
            ex.given_vectors = [](double w) {
                const cplx g = detail::g_entry(w);
                ComplexMatrix u(3, 2);
                u(0, 0) = u(2, 0) = g;
                u(1, 1) = std::sqrt(2.0) * g;
                return u;
            };
        }
        return ex;
    }
    if (id == "type3_candidate") {
        detail::allow_only(params, {});
        const auto dens = [](double w) {
            const ComplexMatrix u = detail::candidate_vectors(w);
            return mul_adjoint(u, u);
        };
        ExampleModel ex = model(detail::density_source(3, dens));
        ex.eigenvalues = [](double) { return std::vector<double>{1.0, 1.0}; };
        ex.given_vectors = detail::candidate_vectors;
        return ex;
    }
    if (id == "scalar_ma1") {
        detail::allow_only(params, {"theta"});
        const double theta = detail::scalar(params, "theta", 0.5);
        const auto dens = [theta](double w) {
            return ComplexMatrix{{std::norm(1.0 + theta * std::polar(1.0, -w)) / kTwoPi}};
        };
        ExampleModel ex = model(detail::density_source(1, dens));
        ex.eigenvalues = [theta](double w) {
            return std::vector<double>{std::norm(1.0 + theta * std::polar(1.0, -w)) / kTwoPi};
        };
        ex.covariance = [theta](long h) {
            const long a = h < 0 ? -h : h;
            return ComplexMatrix{{a == 0 ? 1.0 + theta * theta : (a == 1 ? theta : 0.0)}};
        };
        return ex;
    }
    if (id == "scalar_white") {
        detail::allow_only(params, {"sigma2"});
        const double s2 = detail::scalar(params, "sigma2", 1.0);
        if (!(s2 > 0.0)) throw BadParams("sigma2 must be positive");
        const auto dens = [s2](double) { return ComplexMatrix{{s2 / kTwoPi}}; };
        ExampleModel ex = model(detail::density_source(1, dens));
        ex.eigenvalues = [s2](double) { return std::vector<double>{s2 / kTwoPi}; };
        ex.covariance = [s2](long h) { return ComplexMatrix{{h == 0 ? s2 : 0.0}}; };
        return ex;
    }
    throw BadParams("unknown example '" + id + "'");
}

/// The printed eigenvector field of a model, paired with its eigenvalues on the grid.
inline EigenField given_field(const ExampleModel& ex) {
    if (!ex.given_vectors || !ex.eigenvalues) throw BadParams("example '" + ex.id + "' has no printed field");
    const FrequencyGrid& grid = ex.measure.grid();
    std::vector<std::vector<double>> lambdas(grid.size());
    std::vector<ComplexMatrix> vectors(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
        lambdas[m] = ex.eigenvalues(grid.node(m));
        vectors[m] = ex.given_vectors(grid.node(m));
    }
    const std::size_t r = vectors.front().cols();
    return EigenField(grid, ex.measure.dim(), r, std::move(lambdas), std::move(vectors));
}

}  // namespace specdpc::corpus
