#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "specdpc/corpus.hpp"
#include "specdpc/lowrank.hpp"
#include "specdpc/regularity.hpp"
#include "specdpc/spectral_model.hpp"
#include "specdpc/timedomain.hpp"

namespace specdpc::io {

using nlohmann::json;

inline json matrix_to_json(const ComplexMatrix& a) {
    json rows = json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Rows of [re, im] pairs; a bare number is accepted as a real entry.
inline ComplexMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& what) {
    if (!j.is_array() || j.size() != rows) throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
    std::vector<cplx> entries;
    entries.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols) {
            throw ParseError(what + ": expected " + std::to_string(cols) + " columns");
        }
        for (const auto& z : row) {
            if (z.is_number()) {
                entries.emplace_back(z.get<double>(), 0.0);
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                entries.emplace_back(z[0].get<double>(), z[1].get<double>());
            } else {
                throw ParseError(what + ": entries must be [re, im] pairs");
            }
        }
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

struct LoadedModel {
    SpectralMeasure measure;
    MeasureSource source;  // empty for inline densities
    std::string label;     // builtin id or "inline"
    json canonical;        // normalized model description
};

inline corpus::Params params_from_json(const json& j) {
    corpus::Params p;
    if (j.is_null()) return p;
    if (!j.is_object()) throw ParseError("params must be an object");
    for (const auto& [k, v] : j.items()) {
        if (v.is_number()) {
            p[k] = {v.get<double>()};
        } else if (v.is_array()) {
            for (const auto& x : v) {
                if (!x.is_number()) throw ParseError("param '" + k + "' must hold numbers");
                p[k].push_back(x.get<double>());
            }
        } else {
            throw ParseError("param '" + k + "' must be a number or a list of numbers");
        }
    }
    return p;
}

inline json params_to_json(const corpus::Params& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v.size() == 1 ? json(v.front()) : json(v);
    return j;
}

/// Parse a model description. `grid_override` replaces grid_size for builtin densities.
inline LoadedModel load_model(const json& j, std::optional<std::size_t> grid_override = std::nullopt) {
    if (!j.is_object()) throw ParseError("model must be a JSON object");
    if (!j.contains("density")) throw ParseError("model needs a 'density' field");
    std::size_t n = FrequencyGrid::kDefaultSize;
    try {
        if (j.contains("grid_size")) n = j.at("grid_size").get<std::size_t>();
        if (grid_override) n = *grid_override;
        const auto& dens = j.at("density");
        std::vector<Atom> extra;
        std::optional<std::size_t> dim;
        if (j.contains("dim")) dim = j.at("dim").get<std::size_t>();
        bool singular = j.value("singular_continuous", false);

        if (dens.is_string()) {
            const std::string s = dens.get<std::string>();
            if (s.rfind("builtin:", 0) != 0) throw ParseError("density string must be 'builtin:<id>'");
            const std::string id = s.substr(8);
            const auto params = params_from_json(j.value("params", json()));
            corpus::ExampleModel ex = corpus::example(id, params, n);
            if (dim && *dim != ex.measure.dim()) throw ParseError("dim does not match builtin:" + id);
            const std::size_t d = ex.measure.dim();
            if (j.contains("atoms")) {
                for (const auto& a : j.at("atoms"))
                    extra.push_back({a.at("omega").get<double>(), matrix_from_json(a.at("mass"), d, d, "atom mass")});
            }
            auto build = [ex, extra, singular](const SpectralMeasure& base) {
                std::vector<Atom> atoms = base.atoms();
                atoms.insert(atoms.end(), extra.begin(), extra.end());
                return SpectralMeasure(base.dim(), base.grid(), base.densities(), std::move(atoms),
                                       singular || base.singular_continuous());
            };
            LoadedModel out{build(ex.measure), {}, id, json::object()};
            const auto src = ex.source;
            out.source = [src, build](std::size_t size) { return build(src(size)); };
            out.canonical = {{"density", s}, {"dim", d}, {"grid_size", n}, {"params", params_to_json(params)},
                             {"singular_continuous", singular}};
            json atoms = json::array();
            for (const auto& a : extra) atoms.push_back({{"omega", a.omega}, {"mass", matrix_to_json(a.mass)}});
            out.canonical["atoms"] = atoms;
            return out;
        }

        if (!dens.is_array()) throw ParseError("density must be 'builtin:<id>' or an array of matrices");
        if (!dim) throw ParseError("inline densities need 'dim'");
        if (grid_override && *grid_override != dens.size()) {
            throw BadParams("inline density has " + std::to_string(dens.size()) + " nodes, grid override is " +
                            std::to_string(*grid_override));
        }
        if (j.contains("grid_size") && j.at("grid_size").get<std::size_t>() != dens.size()) {
            throw ParseError("grid_size does not match the number of density matrices");
        }
        std::vector<ComplexMatrix> mats;
        mats.reserve(dens.size());
        for (std::size_t m = 0; m < dens.size(); ++m)
            mats.push_back(matrix_from_json(dens[m], *dim, *dim, "density[" + std::to_string(m) + "]"));
        if (j.contains("atoms")) {
            for (const auto& a : j.at("atoms"))
                extra.push_back({a.at("omega").get<double>(), matrix_from_json(a.at("mass"), *dim, *dim, "atom mass")});
        }
        LoadedModel out{SpectralMeasure(*dim, FrequencyGrid(dens.size()), std::move(mats), extra, singular), {},
                        "inline", j};
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model: ") + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// "builtin:<id>" or a path to a model JSON file.
inline LoadedModel load_model_ref(const std::string& ref, std::optional<std::size_t> grid_override = std::nullopt,
                                  const corpus::Params& params = {}) {
    if (ref.rfind("builtin:", 0) == 0) {
        json j = {{"density", ref}, {"params", params_to_json(params)}};
        return load_model(j, grid_override);
    }
    json j = read_json_file(ref);
    if (!params.empty()) {
        json& p = j["params"];
        if (p.is_null()) p = json::object();
        for (const auto& [k, v] : params) p[k] = v.size() == 1 ? json(v.front()) : json(v);
    }
    return load_model(j, grid_override);
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Lines starting with '#' are metadata and skipped by the readers.
inline std::string comment_block(const std::vector<std::pair<std::string, std::string>>& meta) {
    std::string out;
    for (const auto& [k, v] : meta) out += "# " + k + ": " + v + "\n";
    return out;
}

/// CSV rows "h,i,j,re,im" for h = 0..H and 1-based channels.
inline std::string covariance_to_csv(const CovarianceSequence& c) {
    std::ostringstream out;
    out << "h,i,j,re,im\n";
    for (std::size_t h = 0; h <= c.max_lag(); ++h) {
        const ComplexMatrix& m = c.nonnegative_lags()[h];
        for (std::size_t i = 0; i < c.dim(); ++i)
            for (std::size_t j = 0; j < c.dim(); ++j)
                out << h << ',' << i + 1 << ',' << j + 1 << ',' << format_double(m(i, j).real()) << ','
                    << format_double(m(i, j).imag()) << '\n';
    }
    return out.str();
}

inline CovarianceSequence covariance_from_csv(const std::string& text) {
    struct Row {
        std::size_t h, i, j;
        cplx v;
    };
    std::vector<Row> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0, max_h = 0, dim = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
        const bool header_slot = first;
        first = false;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (header_slot && !cells.empty() && cells[0].find_first_of("0123456789") == std::string::npos) continue;
        if (cells.size() != 5) throw ParseError("covariance line " + std::to_string(line_no) + ": need 5 fields");
        try {
            const long h = std::stol(cells[0]), i = std::stol(cells[1]), j = std::stol(cells[2]);
            if (h < 0 || i < 1 || j < 1) throw ParseError("covariance line " + std::to_string(line_no) + ": bad index");
            rows.push_back({static_cast<std::size_t>(h), static_cast<std::size_t>(i - 1),
                            static_cast<std::size_t>(j - 1), {std::stod(cells[3]), std::stod(cells[4])}});
        } catch (const std::logic_error&) {
            throw ParseError("covariance line " + std::to_string(line_no) + ": not a number");
        }
        max_h = std::max(max_h, rows.back().h);
        dim = std::max({dim, rows.back().i + 1, rows.back().j + 1});
    }
    if (rows.empty()) throw ParseError("covariance file is empty");
    std::vector<ComplexMatrix> lags(max_h + 1, ComplexMatrix(dim, dim));
    std::vector<char> seen((max_h + 1) * dim * dim, 0);
    for (const auto& r : rows) {
        const std::size_t key = (r.h * dim + r.i) * dim + r.j;
        if (seen[key]) throw ParseError("duplicate covariance entry");
        seen[key] = 1;
        lags[r.h](r.i, r.j) = r.v;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ParseError("covariance file has missing entries");
    return CovarianceSequence(dim, std::move(lags));
}

inline json optional_to_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline json rank_profile_runs(const std::vector<std::size_t>& profile) {
    json runs = json::array();
    std::size_t start = 0;
    for (std::size_t m = 1; m <= profile.size(); ++m) {
        if (m == profile.size() || profile[m] != profile[start]) {
            runs.push_back({{"first_node", start}, {"count", m - start}, {"rank", profile[start]}});
            start = m;
        }
    }
    return runs;
}

inline json report_to_json(const RegularityReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["grid_size"] = r.grid_size;
    j["dim"] = r.dim;
    j["rank"] = r.rank;
    j["rank_profile"] = rank_profile_runs(r.rank_profile);
    j["rank_mismatch_fraction"] = r.rank_mismatch_fraction;
    j["log_integral_lambda"] = optional_to_json(r.log_integral);
    j["log_integral_lambda_refined"] = optional_to_json(r.log_integral_refined);
    j["per_channel_log_integral"] = r.per_channel_log_integral;
    j["nonpositive_nodes"] = r.nonpositive_nodes;
    j["deficient_run"] = r.deficient_run;
    j["deficient_run_refined"] = r.deficient_run_refined;
    j["divergence_rule"] = r.divergence_rule;
    j["deficient_cluster_rule"] = r.deficient_cluster_rule;
    json gauges = json::array();
    for (const auto& g : r.gauges) {
        json e = {{"gauge", to_string(g.gauge)}, {"one_sided", g.one_sided}, {"rho_minus", g.rho_minus}};
        if (g.failure) e["failure"] = *g.failure;
        gauges.push_back(e);
    }
    j["one_sidedness"] = gauges;
    j["ks_lambda"] = optional_to_json(r.ks_lambda);
    j["ks_subprocess"] = optional_to_json(r.ks_subprocess);
    json idx = json::array();
    for (auto i : r.subprocess_indices) idx.push_back(i + 1);
    j["subprocess_indices"] = idx;
    j["channel_order"] = to_string(r.order);
    j["notes"] = r.notes;
    if (!r.continuous_part.empty()) j["continuous_part"] = report_to_json(r.continuous_part.front());
    return j;
}

inline json certificate_to_json(const ApproximationCertificate& c) {
    json j = {{"k", c.k},
              {"rank", c.rank},
              {"mse", c.mse},
              {"total_power", c.total_power},
              {"relative_error", c.relative_error},
              {"covariance_error_bound", c.covariance_error_bound},
              {"eps_bound_status", to_string(c.bound_status)},
              {"eps_bound", optional_to_json(c.eps_bound)},
              {"rel_eps_bound", optional_to_json(c.rel_eps_bound)}};
    if (c.violating_node) j["violating_node"] = *c.violating_node;
    return j;
}

inline json filter_to_json(const FilterBank& bank, const ApproximationCertificate& cert) {
    json taps = json::array();
    for (long jj = bank.j_min; jj <= bank.j_max; ++jj) taps.push_back({{"j", jj}, {"matrix", matrix_to_json(bank.psi(jj))}});
    json direct = json::array();
    for (long m = bank.m_min; m <= bank.m_max; ++m) direct.push_back({{"m", m}, {"matrix", matrix_to_json(bank.w(m))}});
    return {{"rank", bank.rank},
            {"sided", to_string(bank.sided)},
            {"causal", bank.causal},
            {"gauge", bank.gauge},
            {"rho_minus", bank.rho_minus},
            {"taps", taps},
            {"direct", direct},
            {"tail_energy", bank.tail_energy},
            {"certificate", certificate_to_json(cert)}};
}

inline FilterBank filter_from_json(const json& j) {
    try {
        FilterBank bank;
        bank.rank = j.at("rank").get<std::size_t>();
        bank.sided = j.at("sided").get<std::string>() == "one" ? Sidedness::one_sided : Sidedness::two_sided;
        bank.causal = j.value("causal", false);
        bank.gauge = j.value("gauge", "");
        bank.rho_minus = j.value("rho_minus", 0.0);
        bank.tail_energy = j.at("tail_energy").get<double>();
        const auto& taps = j.at("taps");
        const auto& direct = j.at("direct");
        if (taps.empty() || direct.empty()) throw ParseError("filter needs taps and direct coefficients");
        bank.dim = taps.front().at("matrix").size();
        bank.j_min = taps.front().at("j").get<long>();
        bank.j_max = bank.j_min + static_cast<long>(taps.size()) - 1;
        for (std::size_t t = 0; t < taps.size(); ++t) {
            if (taps[t].at("j").get<long>() != bank.j_min + static_cast<long>(t)) throw ParseError("taps must be consecutive");
            bank.taps.push_back(matrix_from_json(taps[t].at("matrix"), bank.dim, bank.rank, "tap"));
        }
        bank.m_min = direct.front().at("m").get<long>();
        bank.m_max = bank.m_min + static_cast<long>(direct.size()) - 1;
        for (std::size_t t = 0; t < direct.size(); ++t) {
            if (direct[t].at("m").get<long>() != bank.m_min + static_cast<long>(t)) {
                throw ParseError("direct coefficients must be consecutive");
            }
            bank.direct.push_back(matrix_from_json(direct[t].at("matrix"), bank.dim, bank.dim, "direct"));
        }
        return bank;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed filter: ") + e.what());
    }
}

/// Header "t,re_1,im_1,...,re_d,im_d", one row per time step.
inline std::string path_to_csv(const SamplePath& x) {
    std::ostringstream out;
    out << 't';
    for (std::size_t i = 1; i <= x.dim; ++i) out << ",re_" << i << ",im_" << i;
    out << '\n';
    for (std::size_t t = 0; t < x.length; ++t) {
        out << t;
        for (std::size_t i = 0; i < x.dim; ++i)
            out << ',' << format_double(x.at(t, i).real()) << ',' << format_double(x.at(t, i).imag());
        out << '\n';
    }
    return out.str();
}

inline SamplePath path_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    do {
        if (!std::getline(in, line)) throw ParseError("empty path file");
    } while (line.empty() || line[0] == '#');
    const auto fields = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (fields < 3 || fields % 2 == 0) throw ParseError("path header must be t,re_1,im_1,...");
    const std::size_t d = (fields - 1) / 2;
    std::vector<cplx> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> nums;
        while (std::getline(ls, cell, ',')) {
            try {
                nums.push_back(std::stod(cell));
            } catch (const std::logic_error&) {
                throw ParseError("path row " + std::to_string(rows + 1) + ": not a number");
            }
        }
        if (nums.size() != fields) throw ParseError("path row " + std::to_string(rows + 1) + ": wrong field count");
        for (std::size_t i = 0; i < d; ++i) values.emplace_back(nums[1 + 2 * i], nums[2 + 2 * i]);
        ++rows;
    }
    SamplePath x(d, rows);
    x.values = std::move(values);
    return x;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
    if (!out) throw ParseError("write failed for " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace specdpc::io
