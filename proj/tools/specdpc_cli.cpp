// specdpc: batch front end for regularity analysis, low-rank DPC filters and simulation.

#include <openssl/evp.h>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specdpc/io.hpp"
#include "specdpc/specdpc.hpp"

namespace {

using nlohmann::json;
using namespace specdpc;

constexpr int kUsage = 2;
constexpr int kNumeric = 3;

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

// Malformed input or a precondition the model does not meet; everything else is numeric.
bool is_usage_error(const std::exception& e) {
    return dynamic_cast<const ParseError*>(&e) || dynamic_cast<const BadParams*>(&e) ||
           dynamic_cast<const DimensionMismatch*>(&e) || dynamic_cast<const NotSquare*>(&e) ||
           dynamic_cast<const NotHermitian*>(&e) || dynamic_cast<const NotPositiveSemidefinite*>(&e) ||
           dynamic_cast<const RankOutOfRange*>(&e) || dynamic_cast<const RankNotConstant*>(&e) ||
           dynamic_cast<const CLI::Error*>(&e);
}

struct ModelArgs {
    std::string model;
    std::size_t grid = 0;  // 0 keeps the model's own grid
    std::vector<std::string> params;
    std::string out;
};

struct ToleranceArgs {
    double rank_tol = 1e-10;
    double one_sided_tol = 1e-6;
    double divergence_threshold = kDefaultDivergenceThreshold;
    double type1_fraction = 0.05;
    double refinement_drop = 0.10;
    std::string gauges = "continuity,raw";
    std::string order = "sorted";
};

struct FilterArgs {
    std::size_t rank = 0;
    std::size_t taps = 0;
    std::string sided = "auto";
    bool causal = false;
    double max_tail_energy = 0.01;
    std::optional<double> delta;
    std::optional<double> eps;
};

struct SimArgs {
    std::size_t length = 100000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    std::size_t window = 0;
    bool real_valued = false;
    bool causal_only = false;
    std::size_t reps = 8;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--model", m.model, "model file or builtin:<id>")->required();
    cmd->add_option("--grid", m.grid, "frequency grid size (power of two)");
    cmd->add_option("--param", m.params, "model parameter key=value or key=v1,v2,...");
    cmd->add_option("--out", m.out, "output file (default: stdout)");
}

void add_tolerance_options(CLI::App* cmd, ToleranceArgs& t) {
    cmd->add_option("--rank-tol", t.rank_tol, "relative eigenvalue cut for the rank")->capture_default_str();
    cmd->add_option("--one-sided-tol", t.one_sided_tol, "largest negative-lag energy share called one-sided")
        ->capture_default_str();
    cmd->add_option("--divergence-threshold", t.divergence_threshold, "log-integral below which it diverges")
        ->capture_default_str();
    cmd->add_option("--type1-fraction", t.type1_fraction, "share of rank-mismatched nodes for type1")
        ->capture_default_str();
    cmd->add_option("--refinement-drop", t.refinement_drop, "relative log-integral drop from N to 2N")
        ->capture_default_str();
    cmd->add_option("--gauges", t.gauges, "gauge strategies tried for one-sidedness")->capture_default_str();
    cmd->add_option("--order", t.order, "channel order: sorted or track")->capture_default_str();
}

void add_filter_options(CLI::App* cmd, FilterArgs& f, bool rank_required) {
    auto* r = cmd->add_option("--rank", f.rank, "number of dynamic principal components k");
    if (rank_required) r->required();
    cmd->add_option("--taps", f.taps, "largest |j| of stored filter taps (0: N/8)")->capture_default_str();
    cmd->add_option("--sided", f.sided, "auto, one or two")->capture_default_str();
    cmd->add_flag("--causal", f.causal, "drop direct-filter lags m < 0");
    cmd->add_option("--max-tail-energy", f.max_tail_energy, "allowed coefficient energy outside the taps")
        ->capture_default_str();
    cmd->add_option("--delta", f.delta, "lower bound on lambda_k for the eps certificate");
    cmd->add_option("--eps", f.eps, "upper bound on lambda_{k+1} for the eps certificate");
}

void add_sim_options(CLI::App* cmd, SimArgs& s) {
    cmd->add_option("--length", s.length, "path length T")->capture_default_str();
    cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
    cmd->add_option("--stream", s.stream, "first random stream")->capture_default_str();
    cmd->add_option("--window", s.window, "largest moving-average lag (0: N/8)")->capture_default_str();
    cmd->add_flag("--real", s.real_valued, "real-valued path (needs f(-w) = conj f(w))");
    cmd->add_flag("--causal-only", s.causal_only, "fail instead of using a two-sided moving average");
}

corpus::Params parse_params(const std::vector<std::string>& items) {
    corpus::Params p;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("--param expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        std::stringstream vals(item.substr(eq + 1));
        std::string cell;
        std::vector<double> xs;
        while (std::getline(vals, cell, ',')) {
            try {
                std::size_t used = 0;
                xs.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::logic_error&) {
                throw ParseError("--param " + key + ": '" + cell + "' is not a number");
            }
        }
        if (xs.empty()) throw ParseError("--param " + key + " has no value");
        p[key] = xs;
    }
    return p;
}

std::vector<GaugeStrategy> parse_gauges(const std::string& list) {
    std::vector<GaugeStrategy> out;
    std::stringstream s(list);
    std::string item;
    while (std::getline(s, item, ',')) {
        if (!item.empty()) out.push_back(parse_gauge(item));
    }
    if (out.empty()) throw BadParams("--gauges needs at least one strategy");
    return out;
}

ClassifyOptions classify_options(const ToleranceArgs& t) {
    ClassifyOptions o;
    o.rank_tol = t.rank_tol;
    o.one_sided_tol = t.one_sided_tol;
    o.divergence_threshold = t.divergence_threshold;
    o.type1_fraction = t.type1_fraction;
    o.refinement_drop = t.refinement_drop;
    o.gauges = parse_gauges(t.gauges);
    o.order = parse_channel_order(t.order);
    return o;
}

struct Input {
    io::LoadedModel model;
    std::string digest;
};

Input load(const ModelArgs& m) {
    std::optional<std::size_t> grid;
    if (m.grid != 0) grid = m.grid;
    Input in{io::load_model_ref(m.model, grid, parse_params(m.params)), {}};
    in.digest = "sha256:" + sha256_hex(in.model.canonical.dump());
    return in;
}

json model_params(const ModelArgs& m) {
    return {{"model", m.model}, {"grid", m.grid}, {"param", m.params}};
}

json tolerance_params(const ToleranceArgs& t) {
    return {{"rank_tol", t.rank_tol},       {"one_sided_tol", t.one_sided_tol},
            {"divergence_threshold", t.divergence_threshold},
            {"type1_fraction", t.type1_fraction}, {"refinement_drop", t.refinement_drop},
            {"gauges", t.gauges},           {"order", t.order}};
}

json filter_params(const FilterArgs& f) {
    json j = {{"rank", f.rank}, {"taps", f.taps}, {"sided", f.sided}, {"causal", f.causal},
              {"max_tail_energy", f.max_tail_energy}};
    j["delta"] = f.delta ? json(*f.delta) : json(nullptr);
    j["eps"] = f.eps ? json(*f.eps) : json(nullptr);
    return j;
}

json sim_params(const SimArgs& s) {
    return {{"length", s.length}, {"seed", s.seed},       {"stream", s.stream},
            {"window", s.window}, {"real", s.real_valued}, {"causal_only", s.causal_only}};
}

json envelope(const std::string& command, const json& params, const Input& in) {
    return {{"tool", {{"name", "specdpc"}, {"version", kVersion}}},
            {"command", command},
            {"parameters", params},
            {"input_digest", in.digest},
            {"model_label", in.model.label}};
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        io::write_text(out, text);
    }
}

std::string csv_header(const std::string& command, const json& params, const std::string& digest) {
    return io::comment_block({{"tool", std::string("specdpc ") + kVersion},
                              {"command", command},
                              {"parameters", params.dump()},
                              {"input_digest", digest}});
}

SimulationOptions simulation_options(const SimArgs& s, const ToleranceArgs& t) {
    SimulationOptions o;
    o.window = s.window;
    o.allow_two_sided = !s.causal_only;
    o.real_valued = s.real_valued;
    o.one_sided_tol = t.one_sided_tol;
    o.rank_tol = t.rank_tol;
    o.stream = s.stream;
    return o;
}

struct Approximation {
    RegularityReport report;
    FilterBank bank;
    ApproximationCertificate cert;
    std::vector<std::string> notes;
};

Approximation approximate(const SpectralMeasure& s, const MeasureSource& source, const FilterArgs& f,
                          const ToleranceArgs& t) {
    if (s.has_singular_part()) {
        throw BadParams("approximation needs an absolutely continuous spectral measure with constant rank");
    }
    const ClassifyOptions copt = classify_options(t);
    Approximation a;
    a.report = classify(s, copt, source);
    const EigenField raw = decompose(s, t.rank_tol, copt.order);
    EigenField field = raw;
    try {
        field = align_gauge(raw, GaugeStrategy::continuity);
    } catch (const ChannelCollapse& e) {
        a.notes.push_back(std::string("continuity gauge failed, raw gauge used: ") + e.what());
    }
    std::optional<EpsBounds> bounds;
    if (f.delta || f.eps) {
        if (!f.delta || !f.eps) throw BadParams("--delta and --eps go together");
        bounds = EpsBounds{*f.delta, *f.eps};
    }
    a.cert = certificate(field, f.rank, bounds);
    FilterOptions fo;
    fo.window = f.taps;
    fo.sided = parse_sided(f.sided);
    fo.regular = a.report.verdict == Verdict::regular || a.report.verdict == Verdict::full_rank_regular;
    fo.one_sided_tol = t.one_sided_tol;
    fo.max_tail_energy = f.max_tail_energy;
    fo.causal = f.causal;
    a.bank = build_filter_bank(field, f.rank, fo);
    return a;
}

int run_analyze(const ModelArgs& m, const ToleranceArgs& t) {
    const Input in = load(m);
    const RegularityReport rep = classify(in.model.measure, classify_options(t), in.model.source);
    json out = envelope("analyze", {{"model", model_params(m)}, {"tolerances", tolerance_params(t)}}, in);
    out["report"] = io::report_to_json(rep);
    emit(m.out, out.dump(2) + "\n");
    return 0;
}

int run_approximate(const ModelArgs& m, const ToleranceArgs& t, const FilterArgs& f) {
    const Input in = load(m);
    const Approximation a = approximate(in.model.measure, in.model.source, f, t);
    json out = envelope("approximate",
                        {{"model", model_params(m)}, {"tolerances", tolerance_params(t)}, {"filter", filter_params(f)}},
                        in);
    out["verdict"] = to_string(a.report.verdict);
    out["filters"] = io::filter_to_json(a.bank, a.cert);
    out["notes"] = a.notes;
    emit(m.out, out.dump(2) + "\n");
    return 0;
}

int run_simulate(const ModelArgs& m, const ToleranceArgs& t, const SimArgs& s) {
    const Input in = load(m);
    const SamplePath x = simulate(in.model.measure, s.length, s.seed, simulation_options(s, t));
    const json params = {{"model", model_params(m)}, {"tolerances", tolerance_params(t)}, {"simulation", sim_params(s)}};
    std::string text = csv_header("simulate", params, in.digest);
    text += io::comment_block({{"generator", x.generator}});
    text += io::path_to_csv(x);
    emit(m.out, text);
    return 0;
}

int run_verify(const ModelArgs& m, const ToleranceArgs& t, const FilterArgs& f, const SimArgs& s) {
    const Input in = load(m);
    const Approximation a = approximate(in.model.measure, in.model.source, f, t);
    const MonteCarloEstimate mc =
        monte_carlo_mse(in.model.measure, a.bank, s.length, s.reps, s.seed, simulation_options(s, t));
    const double diff = mc.mean - a.cert.mse;
    const bool pass = std::abs(diff) <= 5.0 * mc.std_error;
    const double rel = a.cert.mse > 0.0 ? std::abs(diff) / a.cert.mse : std::abs(diff);

    json sim = sim_params(s);
    sim["mc_reps"] = s.reps;
    json out = envelope(
        "verify",
        {{"model", model_params(m)}, {"tolerances", tolerance_params(t)}, {"filter", filter_params(f)}, {"simulation", sim}},
        in);
    out["certificate"] = io::certificate_to_json(a.cert);
    out["monte_carlo"] = {{"mean", mc.mean}, {"std_error", mc.std_error}, {"per_rep", mc.per_rep}};
    out["deviation"] = diff;
    out["relative_deviation"] = rel;
    out["z_score"] = mc.std_error > 0.0 ? json(diff / mc.std_error) : json(nullptr);
    out["tail_energy"] = a.bank.tail_energy;
    out["status"] = pass ? "PASS" : "FAIL";
    out["notes"] = a.notes;

    std::ostringstream table;
    table << std::setprecision(8);
    table << "quantity        closed_form      monte_carlo      std_error\n";
    table << "mse             " << std::setw(16) << std::left << a.cert.mse << ' ' << std::setw(16) << mc.mean << ' '
          << mc.std_error << '\n';
    table << "relative_error  " << std::setw(16) << a.cert.relative_error << ' ' << std::setw(16)
          << (a.cert.total_power > 0.0 ? mc.mean / a.cert.total_power : 0.0) << ' '
          << (a.cert.total_power > 0.0 ? mc.std_error / a.cert.total_power : 0.0) << '\n';
    table << (pass ? "PASS" : "FAIL") << ": |MC - closed form| = " << std::abs(diff) << " vs 5 stderr = "
          << 5.0 * mc.std_error << '\n';
    if (m.out.empty()) {
        std::cout << table.str() << out.dump(2) << '\n';
    } else {
        std::cout << table.str();
        io::write_text(m.out, out.dump(2) + "\n");
    }
    return pass ? 0 : kNumeric;
}

int run_covariance(const ModelArgs& m, const std::string& path, std::size_t max_lag) {
    CovarianceSequence cov(1, {ComplexMatrix{{0.0}}});
    std::string digest;
    if (!path.empty()) {
        const std::string text = io::read_text(path);
        digest = "sha256:" + sha256_hex(text);
        cov = sample_covariance(io::path_from_csv(text), max_lag);
    } else {
        if (m.model.empty()) throw BadParams("covariance needs --model or --path");
        const Input in = load(m);
        digest = in.digest;
        cov = covariance_from_measure(in.model.measure, max_lag);
    }
    const json params = {{"model", model_params(m)}, {"path", path}, {"max_lag", max_lag}};
    emit(m.out, csv_header("covariance", params, digest) + io::covariance_to_csv(cov));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularity analysis and dynamic principal components of multivariate stationary series"};
    app.set_version_flag("--version", std::string("specdpc ") + kVersion);
    app.require_subcommand(1);

    ModelArgs model;
    ToleranceArgs tol;
    FilterArgs filt;
    SimArgs sim;
    std::string path;
    std::size_t max_lag = 64;

    auto* analyze = app.add_subcommand("analyze", "classify a model and write a regularity report");
    add_model_options(analyze, model);
    add_tolerance_options(analyze, tol);

    auto* approx = app.add_subcommand("approximate", "rank-k DPC filters and error certificate");
    add_model_options(approx, model);
    add_tolerance_options(approx, tol);
    add_filter_options(approx, filt, true);

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate a sample path as CSV");
    add_model_options(simulate_cmd, model);
    add_tolerance_options(simulate_cmd, tol);
    add_sim_options(simulate_cmd, sim);

    auto* verify = app.add_subcommand("verify", "compare the certificate with a Monte Carlo estimate");
    add_model_options(verify, model);
    add_tolerance_options(verify, tol);
    add_filter_options(verify, filt, true);
    add_sim_options(verify, sim);
    verify->add_option("--mc-reps", sim.reps, "Monte Carlo repetitions")->capture_default_str();

    auto* cov = app.add_subcommand("covariance", "model or sample covariance C(0..H) as CSV");
    cov->add_option("--model", model.model, "model file or builtin:<id>");
    cov->add_option("--grid", model.grid, "frequency grid size (power of two)");
    cov->add_option("--param", model.params, "model parameter key=value");
    cov->add_option("--out", model.out, "output file (default: stdout)");
    cov->add_option("--path", path, "sample path CSV instead of a model");
    cov->add_option("--max-lag", max_lag, "largest lag H")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (analyze->parsed()) return run_analyze(model, tol);
        if (approx->parsed()) return run_approximate(model, tol, filt);
        if (simulate_cmd->parsed()) return run_simulate(model, tol, sim);
        if (verify->parsed()) return run_verify(model, tol, filt, sim);
        if (cov->parsed()) return run_covariance(model, path, max_lag);
    } catch (const std::exception& e) {
        const bool usage = is_usage_error(e);
        std::cerr << (usage ? "error: " : "numeric failure: ") << e.what() << '\n';
        return usage ? kUsage : kNumeric;
    }
    return kUsage;
}
