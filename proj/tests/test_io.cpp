#include <gtest/gtest.h>

#include "specdpc/io.hpp"
#include "support.hpp"

using namespace specdpc;
using nlohmann::json;

TEST(Io, MatrixRoundTrip) {
    testing_support::Gen g(1);
    const ComplexMatrix a = g.matrix(2, 3);
    EXPECT_TRUE(io::matrix_from_json(io::matrix_to_json(a), 2, 3, "a") == a);
    EXPECT_EQ(io::matrix_from_json(json::parse("[[1, [0, 2]]]"), 1, 2, "b")(0, 1), cplx(0.0, 2.0));
    EXPECT_THROW(io::matrix_from_json(json::parse("[[1, 2]]"), 2, 2, "c"), ParseError);
    EXPECT_THROW(io::matrix_from_json(json::parse("[[\"x\", 2]]"), 1, 2, "d"), ParseError);
}

TEST(Io, BuiltinModel) {
    const auto m = io::load_model(json{{"density", "builtin:regular"}, {"grid_size", 64}});
    EXPECT_EQ(m.label, "regular");
    EXPECT_EQ(m.measure.grid().size(), 64u);
    EXPECT_EQ(m.source(128).grid().size(), 128u);
    const auto p = io::load_model(json{{"density", "builtin:scalar_ma1"}, {"params", {{"theta", 0.25}}}}, 32);
    EXPECT_NEAR(p.measure.density(16)(0, 0).real(), 1.25 * 1.25 / kTwoPi, 1e-15);
}

TEST(Io, BuiltinWithExtraAtoms) {
    const json j = json::parse(R"({"density": "builtin:regular", "grid_size": 32,
        "atoms": [{"omega": 0.5, "mass": [[1,0,0],[0,0,0],[0,0,0]]}]})");
    const auto m = io::load_model(j);
    ASSERT_EQ(m.measure.atoms().size(), 1u);
    EXPECT_EQ(m.source(64).atoms().size(), 1u);
}

TEST(Io, InlineModel) {
    json dens = json::array();
    for (int m = 0; m < 8; ++m) dens.push_back(json::parse("[[1, [0, 0.5]], [[0, -0.5], 1]]"));
    const auto m = io::load_model(json{{"dim", 2}, {"density", dens}});
    EXPECT_EQ(m.label, "inline");
    EXPECT_EQ(m.measure.density(3)(0, 1), cplx(0.0, 0.5));
    EXPECT_THROW(io::load_model(json{{"density", dens}}), ParseError);
    EXPECT_THROW(io::load_model(json{{"dim", 2}, {"density", dens}}, 16), BadParams);
}

TEST(Io, MalformedModels) {
    EXPECT_THROW(io::load_model(json::parse("[1,2]")), ParseError);
    EXPECT_THROW(io::load_model(json{{"grid_size", 8}}), ParseError);
    EXPECT_THROW(io::load_model(json{{"density", "regular"}}), ParseError);
    EXPECT_THROW(io::load_model(json{{"density", "builtin:regular"}, {"grid_size", "big"}}), ParseError);
    EXPECT_THROW(io::load_model(json{{"density", "builtin:nope"}}), BadParams);
    EXPECT_THROW(io::load_model(json{{"density", "builtin:regular"}, {"grid_size", 100}}), BadParams);
    json dens = json::array();
    for (int m = 0; m < 4; ++m) dens.push_back(json::parse("[[1, 2], [0, 1]]"));
    EXPECT_THROW(io::load_model(json{{"dim", 2}, {"density", dens}}), NotHermitian);
    EXPECT_THROW(io::load_model_ref("/nonexistent/model.json"), ParseError);
}

TEST(Io, CovarianceCsvRoundTrip) {
    const auto m = io::load_model(json{{"density", "builtin:type3_candidate"}, {"grid_size", 64}});
    const CovarianceSequence c = covariance_from_measure(m.measure, 3);
    const std::string text = io::comment_block({{"tool", "test"}}) + io::covariance_to_csv(c);
    const CovarianceSequence back = io::covariance_from_csv(text);
    ASSERT_EQ(back.max_lag(), 3u);
    for (long h = 0; h <= 3; ++h) EXPECT_TRUE(back.at(h) == c.at(h) || testing_support::max_abs_diff(back.at(h), c.at(h)) == 0.0);
    EXPECT_THROW(io::covariance_from_csv("h,i,j,re,im\n0,1,1,1\n"), ParseError);
    EXPECT_THROW(io::covariance_from_csv("h,i,j,re,im\n0,1,1,1,0\n0,1,1,1,0\n"), ParseError);
    EXPECT_THROW(io::covariance_from_csv("h,i,j,re,im\n0,1,2,1,0\n"), ParseError);
}

TEST(Io, PathCsvRoundTrip) {
    SamplePath x(2, 3);
    for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] = cplx(0.1 * static_cast<double>(i), -1.0 / 3.0);
    const SamplePath back = io::path_from_csv("# meta\n" + io::path_to_csv(x));
    EXPECT_EQ(back.dim, 2u);
    EXPECT_EQ(back.length, 3u);
    EXPECT_EQ(back.values, x.values);
    EXPECT_THROW(io::path_from_csv("t,re_1,im_1\n0,1\n"), ParseError);
    EXPECT_THROW(io::path_from_csv(""), ParseError);
}

TEST(Io, ReportJsonUsesOneBasedChannels) {
    const auto m = io::load_model(json{{"density", "builtin:regular"}, {"grid_size", 64}});
    const json r = io::report_to_json(classify(m.measure, {}, m.source));
    EXPECT_EQ(r.at("verdict"), "regular");
    EXPECT_EQ(r.at("rank"), 2);
    EXPECT_EQ(r.at("subprocess_indices"), json::parse("[1, 2]"));
    EXPECT_EQ(r.at("rank_profile").size(), 1u);
}

TEST(Io, FilterJsonRoundTrip) {
    const auto m = io::load_model(json{{"density", "builtin:regular"}, {"grid_size", 64}});
    const EigenField e = decompose(m.measure);
    FilterOptions o;
    o.window = 3;
    const FilterBank bank = build_filter_bank(e, 1, o);
    const json j = io::filter_to_json(bank, certificate(e, 1));
    const FilterBank back = io::filter_from_json(json::parse(j.dump()));
    EXPECT_EQ(back.j_min, bank.j_min);
    EXPECT_EQ(back.m_max, bank.m_max);
    for (long k = bank.j_min; k <= bank.j_max; ++k) EXPECT_TRUE(back.psi(k) == bank.psi(k));
    for (long k = bank.m_min; k <= bank.m_max; ++k) EXPECT_TRUE(back.w(k) == bank.w(k));
    EXPECT_NEAR(j.at("certificate").at("mse").get<double>(), kTwoPi, 1e-12);
}
