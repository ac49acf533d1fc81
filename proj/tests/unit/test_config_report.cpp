#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowlab/config.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/expr.hpp"
#include "flowlab/report.hpp"

using namespace flowlab;
namespace fs = std::filesystem;

namespace {

fs::path source(const std::string& rel) { return fs::path(FLOWLAB_SOURCE_DIR) / rel; }

CertificateSeries sample_series(std::size_t n) {
    std::vector<long> idx;
    std::vector<double> t;
    for (std::size_t i = 0; i < n; ++i) {
        idx.push_back(static_cast<long>(i) + 1);
        t.push_back(1.0 / static_cast<double>((i + 1) * (i + 1)));
    }
    SeriesOptions opt;
    opt.horizon = static_cast<long>(n);
    opt.envelope = TermEnvelope::power(1.0, 2.0, 1);
    return make_series("sample series", idx, t, opt);
}

}  // namespace

TEST(Expr, ArithmeticAndFunctions) {
    auto e = Expr::parse("n < 0 ? 0.25 : 0.75", {"n"});
    EXPECT_EQ(e(-1), 0.25);
    EXPECT_EQ(e(0), 0.75);
    EXPECT_DOUBLE_EQ(Expr::parse("2^(-abs(n) - 2)", {"n"})(-3), std::pow(2.0, -5));
    EXPECT_DOUBLE_EQ(Expr::parse("min(1 / n, 0.25) + max(1, 2) - sqrt(4)", {"n"})(2), 0.25);
    EXPECT_DOUBLE_EQ(Expr::parse("log(e) + cos(0) + 7 % 3", {"n"})(0), 3.0);
    EXPECT_THROW(Expr::parse("1 +", {"n"}), DomainError);
    EXPECT_THROW(Expr::parse("m + 1", {"n"}), DomainError);
}

TEST(Config, TomlRoundTrip) {
    Json doc = Json::parse(R"j({"horizon": 60, "name": "x", "flag": true,
        "family": {"kind": "expr", "labels": ["0", "1"], "masses": ["1 - 2^(-n)", "2^(-n)"]},
        "rows": [[1.5, 2.0], [3.0, 4.0]], "jobs": [{"a": 1}, {"a": 2.5}]})j");
    auto text = to_toml(doc);
    auto back = parse_toml(text);
    // TOML tables are unordered; compare as plain mappings.
    EXPECT_EQ(nlohmann::json::parse(back.dump()), nlohmann::json::parse(doc.dump())) << text;
}

TEST(Config, ParseErrorsCarryLineAndColumn) {
    try {
        parse_toml("a = 1\nb = [1, 2\n", "bad.toml");
        FAIL();
    } catch (const DomainError& e) {
        std::string m = e.what();
        EXPECT_EQ(m.rfind("bad.toml:", 0), 0u) << m;
        EXPECT_NE(m.find(":2:"), std::string::npos) << m;
    }
    try {
        parse_json("{\n  \"a\": ,\n}", "bad.json");
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.json:2:"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_document("/nonexistent/flowlab.toml"), IOError);
}

TEST(Config, SequenceKinds) {
    auto atoms = sequence_from_config(Json::parse(R"j({"kind":"atoms","positions":[0,1],"masses":["1 - 2^(-n)","2^(-n)"]})j"));
    EXPECT_EQ(atoms.domain(), IndexDomain::Naturals);
    EXPECT_DOUBLE_EQ(atoms.at(3).mass_at(1.0), 0.125);
    auto pois = sequence_from_config(Json::parse(R"j({"kind":"poisson","lambda":"1 + 1 / n","b":"log(2)"})j"));
    ASSERT_TRUE(pois.has_closed_char_fn());
    auto direct = compound_poisson_char_fn(DiscreteMeasure::dirac(std::log(2.0), 1.5), 0.7);
    EXPECT_NEAR(std::abs(pois.char_fn(2, 0.7) - direct), 0.0, 1e-15);
    auto table = sequence_from_config(Json::parse(
        R"j({"kind":"table","domain":"integers","first":-1,"rows":[{"atoms":[[0,1]]},{"atoms":[[2,1]]}]})j"));
    EXPECT_EQ(table.at(0).mass_at(2.0), 1.0);
    EXPECT_THROW(table.at(5), DomainError);
    EXPECT_THROW(sequence_from_config(Json::parse(R"j({"kind":"nope"})j")), DomainError);
}

TEST(Config, FixtureFamiliesLoad) {
    auto step = load_document(source("configs/bernoulli/step.toml"));
    auto fam = family_from_config(step.at("family"));
    EXPECT_EQ(*fam.constant_beyond(), 0);
    EXPECT_DOUBLE_EQ(fam.at(-5).mass_at(1.0), 0.25);
    auto counting = load_document(source("configs/bernoulli/counting.toml"));
    EXPECT_EQ(family_from_config(counting.at("family")).atom_count(), 41u);
    EXPECT_THROW(family_from_config(Json::parse(R"j({"kind":"bernoulli","p":"2"})j")).at(0), DomainError);
}

TEST(Config, IntensityRoundTripAndEmittedFamily) {
    auto doc = load_document(source("configs/suspend/ln2.toml"));
    auto spec = intensity_from_config(doc);
    EXPECT_EQ(spec.folner.sizes, (std::vector<long>{6, 12, 24}));
    auto again = intensity_from_config(intensity_to_config(spec));
    EXPECT_EQ(again.lambda, spec.lambda);
    EXPECT_EQ(again.a, spec.a);
    EXPECT_EQ(again.folner.sizes, spec.folner.sizes);
    // The emitted family config survives a TOML round trip and rebuilds the same family.
    EmitOptions eo;
    auto cfg = emitted_family_config(spec, eo);
    auto rebuilt = family_from_config(parse_toml(to_toml(cfg)));
    auto direct = emit_bernoulli(spec, eo);
    EXPECT_EQ(rebuilt.atom_count(), direct.atom_count());
    EXPECT_EQ(rebuilt.at(3), direct.at(3));
    EXPECT_EQ(rebuilt.constant_beyond(), direct.constant_beyond());
}

TEST(Json, MeasureAndSeriesRoundTrip) {
    DiscreteMeasure mu({{0.0, 0.5}, {2.5, 0.25}}, 0.25);
    EXPECT_EQ(measure_from_json(to_json(mu)), mu);
    EXPECT_EQ(measure_from_json(to_json(mu)).defect(), 0.25);
    auto s = sample_series(6);
    auto back = series_from_json(to_json(s));
    EXPECT_EQ(back.terms, s.terms);
    EXPECT_EQ(back.partial, s.partial);
    EXPECT_EQ(back.verdict, s.verdict);
    EXPECT_EQ(back.tail_bound, s.tail_bound);
    auto env = envelope_from_json(to_json(TermEnvelope::geometric(0.25, 0.5, 3)));
    EXPECT_EQ(env.kind, TermEnvelope::Kind::Geometric);
    EXPECT_EQ(env.from, 3);
    EXPECT_EQ(number(INFINITY), Json("inf"));
    PoissonFlowSpec fs{{{0.5, 1.0}, {0.25, 2.0}}};
    EXPECT_EQ(flow_spec_from_json(to_json(fs)).entries.size(), 2u);
    ITPFI2Spec is{{{1.5, 3}}};
    EXPECT_EQ(itpfi2_spec_from_json(to_json(is)).entries[0].M, 3);
}

TEST(Report, CsvShapes) {
    auto one = sample_series(1);
    EXPECT_EQ(series_csv(one), "index,term,partial_sum\n1,1,1\n");
    CertificateSeries empty;
    EXPECT_EQ(series_csv(empty), "index,term,partial_sum\n");
    auto s = sample_series(3);
    std::istringstream in(series_csv(s));
    std::string line;
    int rows = 0;
    std::getline(in, line);
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
    }
    EXPECT_EQ(rows, 3);
    EXPECT_NE(series_csv(s).find("0.1111111111111111"), std::string::npos);
}

TEST(Report, VerifyCatchesTampering) {
    Report r;
    r.command = "test";
    r.add_series(sample_series(5));
    auto body = r.body();
    EXPECT_NO_THROW(verify_report_body(body));
    auto bad = body;
    bad["series"][0]["partial"][2] = 99.0;
    EXPECT_THROW(verify_report_body(bad), InternalError);
    auto no_tail = body;
    no_tail["series"][0]["tail_bound"] = nullptr;
    EXPECT_THROW(verify_report_body(no_tail), InternalError);
    auto no_witness = body;
    no_witness["series"][0]["verdict"] = "certified_divergent";
    no_witness["series"][0]["witness"] = "";
    EXPECT_THROW(verify_report_body(no_witness), InternalError);
}

TEST(Report, WriteReportFiles) {
    Report r;
    r.command = "test";
    r.add_series(sample_series(4));
    r.attachments.push_back({"family.toml", "x = 1\n"});
    auto dir = fs::temp_directory_path() / "flowlab_report_test";
    fs::remove_all(dir);
    auto csvs = write_report(r, dir, "2026-01-01T00:00:00Z");
    ASSERT_EQ(csvs.size(), 1u);
    EXPECT_EQ(csvs[0].filename(), "0_sample_series.csv");
    EXPECT_TRUE(fs::exists(dir / "family.toml"));
    std::ifstream in(dir / "report.json");
    auto j = Json::parse(in);
    EXPECT_EQ(j["provenance"]["timestamp"], "2026-01-01T00:00:00Z");
    EXPECT_EQ(j["provenance"]["tool_version"], kToolVersion);
    j.erase("provenance");
    EXPECT_EQ(j, r.body());
    fs::remove_all(dir);
}
