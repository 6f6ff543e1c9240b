#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ecodiag/pipeline.hpp"

using namespace ecodiag;

namespace {

const std::filesystem::path kFixtures = ECODIAG_FIXTURE_DIR;

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("ecodiag_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

PipelineConfig fixture_config(const std::filesystem::path& out, bool with_cf = false) {
    PipelineConfig config;
    config.dataset = kFixtures / "dataset.tsv";
    config.definitions = kFixtures / "indicators.def";
    config.mapping_rules = kFixtures / "mapping_rules.json";
    config.hypotheses = kFixtures / "hypotheses.json";
    if (with_cf) config.cf_config = kFixtures / "cfindex.json";
    config.out_dir = out;
    return config;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const DerivedIndicator& indicator(const ReportBundle& b, const std::string& id) {
    for (const auto& d : b.indicators) {
        if (d.id == id) return d;
    }
    FAIL(("no indicator " + id));
    static DerivedIndicator dummy;
    return dummy;
}

}  // namespace

TEST_CASE("the bundled fixture reproduces the published diagnostics") {
    const auto out = fresh_dir("fixture");
    const ReportBundle bundle = run_pipeline(fixture_config(out, true));

    CHECK(bundle.sources.size() == 26);
    CHECK(bundle.rejected.empty());
    CHECK(bundle.indicators.size() == 30);
    CHECK(bundle.audit.size() == 30 + 10);  // indicator audits + two 5-row sectors
    CHECK(bundle.audit_clean());

    CHECK(indicator(bundle, "eu_cagr_2021_2025").quantity ==
          doctest::Approx(0.2695062).epsilon(1e-6));
    CHECK(indicator(bundle, "robot_region_hhi").quantity ==
          doctest::Approx(0.5814).epsilon(1e-9));
    CHECK(indicator(bundle, "labour_net").quantity == 78.0);

    // Boundary taint: demand multiplier uses a projection input.
    CHECK(indicator(bundle, "dc_mult_2030").boundary ==
          InterpretationBoundary::ProjectionBased);
    CHECK(indicator(bundle, "eu_cagr_2021_2025").boundary ==
          InterpretationBoundary::ObservedFact);
    CHECK(indicator(bundle, "robot_ais").boundary ==
          InterpretationBoundary::ScaleComparison);
    CHECK(indicator(bundle, "genai_scale").boundary ==
          InterpretationBoundary::ScaleComparison);

    // Verdicts in spec order.
    REQUIRE(bundle.verdicts.size() == 5);
    CHECK(bundle.verdicts[0].verdict == Verdict::Supported);
    CHECK(bundle.verdicts[1].verdict == Verdict::SupportedUnderProjection);
    CHECK(bundle.verdicts[2].verdict == Verdict::Supported);
    CHECK(bundle.verdicts[3].verdict == Verdict::SupportedWithCaution);
    CHECK(bundle.verdicts[4].verdict == Verdict::SupportedAsConceptualProposition);

    // Everything maps; nothing is guessed.
    CHECK(bundle.mapping.unmapped.empty());
    CHECK(bundle.mapping.entries.size() == bundle.sources.size() + bundle.indicators.size());

    // Friction index over both synthetic sectors.
    REQUIRE(bundle.cf_sectors.size() == 2);
    CHECK(bundle.cf_sectors[0].sector == "finance");
    CHECK(bundle.cf_sectors[0].indicators.size() == 5);
    REQUIRE(bundle.cf_sectors[0].outcome_correlation.has_value());
    CHECK(*bundle.cf_sectors[0].outcome_correlation ==
          doctest::Approx(1.0).epsilon(1e-12));  // friction and outcome fall together

    std::filesystem::remove_all(out);
}

TEST_CASE("every derived indicator has exactly one audit record") {
    const auto out = fresh_dir("bijection");
    const ReportBundle bundle = run_pipeline(fixture_config(out, true));

    std::set<std::string> derived_ids;
    for (const auto& d : bundle.indicators) derived_ids.insert(d.id);
    for (const auto& s : bundle.cf_sectors) {
        for (const auto& d : s.indicators) derived_ids.insert(d.id);
    }
    std::set<std::string> audit_ids;
    for (const auto& rec : bundle.audit) audit_ids.insert(rec.result_id);
    CHECK(derived_ids == audit_ids);
    CHECK(bundle.audit.size() == derived_ids.size());

    // Firewall: no projection-fed record claims an observed fact.
    for (const auto& rec : bundle.audit) {
        bool projected = false;
        for (const auto& in : rec.inputs) {
            projected |= in.status == EvidenceStatus::Projection;
        }
        if (projected) CHECK(rec.boundary != InterpretationBoundary::ObservedFact);
    }
    std::filesystem::remove_all(out);
}

TEST_CASE("report files carry the published values and verdict classes") {
    const auto out = fresh_dir("reports");
    run_pipeline(fixture_config(out, true));

    const std::string indicators = slurp(out / "indicators.tsv");
    CHECK(indicators.find("159.74") != std::string::npos);
    CHECK(indicators.find("26.95") != std::string::npos);
    CHECK(indicators.find("11.73") != std::string::npos);
    CHECK(indicators.find("13.44") != std::string::npos);

    const std::string concentration = slurp(out / "concentration.tsv");
    CHECK(concentration.find("0.5814") != std::string::npos);
    CHECK(concentration.find("0.7951") != std::string::npos);
    CHECK(concentration.find("88.77") != std::string::npos);
    CHECK(concentration.find("regional") != std::string::npos);
    CHECK(concentration.find("reported_comparison") != std::string::npos);

    const std::string hypotheses = slurp(out / "hypotheses.tsv");
    CHECK(hypotheses.find("H2\tempirical\tSupportedUnderProjection") != std::string::npos);
    CHECK(hypotheses.find("H4\tempirical\tSupportedWithCaution") != std::string::npos);
    CHECK(hypotheses.find("P5\tconceptual\tSupportedAsConceptualProposition") !=
          std::string::npos);

    const std::string mapping = slurp(out / "mapping.tsv");
    CHECK(mapping.find("unmeasured\tP") != std::string::npos);
    CHECK(mapping.find("unmeasured\tT") != std::string::npos);
    CHECK(mapping.find("future_indicator\taudit_log_completeness") != std::string::npos);
    CHECK(mapping.find("unmapped") == std::string::npos);

    const std::string cf = slurp(out / "cfindex.tsv");
    CHECK(cf.find("finance") != std::string::npos);
    CHECK(cf.find("synthetic") != std::string::npos);

    // The audit log re-verifies from disk.
    std::ifstream log(out / "audit.log");
    const auto records = read_audit_log(log);
    CHECK(records.size() == 40);
    const auto report = verify_audit_log(records);
    CHECK(report.passed == records.size());
    std::filesystem::remove_all(out);
}

TEST_CASE("two runs produce byte-identical report bodies") {
    const auto out_a = fresh_dir("det_a");
    const auto out_b = fresh_dir("det_b");
    run_pipeline(fixture_config(out_a, true));
    run_pipeline(fixture_config(out_b, true));
    for (const char* name : {"indicators.tsv", "concentration.tsv", "hypotheses.tsv",
                             "mapping.tsv", "audit.log", "cfindex.tsv"}) {
        CHECK(slurp(out_a / name) == slurp(out_b / name));
    }
    std::filesystem::remove_all(out_a);
    std::filesystem::remove_all(out_b);
}

TEST_CASE("an empty dataset yields empty tables and an empty audit log") {
    const auto out = fresh_dir("empty");
    const auto dir = fresh_dir("empty_inputs");
    {
        std::ofstream d(dir / "dataset.tsv");
        d << kDatasetHeader << "\n";
        std::ofstream defs(dir / "indicators.def");
        std::ofstream rules(dir / "mapping_rules.json");
        rules << R"({"rules": []})";
        std::ofstream hyp(dir / "hypotheses.json");
        hyp << R"({"hypotheses": []})";
    }
    PipelineConfig config;
    config.dataset = dir / "dataset.tsv";
    config.definitions = dir / "indicators.def";
    config.mapping_rules = dir / "mapping_rules.json";
    config.hypotheses = dir / "hypotheses.json";
    config.out_dir = out;
    const ReportBundle bundle = run_pipeline(config);
    CHECK(bundle.sources.empty());
    CHECK(bundle.indicators.empty());
    CHECK(bundle.audit.empty());
    CHECK(bundle.audit_clean());
    CHECK(slurp(out / "indicators.tsv") ==
          "id\tformula\tinputs\tvalue\tunit\tstatus\tboundary\taudit_ref\n");
    CHECK(slurp(out / "audit.log").empty());
    std::filesystem::remove_all(out);
    std::filesystem::remove_all(dir);
}

TEST_CASE("nothing is computed from a source that failed vetting") {
    PipelineInputs in;
    CandidateSource good;
    good.value.id = "a";
    good.value.concept_name = "AI investment";
    good.value.quantity = 10.0;
    good.value.unit = make_unit(UnitKind::CurrencyBillion);
    good.value.period = year(2024);
    CandidateSource bad = good;
    bad.value.id = "b";
    bad.requires_unsupported_assumption = true;
    in.candidates = {good, bad};
    in.definitions = {{"x", FormulaId::GrowthMultiplier, {"a", "b"}, {}, {}, 1}};
    CHECK_THROWS_AS(run_pipeline(in), LineageError);

    in.definitions = {{"x", FormulaId::GrowthMultiplier, {"a", "missing"}, {}, {}, 1}};
    CHECK_THROWS_AS(run_pipeline(in), LineageError);
}

TEST_CASE("growth definitions without an explicit horizon use the period span") {
    PipelineInputs in;
    for (const auto& [id, y, q] : {std::tuple{"eu_2021", 2021, 7.7},
                                   std::tuple{"eu_2025", 2025, 20.0}}) {
        CandidateSource c;
        c.value.id = id;
        c.value.concept_name = "EU enterprises using AI";
        c.value.quantity = q;
        c.value.unit = make_unit(UnitKind::Percent);
        c.value.period = year(y);
        in.candidates.push_back(c);
    }
    in.definitions = {
        {"implicit", FormulaId::CompoundAnnualGrowth, {"eu_2021", "eu_2025"}, {}, {}, 1}};
    const auto bundle = run_pipeline(in);
    REQUIRE(bundle.indicators.size() == 1);
    CHECK(bundle.indicators[0].years == 4);
    CHECK(bundle.indicators[0].quantity == cagr(7.7, 20.0, 4));
    // The resolved horizon is frozen into the audit record, so the log
    // verifies standalone.
    CHECK(bundle.audit[0].years == 4);
    CHECK(verify_audit_log(bundle.audit).passed == 1);
}

TEST_CASE("rejected sources are reported with their vetting step") {
    PipelineInputs in;
    CandidateSource c;
    c.value.id = "odd";
    c.value.concept_name = "irrelevant";
    c.value.quantity = 1.0;
    c.value.unit = make_unit(UnitKind::Ratio);
    c.value.period = year(2024);
    c.domain_relevant = false;
    in.candidates = {c};
    const auto bundle = run_pipeline(in);
    CHECK(bundle.sources.empty());
    REQUIRE(bundle.rejected.size() == 1);
    CHECK(bundle.rejected[0].failed_step == 1);
}

TEST_CASE("corrupting one stored quantity fails exactly that indicator") {
    const auto out = fresh_dir("corrupt");
    const ReportBundle bundle = run_pipeline(fixture_config(out));
    auto log = bundle.audit;
    for (std::size_t i = 0; i < log.size(); ++i) {
        auto tampered = log;
        tampered[i].inputs[0].value *= 1.001;
        const auto report = verify_audit_log(tampered);
        CHECK(report.total == log.size());
        CHECK(report.passed == log.size() - 1);
        REQUIRE(report.failed.size() == 1);
        CHECK(report.failed[0] == log[i].result_id);
    }
    std::filesystem::remove_all(out);
}

TEST_CASE("missing input paths fail before any work starts") {
    PipelineConfig config = fixture_config(fresh_dir("failfast"));
    config.dataset = kFixtures / "no_such_file.tsv";
    CHECK_THROWS_AS(run_pipeline(config), IoError);
    std::filesystem::remove_all(config.out_dir);
}

TEST_CASE("the command-line tool honors the exit-code contract") {
    const std::string cli = ECODIAG_CLI;
    const auto out = fresh_dir("cli");
    const std::string base = "\"" + cli + "\" run --dataset \"" +
                             (kFixtures / "dataset.tsv").string() + "\" --defs \"" +
                             (kFixtures / "indicators.def").string() + "\" --rules \"" +
                             (kFixtures / "mapping_rules.json").string() +
                             "\" --hypotheses \"" + (kFixtures / "hypotheses.json").string() +
                             "\" --out \"" + out.string() + "\"";
    CHECK(std::system((base + " > /dev/null").c_str()) == 0);

    const std::string verify_cmd =
        "\"" + cli + "\" verify \"" + (out / "audit.log").string() + "\" > /dev/null";
    CHECK(std::system(verify_cmd.c_str()) == 0);

    // Flip one digit of a stored quantity in the log; verify must fail.
    std::string log = slurp(out / "audit.log");
    const auto pos = log.find("\"recomputed\":");
    REQUIRE(pos != std::string::npos);
    const auto digit = log.find_first_of("123456789", pos);
    REQUIRE(digit != std::string::npos);
    log[digit] = log[digit] == '9' ? '8' : '9';
    {
        std::ofstream rewrite(out / "audit.log", std::ios::binary);
        rewrite << log;
    }
    CHECK(std::system(verify_cmd.c_str()) != 0);

    const std::string explain_cmd = "\"" + cli + "\" explain robot_sfr --dataset \"" +
                                    (kFixtures / "dataset.tsv").string() + "\" --defs \"" +
                                    (kFixtures / "indicators.def").string() +
                                    "\" > /dev/null";
    CHECK(std::system(explain_cmd.c_str()) == 0);

    const std::string explain_missing = "\"" + cli + "\" explain nope --dataset \"" +
                                        (kFixtures / "dataset.tsv").string() + "\" --defs \"" +
                                        (kFixtures / "indicators.def").string() +
                                        "\" > /dev/null 2>&1";
    CHECK(std::system(explain_missing.c_str()) != 0);
    std::filesystem::remove_all(out);
}
