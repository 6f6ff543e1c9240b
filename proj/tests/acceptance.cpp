// Acceptance suite: runs every acceptance criterion end to end against the
// bundled fixture and synthetic data, printing one PASS/FAIL line per
// criterion. Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "ecodiag/pipeline.hpp"

using namespace ecodiag;

namespace {

const std::filesystem::path kFixtures = ECODIAG_FIXTURE_DIR;

int g_failures = 0;

struct Criterion {
    std::string name;
    bool ok = true;
    std::vector<std::string> problems;

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            problems.push_back(what);
        }
    }

    void finish(const std::string& detail) {
        if (ok) {
            std::cout << "[PASS] " << name << ": " << detail << "\n";
        } else {
            ++g_failures;
            std::cout << "[FAIL] " << name << "\n";
            for (const auto& p : problems) std::cout << "       " << p << "\n";
        }
    }
};

PipelineConfig fixture_config(const std::filesystem::path& out, bool with_cf) {
    PipelineConfig config;
    config.dataset = kFixtures / "dataset.tsv";
    config.definitions = kFixtures / "indicators.def";
    config.mapping_rules = kFixtures / "mapping_rules.json";
    config.hypotheses = kFixtures / "hypotheses.json";
    if (with_cf) config.cf_config = kFixtures / "cfindex.json";
    config.out_dir = out;
    return config;
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir =
        std::filesystem::temp_directory_path() / ("ecodiag_acc_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double quantity_of(const ReportBundle& bundle, const std::string& id, Criterion& c) {
    for (const auto& d : bundle.indicators) {
        if (d.id == id) return d.quantity;
    }
    c.require(false, "indicator '" + id + "' missing from the bundle");
    return std::numeric_limits<double>::quiet_NaN();
}

/// Checks a presented value against the published figure within half a unit
/// of its last reported digit.
void golden(Criterion& c, const ReportBundle& bundle, const std::string& id,
            double scale, double reported, int decimals) {
    const double presented = quantity_of(bundle, id, c) * scale;
    if (!matches_reported(presented, reported, decimals)) {
        std::ostringstream msg;
        msg.precision(10);
        msg << id << " presented " << presented << " vs reported " << reported;
        c.require(false, msg.str());
    }
}

// --- criteria -------------------------------------------------------------

void criterion_1_golden_audit_rows(const ReportBundle& bundle) {
    Criterion c{"criterion 1: golden audit table rows"};
    golden(c, bundle, "eu_cagr_2021_2025", 100.0, 26.95, 2);
    golden(c, bundle, "oecd_cagr_2023_2025", 100.0, 52.38, 2);
    golden(c, bundle, "genai_scale", 100.0, 13.44, 2);
    golden(c, bundle, "us_china_ratio", 1.0, 11.73, 2);
    golden(c, bundle, "dc_mult_2030", 1.0, 2.28, 2);
    golden(c, bundle, "dc_cagr_2030", 100.0, 14.70, 2);
    golden(c, bundle, "robot_sfr", 1.0, 8.60, 2);
    golden(c, bundle, "robot_region_hhi", 1.0, 0.5814, 4);
    golden(c, bundle, "labour_ndr", 1.0, 1.85, 2);
    c.finish("all nine rows within half a unit of the last reported digit");
}

void criterion_2_extended_goldens(const ReportBundle& bundle) {
    Criterion c{"criterion 2: extended golden values"};
    golden(c, bundle, "eu_rel_2021_2025", 100.0, 159.74, 2);
    golden(c, bundle, "eu_rel_2024_2025", 100.0, 48.15, 2);
    golden(c, bundle, "oecd_rel_2023_2025", 100.0, 132.18, 2);
    golden(c, bundle, "oecd_rel_2024_2025", 100.0, 42.25, 2);
    golden(c, bundle, "org_rel_2024_2025", 100.0, 12.82, 2);
    golden(c, bundle, "us_uk_ratio", 1.0, 24.24, 2);
    golden(c, bundle, "us_top3_share", 100.0, 88.77, 2);
    golden(c, bundle, "top3_hhi", 1.0, 0.7951, 4);
    golden(c, bundle, "dc_mult_2035", 1.0, 2.89, 2);
    golden(c, bundle, "dc_cagr_2035", 100.0, 10.13, 2);
    golden(c, bundle, "robot_ais", 100.0, 11.62, 2);
    golden(c, bundle, "labour_drn", 100.0, 54.12, 2);
    golden(c, bundle, "labour_net", 1.0, 78.0, 2);
    golden(c, bundle, "labour_ngr", 100.0, 45.88, 2);
    // Absolute demand increases quoted alongside them.
    golden(c, bundle, "dc_abs_2024_2030", 1.0, 530.0, 2);
    golden(c, bundle, "dc_abs_2024_2035", 1.0, 785.0, 2);
    c.finish("all sixteen values within half a unit of the last reported digit");
}

void criterion_3_verdicts(const ReportBundle& bundle) {
    Criterion c{"criterion 3: hypothesis verdict classes"};
    const std::vector<std::pair<std::string, Verdict>> expected = {
        {"H1", Verdict::Supported},
        {"H2", Verdict::SupportedUnderProjection},
        {"H3", Verdict::Supported},
        {"H4", Verdict::SupportedWithCaution},
        {"P5", Verdict::SupportedAsConceptualProposition},
    };
    c.require(bundle.verdicts.size() == expected.size(), "verdict count differs");
    for (const auto& [id, verdict] : expected) {
        bool found = false;
        for (const auto& h : bundle.verdicts) {
            if (h.id != id) continue;
            found = true;
            if (h.verdict != verdict) {
                c.require(false, id + " is " + std::string(verdict_token(h.verdict)) +
                                     ", expected " + std::string(verdict_token(verdict)));
            }
        }
        c.require(found, "verdict for " + id + " missing");
    }
    c.finish("H1 Supported, H2 UnderProjection, H3 Supported, H4 WithCaution, "
             "P5 ConceptualProposition");
}

void criterion_4_taint_propagation() {
    Criterion c{"criterion 4: taint propagation over randomized datasets"};
    std::mt19937_64 rng(20240801);
    std::uniform_real_distribution<double> value(1.0, 500.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> source_count(4, 10);

    const FormulaId formulas[] = {
        FormulaId::AbsoluteChange,  FormulaId::RelativeChange,
        FormulaId::GrowthMultiplier, FormulaId::ScaleRatio,
        FormulaId::CompoundAnnualGrowth, FormulaId::NewToDisplacedRatio,
        FormulaId::DisplacementShare, FormulaId::NetRoleChange,
        FormulaId::NetGainShare,
    };

    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        PipelineInputs in;
        const int n = source_count(rng);
        for (int i = 0; i < n; ++i) {
            CandidateSource cand;
            cand.value.id = "s" + std::to_string(i);
            cand.value.concept_name = "projected roles series " + std::to_string(i);
            cand.value.quantity = value(rng);
            cand.value.unit = make_unit(UnitKind::JobsMillion);
            cand.value.period = year(2015 + i);
            cand.value.evidence_status =
                coin(rng) ? EvidenceStatus::Projection : EvidenceStatus::Reported;
            in.candidates.push_back(cand);
        }
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::uniform_int_distribution<std::size_t> pick_formula(0, std::size(formulas) - 1);
        for (int d = 0; d < 6; ++d) {
            IndicatorDef def;
            def.id = "d" + std::to_string(d);
            def.formula = formulas[pick_formula(rng)];
            int a = pick(rng), b = pick(rng);
            if (a == b) b = (b + 1) % n;
            def.inputs = {"s" + std::to_string(a), "s" + std::to_string(b)};
            if (def.formula == FormulaId::CompoundAnnualGrowth) def.years = 3;
            in.definitions.push_back(def);
        }
        in.rules.rules = {{"roles", {ActionVariable::HumanJudgement}, "stated."}};
        for (int h = 0; h < 3; ++h) {
            HypothesisSpec spec;
            spec.id = "H" + std::to_string(h);
            spec.kind = ClaimKind::Empirical;
            spec.sensitivity = coin(rng) ? ProjectionSensitivity::UnderProjection
                                         : ProjectionSensitivity::WithCaution;
            spec.boundary = "stated.";
            spec.required = {"d" + std::to_string(pick(rng) % 6),
                             "d" + std::to_string(pick(rng) % 6)};
            in.hypotheses.push_back(spec);
        }

        const ReportBundle bundle = run_pipeline(in);
        for (const auto& d : bundle.indicators) {
            bool tainted = false;
            for (const auto& input : d.inputs) {
                for (const auto& sv : bundle.sources) {
                    if (sv.id == input && sv.evidence_status == EvidenceStatus::Projection) {
                        tainted = true;
                    }
                }
            }
            if (tainted && d.boundary != InterpretationBoundary::ProjectionBased) {
                c.require(false, "trial " + std::to_string(trial) + ": indicator " + d.id +
                                     " has a projection input but boundary " +
                                     std::string(boundary_token(d.boundary)));
            }
        }
        for (const auto& h : bundle.verdicts) {
            bool any_tainted = false;
            for (const auto& req : h.evidence_ids) {
                for (const auto& d : bundle.indicators) {
                    if (d.id == req &&
                        d.boundary == InterpretationBoundary::ProjectionBased) {
                        any_tainted = true;
                    }
                }
            }
            if (any_tainted && h.verdict == Verdict::Supported) {
                c.require(false, "trial " + std::to_string(trial) + ": " + h.id +
                                     " fully supported despite projection-derived evidence");
            }
        }
    }
    c.finish("100 randomized datasets, no taint or verdict violation");
}

void criterion_5_algebraic_identities() {
    Criterion c{"criterion 5: algebraic identity properties"};
    std::mt19937_64 rng(20240802);
    std::uniform_real_distribution<double> value(1e-3, 1e6);
    std::uniform_int_distribution<int> years(1, 40);

    for (int i = 0; i < 1000 && c.ok; ++i) {
        const double x0 = value(rng), xt = value(rng);
        const int n = years(rng);
        const double compounded = std::pow(1.0 + cagr(x0, xt, n), n);
        const double mult = growth_multiplier(x0, xt);
        c.require(std::fabs(compounded - mult) <= 1e-9 * std::fabs(mult),
                  "(1+CAGR)^n diverged from the multiplier");
    }
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const LabourProjection p{value(rng), value(rng), year(2030)};
        c.require(displacement_relative_to_new(p) + net_gain_ratio(p) == 1.0,
                  "displacement share and net gain share do not sum to one");
    }
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const RobotStockSnapshot s{value(rng), value(rng), year(2024)};
        const double product = stock_flow_ratio(s) * installation_share_of_stock(s);
        c.require(std::fabs(product - 1.0) <= 1e-12,
                  "stock-flow ratio and installation share are not reciprocal");
    }
    std::uniform_int_distribution<int> members(1, 10);
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const int k = members(rng);
        ShareGroup g;
        g.label = "prop";
        g.scope = GroupScope::Sectoral;
        for (int m = 0; m < k; ++m) g.members.push_back({"m" + std::to_string(m), value(rng)});
        const double h = hhi(shares(g)).value;
        c.require(h >= 1.0 / k - 1e-12 && h <= 1.0 + 1e-12, "index outside [1/k, 1]");

        ShareGroup eq;
        eq.label = "equal";
        eq.scope = GroupScope::Sectoral;
        const double same = value(rng);
        for (int m = 0; m < k; ++m) eq.members.push_back({"e" + std::to_string(m), same});
        c.require(std::fabs(hhi(shares(eq)).value - 1.0 / k) <= 1e-12,
                  "equal shares did not give 1/k");
    }
    c.finish("1000 randomized cases per identity, all held");
}

void criterion_6_audit_round_trip() {
    Criterion c{"criterion 6: audit round-trip and single-field corruption"};
    const auto out = fresh_dir("audit");
    run_pipeline(fixture_config(out, false));

    std::ifstream log_in(out / "audit.log");
    const auto records = read_audit_log(log_in);
    const auto clean = verify_audit_log(records);
    c.require(clean.total == records.size() && clean.passed == records.size(),
              "fresh audit log did not verify 100%");

    for (std::size_t i = 0; i < records.size() && c.ok; ++i) {
        for (int field = 0; field < 3 && c.ok; ++field) {
            auto tampered = records;
            switch (field) {
                case 0: tampered[i].inputs[0].value += 0.25; break;
                case 1: tampered[i].declared *= 1.0001; break;
                case 2: tampered[i].recomputed -= 0.125; break;
            }
            const auto report = verify_audit_log(tampered);
            c.require(report.failed.size() == 1 &&
                          report.failed[0] == records[i].result_id &&
                          report.passed == records.size() - 1,
                      "flipping a quantity in '" + records[i].result_id +
                          "' did not fail exactly that record");
        }
    }
    std::filesystem::remove_all(out);
    c.finish("fresh log verifies 100%; every single-quantity flip fails exactly "
             "its own record");
}

void criterion_7_determinism() {
    Criterion c{"criterion 7: byte-identical reruns"};
    const auto out_a = fresh_dir("det_a");
    const auto out_b = fresh_dir("det_b");
    run_pipeline(fixture_config(out_a, true));
    run_pipeline(fixture_config(out_b, true));
    for (const char* name : {"indicators.tsv", "concentration.tsv", "hypotheses.tsv",
                             "mapping.tsv", "audit.log", "cfindex.tsv"}) {
        c.require(slurp(out_a / name) == slurp(out_b / name),
                  std::string(name) + " differs between consecutive runs");
    }
    std::filesystem::remove_all(out_a);
    std::filesystem::remove_all(out_b);
    c.finish("two consecutive runs byte-identical across all six report files");
}

void criterion_8_friction_index_properties() {
    Criterion c{"criterion 8: friction-index properties on synthetic data"};
    std::mt19937_64 rng(20240803);
    std::uniform_real_distribution<double> raw(0.0, 100.0);
    std::uniform_int_distribution<int> len(2, 10);

    // Bounded output under min-max normalization and valid weights.
    for (int trial = 0; trial < 200 && c.ok; ++trial) {
        SectorSeries s;
        s.sector_label = "synthetic";
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            SectorObservation obs;
            obs.period = year(2000 + i);
            for (auto& v : obs.raw) v = raw(rng);
            s.observations.push_back(obs);
        }
        const auto norm = normalize(s, NormScheme::MinMax);
        for (const double v : index_series(norm, equal_weights())) {
            c.require(v >= 0.0 && v <= 1.0 + 1e-12, "min-max index left [0, 1]");
        }
    }

    // Equal weights on identical components reproduce the component.
    std::uniform_real_distribution<double> unit_interval(0.0, 1.0);
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const double component = unit_interval(rng);
        std::array<double, kComponentCount> comps{};
        comps.fill(component);
        c.require(std::fabs(cf_index(comps, equal_weights()) - component) <= 1e-12,
                  "identical components did not reproduce the component value");
    }

    // Monotone in every positively weighted component.
    for (int i = 0; i < 1000 && c.ok; ++i) {
        std::array<double, kComponentCount> comps{};
        for (auto& v : comps) v = unit_interval(rng);
        std::uniform_int_distribution<std::size_t> pick(0, kComponentCount - 1);
        const std::size_t target = pick(rng);
        auto raised = comps;
        raised[target] += unit_interval(rng);
        c.require(cf_index(raised, equal_weights()) >= cf_index(comps, equal_weights()),
                  "raising a positively weighted component lowered the index");
    }

    // Rank-correlation endpoints.
    const std::vector<double> idx{0.2, 0.5, 0.1, 0.9, 0.7};
    std::vector<double> reversed(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) reversed[i] = -idx[i];
    c.require(validate_against_outcomes(idx, idx) == 1.0,
              "identical series did not correlate at exactly 1");
    c.require(validate_against_outcomes(idx, reversed) == -1.0,
              "reversed series did not correlate at exactly -1");

    c.finish("bounded, weight-identity, monotonicity and correlation endpoints all hold");
}

}  // namespace

int main() {
    try {
        const auto out = fresh_dir("main");
        const ReportBundle bundle = run_pipeline(fixture_config(out, true));
        std::filesystem::remove_all(out);

        criterion_1_golden_audit_rows(bundle);
        criterion_2_extended_goldens(bundle);
        criterion_3_verdicts(bundle);
        criterion_4_taint_propagation();
        criterion_5_algebraic_identities();
        criterion_6_audit_round_trip();
        criterion_7_determinism();
        criterion_8_friction_index_properties();
    } catch (const std::exception& e) {
        std::cout << "[FAIL] acceptance suite aborted: " << e.what() << "\n";
        return 1;
    }

    if (g_failures != 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
