// Command-line front end: `run` executes the full pipeline over a dataset,
// `verify` replays an existing audit log, `explain` prints the lineage of a
// single indicator. Exit codes: 0 clean, 1 audit or verification failures,
// 2 input errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ecodiag/pipeline.hpp"

namespace {

int cmd_run(const ecodiag::PipelineConfig& config) {
    const ecodiag::ReportBundle bundle = ecodiag::run_pipeline(config);
    std::cout << "sources accepted: " << bundle.sources.size() << "\n"
              << "sources rejected: " << bundle.rejected.size() << "\n"
              << "derived indicators: " << bundle.indicators.size() << "\n"
              << "audit records: " << bundle.audit.size() << "\n"
              << "hypotheses assessed: " << bundle.verdicts.size() << "\n"
              << "reports written to: " << config.out_dir.string() << "\n";
    for (const auto& r : bundle.rejected) {
        std::cout << "  rejected '" << r.id << "' at vetting step " << r.failed_step << ": "
                  << r.reason << "\n";
    }
    if (!bundle.audit_clean()) {
        std::cout << "audit mismatches:\n";
        for (const auto& rec : bundle.audit) {
            if (!rec.match) std::cout << "  " << rec.result_id << "\n";
        }
        return 1;
    }
    return 0;
}

int cmd_verify(const std::filesystem::path& log_path) {
    std::ifstream in(log_path);
    if (!in) throw ecodiag::IoError("cannot open audit log '" + log_path.string() + "'");
    const auto records = ecodiag::read_audit_log(in);
    const auto report = ecodiag::verify_audit_log(records);
    std::cout << "records: " << report.total << "\npassed: " << report.passed << "\n";
    for (const auto& id : report.failed) std::cout << "failed: " << id << "\n";
    return report.failed.empty() ? 0 : 1;
}

int cmd_explain(const std::filesystem::path& dataset_path,
                const std::filesystem::path& defs_path, const std::string& id) {
    auto candidates = ecodiag::parse_dataset_file(dataset_path);
    std::set<std::string> ids;
    for (const auto& c : candidates) ids.insert(c.value.id);
    auto defs = ecodiag::parse_indicator_defs_file(defs_path, ids);

    ecodiag::PipelineInputs inputs;
    inputs.candidates = std::move(candidates);
    inputs.definitions = std::move(defs);
    // Lineage needs no mapping or hypothesis work; run with none.
    const ecodiag::ReportBundle bundle = ecodiag::run_pipeline(inputs);

    for (const auto& sv : bundle.sources) {
        if (sv.id != id) continue;
        std::cout << id << " = " << sv.quantity << " [" << ecodiag::unit_token(sv.unit.kind)
                  << "] " << sv.period.start_year << "-" << sv.period.end_year << " ("
                  << ecodiag::status_token(sv.evidence_status) << ", " << sv.source_family
                  << ")\n  " << sv.concept_name << "\n";
        return 0;
    }
    for (const auto& rec : bundle.audit) {
        if (rec.result_id != id) continue;
        std::cout << id << " = " << rec.declared << " via "
                  << ecodiag::formula_token(rec.formula);
        if (rec.years) std::cout << " over " << *rec.years << " years";
        std::cout << "\n  boundary: " << ecodiag::boundary_token(rec.boundary)
                  << "\n  recomputed: " << rec.recomputed << " ("
                  << (rec.match ? "match" : "MISMATCH") << ")\n";
        for (const auto& in : rec.inputs) {
            std::cout << "  <- " << in.id << " = " << in.value << " ["
                      << ecodiag::unit_token(in.unit) << "] " << in.period.start_year << "-"
                      << in.period.end_year << " (" << ecodiag::status_token(in.status)
                      << ")\n";
        }
        return rec.match ? 0 : 1;
    }
    std::cerr << "no source or indicator named '" << id << "'\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reproducible diagnostic-computation engine"};
    app.require_subcommand(1);

    ecodiag::PipelineConfig config;
    std::string cf_path;
    auto* run = app.add_subcommand("run", "run the full pipeline and emit reports");
    run->add_option("--dataset", config.dataset, "dataset TSV")->required();
    run->add_option("--defs", config.definitions, "indicator definitions")->required();
    run->add_option("--rules", config.mapping_rules, "mapping rules JSON")->required();
    run->add_option("--hypotheses", config.hypotheses, "hypothesis specs JSON")->required();
    run->add_option("--out", config.out_dir, "output directory")->required();
    run->add_option("--cfindex", cf_path, "friction-index config JSON");

    std::filesystem::path log_path;
    auto* verify = app.add_subcommand("verify", "replay and re-check an audit log");
    verify->add_option("log", log_path, "audit log to verify")->required();

    std::filesystem::path expl_dataset, expl_defs;
    std::string expl_id;
    auto* explain = app.add_subcommand("explain", "print the lineage of one indicator");
    explain->add_option("id", expl_id, "source or indicator id")->required();
    explain->add_option("--dataset", expl_dataset, "dataset TSV")->required();
    explain->add_option("--defs", expl_defs, "indicator definitions")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!cf_path.empty()) config.cf_config = cf_path;
            return cmd_run(config);
        }
        if (verify->parsed()) return cmd_verify(log_path);
        if (explain->parsed()) return cmd_explain(expl_dataset, expl_defs, expl_id);
    } catch (const ecodiag::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
