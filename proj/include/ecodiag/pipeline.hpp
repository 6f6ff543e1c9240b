#pragma once

// End-to-end runner: ingest -> vet -> classify -> compute -> audit -> map ->
// assess -> report. Deterministic by construction: identical inputs produce
// byte-identical report bodies (fixed orderings, fixed rounding, no
// timestamps).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecodiag/audit.hpp"
#include "ecodiag/cfindex.hpp"
#include "ecodiag/evidence.hpp"
#include "ecodiag/formula.hpp"
#include "ecodiag/framework.hpp"
#include "ecodiag/ingest.hpp"
#include "ecodiag/types.hpp"

namespace ecodiag {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Rounding applied per table at emission time; working precision is always
/// binary64. Percent-presented and ratio-presented values get two decimals,
/// concentration indices four, matching the bundled report conventions.
struct ReportPrecision {
    int percent = 2;
    int ratio = 2;
    int index = 4;
};

struct PipelineConfig {
    std::filesystem::path dataset;
    std::filesystem::path definitions;
    std::filesystem::path mapping_rules;
    std::filesystem::path hypotheses;
    std::optional<std::filesystem::path> cf_config;
    std::filesystem::path out_dir;
    ReportPrecision precision;
};

/// Fully parsed inputs for an in-memory run.
struct PipelineInputs {
    std::vector<CandidateSource> candidates;
    std::vector<IndicatorDef> definitions;
    MappingRuleset rules;
    std::vector<HypothesisSpec> hypotheses;
    std::optional<NormScheme> cf_normalization;
    std::optional<CfWeights> cf_weights;
    std::vector<SectorSeries> cf_sectors;
};

// ---------------------------------------------------------------------------
// Bundle
// ---------------------------------------------------------------------------

struct CfSectorResult {
    std::string sector;
    std::string data_label;
    NormScheme normalization = NormScheme::MinMax;
    WeightScheme scheme = WeightScheme::Equal;
    std::vector<DerivedIndicator> indicators;  // one per period
    std::vector<double> outcomes;              // aligned when present
    std::optional<double> outcome_correlation; // needs >= 3 aligned points
    std::vector<ComponentKind> degenerate;     // flattened-range warnings
};

struct ReportBundle {
    std::vector<SourceValue> sources;
    std::vector<VetRejection> rejected;
    std::vector<DerivedIndicator> indicators;
    std::vector<AuditRecord> audit;
    MappingResult mapping;
    std::vector<HypothesisAssessment> verdicts;
    std::set<ActionVariable> unmeasured;
    std::vector<CfSectorResult> cf_sectors;

    bool audit_clean() const {
        for (const auto& rec : audit) {
            if (!rec.match) return false;
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

namespace detail {

inline std::string synthesize_concept(const IndicatorDef& def,
                                      const std::map<std::string, SourceValue>& sources) {
    std::string concept_name{formula_info(def.formula).describes};
    for (std::size_t i = 0; i < def.inputs.size(); ++i) {
        concept_name += i == 0 ? " " : " / ";
        concept_name += sources.at(def.inputs[i]).concept_name;
    }
    return concept_name;
}

inline std::vector<AuditInput> cf_audit_inputs(const std::string& prefix, int obs_year,
                                               const std::array<double, kComponentCount>& row,
                                               const CfWeights& weights) {
    std::vector<AuditInput> ins;
    ins.reserve(2 * kComponentCount);
    for (std::size_t c = 0; c < kComponentCount; ++c) {
        ins.push_back(AuditInput{prefix + ":" + std::string(component_token(kComponentKinds[c])),
                                 row[c], UnitKind::Dimensionless, year(obs_year),
                                 EvidenceStatus::Calculated});
    }
    for (std::size_t c = 0; c < kComponentCount; ++c) {
        ins.push_back(AuditInput{"w:" + std::string(component_token(kComponentKinds[c])),
                                 weights.w[c], UnitKind::Dimensionless, year(obs_year),
                                 EvidenceStatus::Calculated});
    }
    return ins;
}

}  // namespace detail

inline ReportBundle run_pipeline(const PipelineInputs& in) {
    ReportBundle bundle;
    AuditLog log;

    // Vet every candidate; rejections are recorded, never silently dropped.
    std::map<std::string, SourceValue> accepted;
    std::set<std::string> rejected_ids;
    for (const auto& cand : in.candidates) {
        VetOutcome outcome = vet_source(cand);
        if (outcome.ok()) {
            if (!accepted.emplace(outcome.accepted->id, *outcome.accepted).second) {
                throw DuplicateIdError("duplicate source id '" + outcome.accepted->id + "'");
            }
            bundle.sources.push_back(*outcome.accepted);
        } else {
            rejected_ids.insert(outcome.rejection->id);
            bundle.rejected.push_back(*outcome.rejection);
        }
    }

    // Compute derived indicators in definition order. Nothing may be computed
    // from a source that failed vetting.
    for (const auto& def : in.definitions) {
        std::vector<EvalInput> ins;
        ins.reserve(def.inputs.size());
        for (const auto& input_id : def.inputs) {
            if (rejected_ids.count(input_id)) {
                throw LineageError("definition '" + def.id + "' uses '" + input_id +
                                   "', which failed vetting");
            }
            const auto it = accepted.find(input_id);
            if (it == accepted.end()) {
                throw LineageError("definition '" + def.id + "' uses unknown input '" +
                                   input_id + "'");
            }
            const SourceValue& sv = it->second;
            ins.push_back(EvalInput{sv.id, sv.quantity, sv.unit.kind, sv.period,
                                    sv.evidence_status});
        }

        DerivedIndicator d;
        d.id = def.id;
        d.formula = def.formula;
        d.inputs = def.inputs;
        d.scope = def.scope;
        if (def.formula == FormulaId::CompoundAnnualGrowth) {
            d.years = def.years ? def.years
                                : std::optional<int>(detail::resolve_years(ins, std::nullopt));
        }
        d.quantity = evaluate_formula(def.formula, ins, d.years);
        d.unit = make_unit(result_unit(def.formula, ins));
        d.boundary = result_boundary(def.formula, ins);
        d.concept_name = detail::synthesize_concept(def, accepted);

        log.append(record_audit(
            d, [&](const std::string& id) -> const SourceValue* {
                const auto sit = accepted.find(id);
                return sit == accepted.end() ? nullptr : &sit->second;
            }));
        bundle.indicators.push_back(std::move(d));
    }

    // Friction-index series over synthetic sector records, when configured.
    if (!in.cf_sectors.empty()) {
        const NormScheme scheme = in.cf_normalization.value_or(NormScheme::MinMax);
        const CfWeights weights = in.cf_weights.value_or(equal_weights());
        weights.validate();
        for (const auto& sector : in.cf_sectors) {
            NormalizedSeries norm = normalize(sector, scheme);
            CfSectorResult result;
            result.sector = norm.sector_label;
            result.data_label = norm.data_label;
            result.normalization = scheme;
            result.scheme = weights.scheme;
            result.degenerate = norm.degenerate;
            result.outcomes = norm.outcomes;
            for (std::size_t i = 0; i < norm.values.size(); ++i) {
                DerivedIndicator d;
                d.id = "cf_" + result.sector + "_" +
                       std::to_string(norm.periods[i].start_year);
                d.concept_name = "coordination-friction index of " + result.sector + " (" +
                            result.data_label + " data)";
                d.formula = FormulaId::FrictionIndex;
                d.quantity = cf_index(norm.values[i], weights);
                d.unit = make_unit(UnitKind::Dimensionless);
                d.boundary = InterpretationBoundary::ProjectionBased;  // never an observed fact
                auto ins = detail::cf_audit_inputs(d.id, norm.periods[i].start_year,
                                                   norm.values[i], weights);
                for (const auto& input : ins) d.inputs.push_back(input.id);
                log.append(record_audit(d, std::move(ins)));
                result.indicators.push_back(std::move(d));
            }
            if (result.outcomes.size() >= 3) {
                std::vector<double> idx;
                idx.reserve(result.indicators.size());
                for (const auto& d : result.indicators) idx.push_back(d.quantity);
                result.outcome_correlation = validate_against_outcomes(idx, result.outcomes);
            }
            bundle.cf_sectors.push_back(std::move(result));
        }
    }

    // Map sources and derived indicators onto the capacity framework.
    std::vector<MappingCandidate> to_map;
    for (const auto& sv : bundle.sources) {
        to_map.push_back({sv.id, sv.concept_name, sv.evidence_status,
                          InterpretationBoundary::ObservedFact});
    }
    for (const auto& d : bundle.indicators) {
        to_map.push_back({d.id, d.concept_name, d.evidence_status, d.boundary});
    }
    bundle.mapping = map_all(to_map, in.rules);
    bundle.unmeasured = in.rules.unmeasured;

    // Assess hypotheses against everything available, with audit status.
    std::map<std::string, bool> audit_ok;
    for (const auto& rec : log.records()) audit_ok[rec.result_id] = rec.match;
    std::vector<EvidenceItem> evidence;
    for (const auto& sv : bundle.sources) {
        evidence.push_back({sv.id, sv.evidence_status,
                            sv.evidence_status == EvidenceStatus::Projection
                                ? InterpretationBoundary::ProjectionBased
                                : InterpretationBoundary::ObservedFact,
                            true});
    }
    for (const auto& d : bundle.indicators) {
        evidence.push_back({d.id, d.evidence_status, d.boundary, audit_ok[d.id]});
    }
    for (const auto& spec : in.hypotheses) {
        bundle.verdicts.push_back(assess(spec, evidence));
    }

    bundle.audit = log.records();
    return bundle;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_fixed(double v, int decimals) {
    if (v == 0.0) v = 0.0;  // fold negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

enum class Presentation { PercentFraction, RatioX, IndexRaw, Plain };

inline Presentation presentation(const DerivedIndicator& d) {
    switch (d.formula) {
        case FormulaId::RelativeChange:
        case FormulaId::CompoundAnnualGrowth:
        case FormulaId::InstallationShare:
        case FormulaId::DisplacementShare:
        case FormulaId::NetGainShare:
        case FormulaId::GroupShare:
            return Presentation::PercentFraction;
        case FormulaId::GrowthMultiplier:
        case FormulaId::DemandMultiplier:
        case FormulaId::StockFlowRatio:
        case FormulaId::NewToDisplacedRatio:
            return Presentation::RatioX;
        case FormulaId::ScaleRatio:
            // Sub-unit scale ratios read as percentages, multiples as "x".
            return d.quantity < 1.0 ? Presentation::PercentFraction : Presentation::RatioX;
        case FormulaId::ConcentrationIndex:
        case FormulaId::ConcentrationIndexPct:
        case FormulaId::FrictionIndex:
            return Presentation::IndexRaw;
        case FormulaId::AbsoluteChange:
        case FormulaId::PercentagePointChange:
        case FormulaId::NetRoleChange:
            return Presentation::Plain;
    }
    return Presentation::Plain;
}

struct PresentedValue {
    std::string value;
    std::string unit;
};

inline PresentedValue present(const DerivedIndicator& d, const ReportPrecision& prec) {
    switch (presentation(d)) {
        case Presentation::PercentFraction:
            return {format_fixed(d.quantity * 100.0, prec.percent), "%"};
        case Presentation::RatioX:
            return {format_fixed(d.quantity, prec.ratio), "x"};
        case Presentation::IndexRaw:
            return {format_fixed(d.quantity, prec.index), ""};
        case Presentation::Plain:
            return {format_fixed(d.quantity, prec.ratio),
                    std::string(unit_display(d.unit.kind))};
    }
    return {format_fixed(d.quantity, prec.ratio), ""};
}

inline std::string join(const std::vector<std::string>& parts, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::ofstream open_report(const std::filesystem::path& dir, std::string_view name) {
    std::ofstream out(dir / std::string(name), std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + (dir / std::string(name)).string() + "'");
    }
    return out;
}

}  // namespace detail

/// Writes the fixed-name report files. Interpretation text appears only in
/// the mapping and hypothesis tables; every number in every table carries the
/// id of its audit record.
inline void emit_reports(const ReportBundle& bundle, const std::filesystem::path& dir,
                         const ReportPrecision& prec = {}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");

    {
        auto out = detail::open_report(dir, "indicators.tsv");
        out << "id\tformula\tinputs\tvalue\tunit\tstatus\tboundary\taudit_ref\n";
        for (const auto& d : bundle.indicators) {
            const auto p = detail::present(d, prec);
            out << d.id << '\t' << formula_token(d.formula) << '\t' << detail::join(d.inputs)
                << '\t' << p.value << '\t' << p.unit << '\t'
                << status_token(d.evidence_status) << '\t' << boundary_token(d.boundary)
                << '\t' << d.id << '\n';
        }
    }
    {
        auto out = detail::open_report(dir, "concentration.tsv");
        out << "id\tkind\tscope\tgroup\tvalue\tunit\tboundary_statement\taudit_ref\n";
        for (const auto& d : bundle.indicators) {
            const bool is_share = d.formula == FormulaId::GroupShare;
            const bool is_index = d.formula == FormulaId::ConcentrationIndex ||
                                  d.formula == FormulaId::ConcentrationIndexPct;
            if (!is_share && !is_index) continue;
            const GroupScope scope = d.scope.value_or(GroupScope::ReportedComparison);
            const auto p = detail::present(d, prec);
            out << d.id << '\t' << (is_share ? "share" : "hhi") << '\t' << scope_token(scope)
                << '\t' << detail::join(d.inputs) << '\t' << p.value << '\t' << p.unit << '\t'
                << denominator_statement(scope, detail::join(d.inputs)) << '\t' << d.id
                << '\n';
        }
    }
    {
        auto out = detail::open_report(dir, "hypotheses.tsv");
        out << "id\tkind\tverdict\tevidence\tclasses_present\tboundary_statement\n";
        for (const auto& h : bundle.verdicts) {
            std::vector<std::string> classes;
            for (const auto s : h.classes_present) classes.emplace_back(status_token(s));
            out << h.id << '\t' << (h.kind == ClaimKind::Empirical ? "empirical" : "conceptual")
                << '\t' << verdict_token(h.verdict) << '\t' << detail::join(h.evidence_ids)
                << '\t' << detail::join(classes) << '\t' << h.boundary_statement << '\n';
        }
    }
    {
        auto out = detail::open_report(dir, "mapping.tsv");
        out << "entry\tid\ttargets\tmatched_rules\tfuture_measurement\tboundary_statement\n";
        for (const auto& e : bundle.mapping.entries) {
            std::vector<std::string> targets;
            for (const auto v : e.targets) targets.emplace_back(action_variable_token(v));
            out << "mapping\t" << e.indicator_id << '\t' << detail::join(targets) << '\t'
                << e.matched_rules << '\t' << (e.future_measurement ? "yes" : "no") << '\t'
                << e.boundary_statement << '\n';
        }
        for (const auto& id : bundle.mapping.unmapped) {
            out << "unmapped\t" << id << "\t\t0\tno\tno rule matched; listed, not guessed\n";
        }
        for (const auto v : bundle.unmeasured) {
            out << "unmeasured\t" << action_variable_token(v)
                << "\t\t0\tyes\tnot directly measured in this dataset; requires "
                   "sector-level records\n";
        }
        if (!bundle.unmeasured.empty()) {
            for (const auto& t : future_indicator_templates()) {
                out << "future_indicator\t" << t.name << '\t'
                    << component_token(t.extends) << "\t0\tyes\t" << t.definition << '\n';
            }
        }
    }
    {
        auto out = detail::open_report(dir, "audit.log");
        write_audit_log(out, bundle.audit);
    }
    if (!bundle.cf_sectors.empty()) {
        auto out = detail::open_report(dir, "cfindex.tsv");
        out << "sector\tyear\tindex\toutcome\tdata_label\tweights\tnormalization\t"
               "rank_correlation\tdegenerate_components\taudit_ref\n";
        for (const auto& s : bundle.cf_sectors) {
            std::vector<std::string> degenerate;
            for (const auto k : s.degenerate) degenerate.emplace_back(component_token(k));
            for (std::size_t i = 0; i < s.indicators.size(); ++i) {
                const auto& d = s.indicators[i];
                out << s.sector << '\t'
                    << (d.id.substr(d.id.rfind('_') + 1)) << '\t'
                    << detail::format_fixed(d.quantity, prec.index) << '\t'
                    << (i < s.outcomes.size() ? detail::format_fixed(s.outcomes[i], prec.index)
                                              : std::string())
                    << '\t' << s.data_label << '\t' << weight_scheme_token(s.scheme) << '\t'
                    << norm_scheme_token(s.normalization) << '\t'
                    << (s.outcome_correlation
                            ? detail::format_fixed(*s.outcome_correlation, prec.index)
                            : std::string())
                    << '\t' << detail::join(degenerate) << '\t' << d.id << '\n';
            }
        }
    }
}

// ---------------------------------------------------------------------------
// File-level entry point
// ---------------------------------------------------------------------------

/// Loads every referenced input. All paths must resolve before any work
/// starts.
inline PipelineInputs load_inputs(const PipelineConfig& config) {
    const std::filesystem::path required[] = {config.dataset, config.definitions,
                                              config.mapping_rules, config.hypotheses};
    for (const auto& p : required) {
        if (!std::filesystem::exists(p)) {
            throw IoError("input path '" + p.string() + "' does not exist");
        }
    }
    if (config.cf_config && !std::filesystem::exists(*config.cf_config)) {
        throw IoError("input path '" + config.cf_config->string() + "' does not exist");
    }

    PipelineInputs in;
    in.candidates = parse_dataset_file(config.dataset);
    std::set<std::string> ids;
    for (const auto& c : in.candidates) ids.insert(c.value.id);
    in.definitions = parse_indicator_defs_file(config.definitions, ids);
    in.rules = parse_mapping_rules_file(config.mapping_rules);
    in.hypotheses = parse_hypotheses_file(config.hypotheses);
    if (config.cf_config) {
        const CfConfig cf = parse_cf_config_file(*config.cf_config);
        in.cf_normalization = cf.normalization;
        in.cf_weights = cf.weights;
        for (const auto& path : cf.sector_files) {
            if (!std::filesystem::exists(path)) {
                throw IoError("sector file '" + path.string() + "' does not exist");
            }
            std::ifstream sect(path);
            if (!sect) throw IoError("cannot open sector file '" + path.string() + "'");
            in.cf_sectors.push_back(parse_sector_series(sect, path.stem().string()));
        }
    }
    return in;
}

inline ReportBundle run_pipeline(const PipelineConfig& config) {
    const PipelineInputs in = load_inputs(config);
    ReportBundle bundle = run_pipeline(in);
    emit_reports(bundle, config.out_dir, config.precision);
    return bundle;
}

}  // namespace ecodiag
