#pragma once

// Action-capacity mapping and conservative hypothesis assessment. Both
// produce interpretation-class artifacts: they never enter numeric tables,
// and every entry carries an explicit boundary statement.

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ecodiag/types.hpp"

namespace ecodiag {

// ---------------------------------------------------------------------------
// Action-capacity variables
// ---------------------------------------------------------------------------

/// The nine capacity dimensions indicators can be mapped onto. These exist
/// as mapping targets only; the engine never aggregates them into a single
/// capacity figure.
enum class ActionVariable {
    HumanJudgement,      // supervision, responsibility, override
    ConventionalCapital,
    ModelCapacity,       // software-agent / model capability
    RoboticCapacity,     // cyber-physical execution
    ProtocolQuality,
    ComputeCapacity,
    EnergyAvailability,
    AuditableTrust,
    Uncertainty,         // caveats, shocks, institutional constraints
};

inline constexpr std::array<ActionVariable, 9> kActionVariables = {
    ActionVariable::HumanJudgement,   ActionVariable::ConventionalCapital,
    ActionVariable::ModelCapacity,    ActionVariable::RoboticCapacity,
    ActionVariable::ProtocolQuality,  ActionVariable::ComputeCapacity,
    ActionVariable::EnergyAvailability, ActionVariable::AuditableTrust,
    ActionVariable::Uncertainty,
};

inline std::string_view action_variable_token(ActionVariable v) {
    switch (v) {
        case ActionVariable::HumanJudgement: return "H";
        case ActionVariable::ConventionalCapital: return "K";
        case ActionVariable::ModelCapacity: return "M";
        case ActionVariable::RoboticCapacity: return "R";
        case ActionVariable::ProtocolQuality: return "P";
        case ActionVariable::ComputeCapacity: return "C";
        case ActionVariable::EnergyAvailability: return "En";
        case ActionVariable::AuditableTrust: return "T";
        case ActionVariable::Uncertainty: return "Omega";
    }
    return "Omega";
}

inline std::optional<ActionVariable> action_variable_from_token(std::string_view tok) {
    for (ActionVariable v : kActionVariables) {
        if (action_variable_token(v) == tok) return v;
    }
    return std::nullopt;
}

/// Three-level measurement ladder used in boundary statements: global
/// adoption statistics cover mostly level 1 and parts of level 2; level 3
/// needs sector data.
struct MeasurementLevel {
    int level;
    std::string_view name;
    std::string_view meaning;
};

inline std::span<const MeasurementLevel> measurement_levels() {
    static constexpr MeasurementLevel levels[] = {
        {1, "tool use", "AI assists isolated tasks in at least one business function"},
        {2, "process integration",
         "AI runs inside recurring workflows with humans directing each step"},
        {3, "delegated execution",
         "agents, robots or executable protocols prepare, execute or verify steps "
         "under logged human override"},
    };
    return levels;
}

// ---------------------------------------------------------------------------
// Mapping
// ---------------------------------------------------------------------------

/// A declarative rule: indicators whose concept (or id) contains the pattern
/// map onto the listed variables with the given boundary text.
struct MappingRule {
    std::string pattern;  // case-insensitive substring
    std::vector<ActionVariable> targets;
    std::string boundary;
};

struct MappingRuleset {
    std::vector<MappingRule> rules;
    /// Variables the current dataset cannot measure; entries targeting them
    /// are routed to the future-measurement section.
    std::set<ActionVariable> unmeasured;
    /// Projection-status indicators additionally map onto the uncertainty
    /// variable, carrying forecast caveats into the mapping table.
    bool projections_carry_uncertainty = true;
};

struct MappingEntry {
    std::string indicator_id;
    std::vector<ActionVariable> targets;
    std::string boundary_statement;
    std::size_t matched_rules = 0;   // >1 flags multiplicity
    bool future_measurement = false; // targets include an unmeasured variable
    EvidenceStatus evidence_status = EvidenceStatus::Interpretation;
};

/// Minimal indicator view the mapper needs.
struct MappingCandidate {
    std::string id;
    std::string concept_name;
    EvidenceStatus status = EvidenceStatus::Reported;
    InterpretationBoundary boundary = InterpretationBoundary::ObservedFact;
};

namespace detail {
inline std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}
}  // namespace detail

/// Applies every matching rule (union of targets) and flags multiplicity.
/// No matching rule raises UnmappedIndicator: unmapped indicators are listed,
/// never guessed.
inline MappingEntry map_indicator(const MappingCandidate& cand, const MappingRuleset& rules) {
    const std::string haystack =
        detail::lowercase(cand.concept_name) + " " + detail::lowercase(cand.id);

    MappingEntry entry;
    entry.indicator_id = cand.id;
    std::set<ActionVariable> targets;
    std::string boundary;
    for (const auto& rule : rules.rules) {
        if (rule.pattern.empty()) throw SpecError("mapping rule with empty pattern");
        if (rule.boundary.empty()) {
            throw SpecError("mapping rule '" + rule.pattern + "' lacks a boundary statement");
        }
        if (haystack.find(detail::lowercase(rule.pattern)) == std::string::npos) continue;
        ++entry.matched_rules;
        targets.insert(rule.targets.begin(), rule.targets.end());
        if (!boundary.empty()) boundary += ' ';
        boundary += rule.boundary;
    }
    if (entry.matched_rules == 0) {
        throw UnmappedIndicator("no mapping rule matches indicator '" + cand.id + "'");
    }
    const bool projected = cand.status == EvidenceStatus::Projection ||
                           cand.boundary == InterpretationBoundary::ProjectionBased;
    if (rules.projections_carry_uncertainty && projected) {
        targets.insert(ActionVariable::Uncertainty);
    }
    entry.targets.assign(targets.begin(), targets.end());
    entry.boundary_statement = boundary;
    entry.future_measurement = std::any_of(
        entry.targets.begin(), entry.targets.end(),
        [&](ActionVariable v) { return rules.unmeasured.count(v) > 0; });
    return entry;
}

struct MappingResult {
    std::vector<MappingEntry> entries;
    std::vector<std::string> unmapped;  // exhaustive: |entries| + |unmapped| = inputs
};

inline MappingResult map_all(std::span<const MappingCandidate> candidates,
                             const MappingRuleset& rules) {
    MappingResult out;
    for (const auto& cand : candidates) {
        try {
            out.entries.push_back(map_indicator(cand, rules));
        } catch (const UnmappedIndicator&) {
            out.unmapped.push_back(cand.id);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hypothesis assessment
// ---------------------------------------------------------------------------

enum class ClaimKind { Empirical, Conceptual };

/// Verdict a hypothesis downgrades to when its required evidence is
/// projection-derived; assigned case by case in the hypothesis spec.
enum class ProjectionSensitivity { UnderProjection, WithCaution };

enum class Verdict {
    Supported,
    SupportedUnderProjection,
    SupportedWithCaution,
    SupportedAsConceptualProposition,
    NotEstablished,
};

inline std::string_view verdict_token(Verdict v) {
    switch (v) {
        case Verdict::Supported: return "Supported";
        case Verdict::SupportedUnderProjection: return "SupportedUnderProjection";
        case Verdict::SupportedWithCaution: return "SupportedWithCaution";
        case Verdict::SupportedAsConceptualProposition:
            return "SupportedAsConceptualProposition";
        case Verdict::NotEstablished: return "NotEstablished";
    }
    return "NotEstablished";
}

struct HypothesisSpec {
    std::string id;
    ClaimKind kind = ClaimKind::Empirical;
    std::vector<std::string> required;  // indicator ids; convergence set for conceptual claims
    ProjectionSensitivity sensitivity = ProjectionSensitivity::UnderProjection;
    std::string boundary;
};

/// Evidence the assessor sees for one indicator id.
struct EvidenceItem {
    std::string id;
    EvidenceStatus status = EvidenceStatus::Reported;
    InterpretationBoundary boundary = InterpretationBoundary::ObservedFact;
    bool audit_ok = true;  // false when the audit record is missing or mismatched
};

struct HypothesisAssessment {
    std::string id;
    ClaimKind kind = ClaimKind::Empirical;
    Verdict verdict = Verdict::NotEstablished;
    std::vector<std::string> evidence_ids;
    std::set<EvidenceStatus> classes_present;
    std::string boundary_statement;
    std::string note;  // which condition drove the verdict
    EvidenceStatus evidence_status = EvidenceStatus::Interpretation;
};

/// Conservative support rule. Full support needs every required indicator
/// present, verifiable, reported-derived and an explicit boundary statement;
/// projection-derived evidence downgrades per the declared sensitivity;
/// conceptual claims are never more than conceptually supported; anything
/// missing or unverifiable is not established.
inline HypothesisAssessment assess(const HypothesisSpec& spec,
                                   std::span<const EvidenceItem> available) {
    if (spec.required.empty()) {
        throw SpecError("hypothesis '" + spec.id + "' declares no required indicators");
    }

    HypothesisAssessment out;
    out.id = spec.id;
    out.kind = spec.kind;
    out.boundary_statement = spec.boundary;
    out.evidence_ids = spec.required;

    bool tainted = false;
    for (const auto& req : spec.required) {
        const EvidenceItem* found = nullptr;
        for (const auto& item : available) {
            if (item.id == req) {
                found = &item;
                break;
            }
        }
        if (found == nullptr) {
            out.verdict = Verdict::NotEstablished;
            out.note = "required indicator '" + req + "' missing";
            return out;
        }
        if (!found->audit_ok) {
            out.verdict = Verdict::NotEstablished;
            out.note = "required indicator '" + req + "' failed audit";
            return out;
        }
        out.classes_present.insert(found->status);
        if (found->status == EvidenceStatus::Projection ||
            found->boundary == InterpretationBoundary::ProjectionBased) {
            tainted = true;
        }
    }

    if (spec.kind == ClaimKind::Conceptual) {
        out.verdict = Verdict::SupportedAsConceptualProposition;
        out.note = "conceptual claim; convergence evidence present";
        return out;
    }
    if (tainted) {
        out.verdict = spec.sensitivity == ProjectionSensitivity::UnderProjection
                          ? Verdict::SupportedUnderProjection
                          : Verdict::SupportedWithCaution;
        out.note = "required evidence is projection-derived";
        return out;
    }
    if (spec.boundary.empty()) {
        // Support may only be claimed with the boundary explicitly stated.
        out.verdict = Verdict::SupportedWithCaution;
        out.note = "boundary statement missing; support qualified";
        return out;
    }
    out.verdict = Verdict::Supported;
    out.note = "all required evidence reported-derived and verified";
    return out;
}

}  // namespace ecodiag
