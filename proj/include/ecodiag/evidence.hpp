#pragma once

// Source vetting and evidence-status classification. Vetting is a filter
// with recorded rejection reasons, not an error path; classification never
// guesses.

#include <cmath>
#include <optional>
#include <string>

#include "ecodiag/types.hpp"

namespace ecodiag {

/// A value as proposed at ingestion, before vetting. The flags are fixed when
/// the candidate is built and never revised afterwards. Numeric candidates
/// admit only reported or projection status; interpretation-class numbers are
/// structurally impossible as inputs.
struct CandidateSource {
    SourceValue value;
    bool has_numeric_value = true;
    bool requires_unsupported_assumption = false;
    bool domain_relevant = true;
};

struct VetRejection {
    std::string id;
    int failed_step = 0;  // vetting step that rejected the candidate
    std::string reason;
};

struct VetOutcome {
    std::optional<SourceValue> accepted;
    std::optional<VetRejection> rejection;

    bool ok() const noexcept { return accepted.has_value(); }
};

/// Four-step vetting: (1) an explicit numeric value in one of the covered
/// domains, (3) no unsupported assumption or undocumented conversion,
/// (4) a recordable unit, period and status. Step 2, the evidence-class
/// split, happens at classification. Rejection is a normal outcome.
inline VetOutcome vet_source(const CandidateSource& c) {
    if (!c.has_numeric_value || !std::isfinite(c.value.quantity)) {
        return {std::nullopt,
                VetRejection{c.value.id, 1, "no explicit numeric value"}};
    }
    if (!c.domain_relevant) {
        return {std::nullopt,
                VetRejection{c.value.id, 1, "outside the covered domains"}};
    }
    if (c.requires_unsupported_assumption) {
        return {std::nullopt,
                VetRejection{c.value.id, 3,
                             "requires an unsupported assumption or undocumented conversion"}};
    }
    try {
        validate(c.value);
    } catch (const Error& e) {
        return {std::nullopt, VetRejection{c.value.id, 4, e.what()}};
    }
    return {c.value, std::nullopt};
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class TemporalBasis {
    RealisedReported,  // past or current value stated by the source
    FutureScenario,    // forward-looking value under stated assumptions
    Unspecified,
};

struct ValueDescriptor {
    TemporalBasis temporal = TemporalBasis::Unspecified;
    bool engine_derived = false;
    bool narrative_artifact = false;
};

/// Evidence-status assignment. Engine outputs are calculated; narrative
/// artifacts are interpretation; source values split by temporal basis.
/// An unspecified basis raises ClassificationError rather than guessing.
inline EvidenceStatus classify(const ValueDescriptor& d) {
    if (d.narrative_artifact) return EvidenceStatus::Interpretation;
    if (d.engine_derived) return EvidenceStatus::Calculated;
    switch (d.temporal) {
        case TemporalBasis::RealisedReported: return EvidenceStatus::Reported;
        case TemporalBasis::FutureScenario: return EvidenceStatus::Projection;
        case TemporalBasis::Unspecified: break;
    }
    throw ClassificationError("temporal basis unspecified; refusing to guess");
}

}  // namespace ecodiag
