#pragma once

// Foundational value types for the diagnostic engine: units, periods,
// evidence classes, provenance-tagged source values and derived indicators.
// Everything here is an immutable value type; all invariant checks throw
// a subclass of ecodiag::Error.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecodiag {

inline constexpr std::string_view kEngineVersion = "ecodiag/1.0.0";

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mixed unit kinds where a single kind is required.
class UnitError : public Error { public: using Error::Error; };

/// Value outside the operation's numeric domain (non-positive base, negative
/// member, non-finite input).
class DomainError : public Error { public: using Error::Error; };

/// Invalid or zero-length growth horizon.
class PeriodError : public Error { public: using Error::Error; };

/// Division by a zero base or zero flow.
class DivisionByZeroBase : public Error { public: using Error::Error; };

/// Share group whose member values sum to zero.
class EmptyDenominator : public Error { public: using Error::Error; };

/// Share vector violating its sum invariant.
class MalformedShares : public Error { public: using Error::Error; };

/// Value descriptor too ambiguous to classify; the engine never guesses.
class ClassificationError : public Error { public: using Error::Error; };

/// Indicator input id that cannot be resolved to a vetted source.
class LineageError : public Error { public: using Error::Error; };

/// Indicator matched by no mapping rule.
class UnmappedIndicator : public Error { public: using Error::Error; };

/// Malformed hypothesis or mapping configuration.
class SpecError : public Error { public: using Error::Error; };

/// Observation missing one of the required friction components.
class IncompleteObservation : public Error { public: using Error::Error; };

/// Weight vector violating nonnegativity or the unit-sum constraint.
class WeightError : public Error { public: using Error::Error; };

/// Zero-variance component under z-score normalization.
class DegenerateVariance : public Error { public: using Error::Error; };

/// Index and outcome series that cannot be aligned.
class AlignmentError : public Error { public: using Error::Error; };

/// Duplicate record or definition id.
class DuplicateIdError : public Error { public: using Error::Error; };

/// Filesystem failure while reading inputs or writing reports.
class IoError : public Error { public: using Error::Error; };

/// Dataset parse failure; carries the offending line and column.
class IngestError : public Error {
public:
    IngestError(std::size_t line, std::size_t column, const std::string& what)
        : Error("ingest error at line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Indicator-definition grammar violation; carries the position.
class DefinitionParseError : public Error {
public:
    DefinitionParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("definition error at line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

/// Unit kinds carried by every source value and derived indicator.
/// Percent quantities are stored as reported (20.0 means 20.0%), never
/// rescaled to fractions; fractions use Dimensionless.
enum class UnitKind {
    Percent,
    PercentagePoint,
    CurrencyBillion,
    PhysicalUnits,
    EnergyTWh,
    JobsMillion,
    Ratio,
    Dimensionless,
};

struct Unit {
    UnitKind kind = UnitKind::Dimensionless;
    std::string label;

    friend bool operator==(const Unit&, const Unit&) = default;
};

inline std::string_view unit_token(UnitKind k) {
    switch (k) {
        case UnitKind::Percent: return "percent";
        case UnitKind::PercentagePoint: return "pp";
        case UnitKind::CurrencyBillion: return "usd_billion";
        case UnitKind::PhysicalUnits: return "units";
        case UnitKind::EnergyTWh: return "twh";
        case UnitKind::JobsMillion: return "jobs_million";
        case UnitKind::Ratio: return "ratio";
        case UnitKind::Dimensionless: return "dimensionless";
    }
    return "dimensionless";
}

inline std::optional<UnitKind> unit_kind_from_token(std::string_view tok) {
    if (tok == "percent") return UnitKind::Percent;
    if (tok == "pp") return UnitKind::PercentagePoint;
    if (tok == "usd_billion") return UnitKind::CurrencyBillion;
    if (tok == "units") return UnitKind::PhysicalUnits;
    if (tok == "twh") return UnitKind::EnergyTWh;
    if (tok == "jobs_million") return UnitKind::JobsMillion;
    if (tok == "ratio") return UnitKind::Ratio;
    if (tok == "dimensionless") return UnitKind::Dimensionless;
    return std::nullopt;
}

/// Display label used by the report layer.
inline std::string_view unit_display(UnitKind k) {
    switch (k) {
        case UnitKind::Percent: return "%";
        case UnitKind::PercentagePoint: return "pp";
        case UnitKind::CurrencyBillion: return "USDbn";
        case UnitKind::PhysicalUnits: return "units";
        case UnitKind::EnergyTWh: return "TWh";
        case UnitKind::JobsMillion: return "million";
        case UnitKind::Ratio: return "x";
        case UnitKind::Dimensionless: return "";
    }
    return "";
}

inline Unit make_unit(UnitKind k) { return Unit{k, std::string(unit_display(k))}; }

// ---------------------------------------------------------------------------
// Periods
// ---------------------------------------------------------------------------

/// Calendar span; point-in-time values have start_year == end_year.
struct Period {
    int start_year = 0;
    int end_year = 0;

    int span_years() const noexcept { return end_year - start_year; }
    bool valid() const noexcept { return start_year <= end_year; }
    bool point() const noexcept { return start_year == end_year; }

    friend bool operator==(const Period&, const Period&) = default;
};

inline Period year(int y) { return Period{y, y}; }

inline Period make_period(int start, int end) {
    if (start > end) {
        throw PeriodError("period start " + std::to_string(start) +
                          " is after end " + std::to_string(end));
    }
    return Period{start, end};
}

// ---------------------------------------------------------------------------
// Evidence classes and interpretation boundaries
// ---------------------------------------------------------------------------

/// Four-way evidence classification. Calculated is assignable only by the
/// engine; Interpretation is reserved for narrative artifacts (mapping
/// entries, verdicts), never for numeric values.
enum class EvidenceStatus {
    Reported,
    Projection,
    Calculated,
    Interpretation,
};

inline std::string_view status_token(EvidenceStatus s) {
    switch (s) {
        case EvidenceStatus::Reported: return "reported";
        case EvidenceStatus::Projection: return "projection";
        case EvidenceStatus::Calculated: return "calculated";
        case EvidenceStatus::Interpretation: return "interpretation";
    }
    return "reported";
}

inline std::optional<EvidenceStatus> status_from_token(std::string_view tok) {
    if (tok == "reported") return EvidenceStatus::Reported;
    if (tok == "projection") return EvidenceStatus::Projection;
    if (tok == "calculated") return EvidenceStatus::Calculated;
    if (tok == "interpretation") return EvidenceStatus::Interpretation;
    return std::nullopt;
}

/// Mandatory qualifier on every derived result.
enum class InterpretationBoundary {
    ObservedFact,
    ProjectionBased,
    ScaleComparison,
};

inline std::string_view boundary_token(InterpretationBoundary b) {
    switch (b) {
        case InterpretationBoundary::ObservedFact: return "observed_fact";
        case InterpretationBoundary::ProjectionBased: return "projection_based";
        case InterpretationBoundary::ScaleComparison: return "scale_comparison";
    }
    return "observed_fact";
}

inline std::optional<InterpretationBoundary> boundary_from_token(std::string_view tok) {
    if (tok == "observed_fact") return InterpretationBoundary::ObservedFact;
    if (tok == "projection_based") return InterpretationBoundary::ProjectionBased;
    if (tok == "scale_comparison") return InterpretationBoundary::ScaleComparison;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Denominator scopes for concentration work
// ---------------------------------------------------------------------------

/// Declared boundary of a share denominator. A concentration figure is only
/// interpretable within its declared scope.
enum class GroupScope {
    Global,
    Regional,
    Sectoral,
    ReportedComparison,
};

inline std::string_view scope_token(GroupScope s) {
    switch (s) {
        case GroupScope::Global: return "global";
        case GroupScope::Regional: return "regional";
        case GroupScope::Sectoral: return "sectoral";
        case GroupScope::ReportedComparison: return "reported_comparison";
    }
    return "reported_comparison";
}

inline std::optional<GroupScope> scope_from_token(std::string_view tok) {
    if (tok == "global") return GroupScope::Global;
    if (tok == "regional") return GroupScope::Regional;
    if (tok == "sectoral") return GroupScope::Sectoral;
    if (tok == "reported_comparison" || tok == "reported") return GroupScope::ReportedComparison;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Formula identifiers
// ---------------------------------------------------------------------------

/// Every derived indicator is bound to exactly one of these formulas.
/// Tokens are the spellings used by the indicator-definition grammar.
enum class FormulaId {
    AbsoluteChange,           // ABS   xt - x0
    PercentagePointChange,    // PP    xt - x0, percent inputs only
    RelativeChange,           // REL   (xt - x0) / x0
    CompoundAnnualGrowth,     // CAGR  (xt/x0)^(1/n) - 1
    GrowthMultiplier,         // MULT  xt / x0
    ScaleRatio,               // SCALE xi / xref
    GroupShare,               // SHARE first member / group sum
    ConcentrationIndex,       // HHI   sum of squared normalized shares
    ConcentrationIndexPct,    // HHI_PCT squared pre-rounded percentages
    StockFlowRatio,           // SFR   stock / installations
    InstallationShare,        // AIS   installations / stock
    DemandMultiplier,         // DCM   energy-demand growth multiplier
    NewToDisplacedRatio,      // NDR   new / displaced
    DisplacementShare,        // DRN   displaced / new
    NetRoleChange,            // NET   new - displaced
    NetGainShare,             // NGR   1 - displaced / new
    FrictionIndex,            // CFINDEX weighted sum of normalized components
};

// ---------------------------------------------------------------------------
// Source values and derived indicators
// ---------------------------------------------------------------------------

/// A provenance-tagged institutional statistic as accepted at ingestion.
struct SourceValue {
    std::string id;
    std::string concept_name;
    double quantity = 0.0;
    Unit unit;
    Period period;
    std::string source_family;
    EvidenceStatus evidence_status = EvidenceStatus::Reported;
    std::string notes;
    bool over_100_allowed = false;  // relative-change style percents may exceed 100
};

/// Throws unless the value satisfies the ingestion invariants.
inline void validate(const SourceValue& v) {
    if (!std::isfinite(v.quantity)) {
        throw DomainError("source value '" + v.id + "' has non-finite quantity");
    }
    if (v.evidence_status != EvidenceStatus::Reported &&
        v.evidence_status != EvidenceStatus::Projection) {
        throw ClassificationError("source value '" + v.id +
                                  "' must be reported or projection at ingestion");
    }
    if (!v.period.valid()) {
        throw PeriodError("source value '" + v.id + "' has an inverted period");
    }
    if (v.unit.kind == UnitKind::Percent && !v.over_100_allowed &&
        (v.quantity < 0.0 || v.quantity > 100.0)) {
        throw DomainError("source value '" + v.id +
                          "' is a percent outside [0, 100] without an over-100 flag");
    }
}

/// An engine-calculated value bound to its formula and ordered inputs.
/// Re-evaluating the formula over the inputs reproduces quantity exactly.
struct DerivedIndicator {
    std::string id;
    std::string concept_name;
    FormulaId formula = FormulaId::AbsoluteChange;
    std::vector<std::string> inputs;      // source ids, ordered
    std::optional<int> years;             // resolved growth horizon (CAGR only)
    double quantity = 0.0;
    Unit unit;
    EvidenceStatus evidence_status = EvidenceStatus::Calculated;
    InterpretationBoundary boundary = InterpretationBoundary::ObservedFact;
    std::optional<GroupScope> scope;      // share / HHI indicators only
};

}  // namespace ecodiag
