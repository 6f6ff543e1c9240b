#pragma once

// Formula registry and evaluator. One evaluation routine backs both the
// pipeline computation and the audit recomputation so that re-running a
// formula over its recorded inputs reproduces the output bit for bit.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecodiag/concentration.hpp"
#include "ecodiag/domain_metrics.hpp"
#include "ecodiag/transforms.hpp"
#include "ecodiag/types.hpp"

namespace ecodiag {

/// One resolved input to a formula evaluation: the snapshot of a source
/// value (or, for the friction index, a component or weight).
struct EvalInput {
    std::string id;
    double value = 0.0;
    UnitKind unit = UnitKind::Dimensionless;
    Period period;
    EvidenceStatus status = EvidenceStatus::Reported;
};

struct FormulaInfo {
    FormulaId id;
    std::string_view token;
    std::size_t min_arity;
    std::size_t max_arity;   // SIZE_MAX for variadic
    bool takes_years;
    std::string_view describes;  // used to synthesize indicator concepts
};

inline constexpr std::size_t kVariadic = static_cast<std::size_t>(-1);

inline std::span<const FormulaInfo> formula_table() {
    static const FormulaInfo table[] = {
        {FormulaId::AbsoluteChange, "ABS", 2, 2, false, "absolute change of"},
        {FormulaId::PercentagePointChange, "PP", 2, 2, false, "percentage-point change of"},
        {FormulaId::RelativeChange, "REL", 2, 2, false, "relative change of"},
        {FormulaId::CompoundAnnualGrowth, "CAGR", 2, 2, true, "annualized growth of"},
        {FormulaId::GrowthMultiplier, "MULT", 2, 2, false, "growth multiplier of"},
        {FormulaId::ScaleRatio, "SCALE", 2, 2, false, "scale of"},
        {FormulaId::GroupShare, "SHARE", 2, kVariadic, false, "group share of"},
        {FormulaId::ConcentrationIndex, "HHI", 2, kVariadic, false, "concentration of"},
        {FormulaId::ConcentrationIndexPct, "HHI_PCT", 2, kVariadic, false, "concentration of"},
        {FormulaId::StockFlowRatio, "SFR", 2, 2, false, "stock-flow ratio of"},
        {FormulaId::InstallationShare, "AIS", 2, 2, false, "installation share of"},
        {FormulaId::DemandMultiplier, "DCM", 2, 2, false, "demand multiplier of"},
        {FormulaId::NewToDisplacedRatio, "NDR", 2, 2, false, "new-to-displaced ratio of"},
        {FormulaId::DisplacementShare, "DRN", 2, 2, false, "displacement share of"},
        {FormulaId::NetRoleChange, "NET", 2, 2, false, "net role change of"},
        {FormulaId::NetGainShare, "NGR", 2, 2, false, "net gain share of"},
        {FormulaId::FrictionIndex, "CFINDEX", 14, 14, false, "coordination-friction index of"},
    };
    return table;
}

inline const FormulaInfo& formula_info(FormulaId id) {
    for (const auto& f : formula_table()) {
        if (f.id == id) return f;
    }
    throw SpecError("unknown formula id");
}

inline std::string_view formula_token(FormulaId id) { return formula_info(id).token; }

inline std::optional<FormulaId> formula_from_token(std::string_view token) {
    for (const auto& f : formula_table()) {
        if (f.token == token) return f.id;
    }
    return std::nullopt;
}

namespace detail {

inline void require_arity(FormulaId id, std::size_t n) {
    const auto& info = formula_info(id);
    if (n < info.min_arity || (info.max_arity != kVariadic && n > info.max_arity)) {
        throw SpecError(std::string(info.token) + " expects " +
                        std::to_string(info.min_arity) +
                        (info.max_arity == kVariadic ? "+ inputs" : " inputs") +
                        ", got " + std::to_string(n));
    }
}

inline void require_same_unit(std::span<const EvalInput> ins, std::string_view op) {
    for (std::size_t i = 1; i < ins.size(); ++i) {
        if (ins[i].unit != ins[0].unit) {
            throw UnitError(std::string(op) + " across mixed units ('" + ins[0].id +
                            "' vs '" + ins[i].id + "')");
        }
    }
}

inline void require_unit(const EvalInput& in, UnitKind k, std::string_view op) {
    if (in.unit != k) {
        throw UnitError(std::string(op) + " requires " + std::string(unit_token(k)) +
                        " input, got '" + in.id + "' in " + std::string(unit_token(in.unit)));
    }
}

/// Growth horizon in years: explicit override when given, otherwise the span
/// between the two input periods.
inline int resolve_years(std::span<const EvalInput> ins, std::optional<int> explicit_years) {
    if (explicit_years) {
        if (*explicit_years < 1) throw PeriodError("explicit growth horizon below one year");
        return *explicit_years;
    }
    const int span = ins[1].period.start_year - ins[0].period.start_year;
    if (span < 1) {
        throw PeriodError("periods of '" + ins[0].id + "' and '" + ins[1].id +
                          "' span less than one year; give an explicit horizon");
    }
    return span;
}

}  // namespace detail

/// Evaluates a formula over resolved inputs. Deterministic: identical inputs
/// give the identical binary64 result.
inline double evaluate_formula(FormulaId id, std::span<const EvalInput> ins,
                               std::optional<int> years = std::nullopt) {
    detail::require_arity(id, ins.size());
    for (const auto& in : ins) {
        if (!std::isfinite(in.value)) {
            throw DomainError("input '" + in.id + "' is not finite");
        }
    }
    switch (id) {
        case FormulaId::AbsoluteChange:
            detail::require_same_unit(ins, "absolute change");
            return absolute_change(ins[0].value, ins[1].value);
        case FormulaId::PercentagePointChange:
            detail::require_unit(ins[0], UnitKind::Percent, "percentage-point change");
            detail::require_unit(ins[1], UnitKind::Percent, "percentage-point change");
            return absolute_change(ins[0].value, ins[1].value);
        case FormulaId::RelativeChange:
            detail::require_same_unit(ins, "relative change");
            return relative_change(ins[0].value, ins[1].value);
        case FormulaId::CompoundAnnualGrowth:
            detail::require_same_unit(ins, "annualized growth");
            return cagr(ins[0].value, ins[1].value, detail::resolve_years(ins, years));
        case FormulaId::GrowthMultiplier:
            detail::require_same_unit(ins, "growth multiplier");
            return growth_multiplier(ins[0].value, ins[1].value);
        case FormulaId::ScaleRatio:
            detail::require_same_unit(ins, "scale ratio");
            return scale_ratio(ins[0].value, ins[1].value);
        case FormulaId::DemandMultiplier:
            detail::require_unit(ins[0], UnitKind::EnergyTWh, "demand multiplier");
            detail::require_unit(ins[1], UnitKind::EnergyTWh, "demand multiplier");
            return demand_multiplier(ins[0].value, ins[1].value);
        case FormulaId::StockFlowRatio:
            detail::require_unit(ins[0], UnitKind::PhysicalUnits, "stock-flow ratio");
            detail::require_unit(ins[1], UnitKind::PhysicalUnits, "stock-flow ratio");
            return stock_flow_ratio({ins[0].value, ins[1].value, ins[0].period});
        case FormulaId::InstallationShare:
            detail::require_unit(ins[0], UnitKind::PhysicalUnits, "installation share");
            detail::require_unit(ins[1], UnitKind::PhysicalUnits, "installation share");
            return installation_share_of_stock({ins[0].value, ins[1].value, ins[0].period});
        case FormulaId::NewToDisplacedRatio:
            detail::require_unit(ins[0], UnitKind::JobsMillion, "labour ratio");
            detail::require_unit(ins[1], UnitKind::JobsMillion, "labour ratio");
            return new_to_displaced_ratio({ins[0].value, ins[1].value, ins[0].period});
        case FormulaId::DisplacementShare:
            detail::require_unit(ins[0], UnitKind::JobsMillion, "labour ratio");
            detail::require_unit(ins[1], UnitKind::JobsMillion, "labour ratio");
            return displacement_relative_to_new({ins[0].value, ins[1].value, ins[0].period});
        case FormulaId::NetRoleChange:
            detail::require_unit(ins[0], UnitKind::JobsMillion, "net role change");
            detail::require_unit(ins[1], UnitKind::JobsMillion, "net role change");
            return net_labour_change({ins[0].value, ins[1].value, ins[0].period});
        case FormulaId::NetGainShare:
            detail::require_unit(ins[0], UnitKind::JobsMillion, "labour ratio");
            detail::require_unit(ins[1], UnitKind::JobsMillion, "labour ratio");
            return net_gain_ratio({ins[0].value, ins[1].value, ins[0].period});
        case FormulaId::GroupShare: {
            detail::require_same_unit(ins, "group share");
            ShareGroup g;
            g.label = "inline";
            for (const auto& in : ins) g.members.push_back({in.id, in.value});
            return shares(g).shares.front().value;
        }
        case FormulaId::ConcentrationIndex: {
            detail::require_same_unit(ins, "concentration index");
            ShareGroup g;
            g.label = "inline";
            for (const auto& in : ins) g.members.push_back({in.id, in.value});
            ShareVector v = shares(g);
            double sum_sq = 0.0;
            for (const auto& s : v.shares) sum_sq += s.value * s.value;
            return sum_sq;
        }
        case FormulaId::ConcentrationIndexPct: {
            std::vector<double> percents;
            percents.reserve(ins.size());
            for (const auto& in : ins) {
                detail::require_unit(in, UnitKind::Percent, "concentration index");
                percents.push_back(in.value);
            }
            return hhi_from_reported_percentages(percents, /*residual_allowed=*/true);
        }
        case FormulaId::FrictionIndex: {
            // Seven normalized components followed by their seven weights, so
            // the audit snapshot is self-contained and recomputable.
            double acc = 0.0;
            double wsum = 0.0;
            for (std::size_t i = 0; i < 7; ++i) {
                const double w = ins[7 + i].value;
                if (w < 0.0) throw WeightError("negative weight '" + ins[7 + i].id + "'");
                acc += w * ins[i].value;
                wsum += w;
            }
            if (std::fabs(wsum - 1.0) > 1e-9) {
                throw WeightError("weights sum to " + std::to_string(wsum));
            }
            return acc;
        }
    }
    throw SpecError("unknown formula id");
}

/// Unit kind of a formula's output. Dimensionless marks fractions the report
/// layer presents as percentages; Ratio marks multiplier-style outputs.
inline UnitKind result_unit(FormulaId id, std::span<const EvalInput> ins) {
    switch (id) {
        case FormulaId::AbsoluteChange:
        case FormulaId::NetRoleChange:
            return ins.empty() ? UnitKind::Dimensionless : ins[0].unit;
        case FormulaId::PercentagePointChange:
            return UnitKind::PercentagePoint;
        case FormulaId::RelativeChange:
        case FormulaId::CompoundAnnualGrowth:
        case FormulaId::InstallationShare:
        case FormulaId::DisplacementShare:
        case FormulaId::NetGainShare:
        case FormulaId::GroupShare:
        case FormulaId::ConcentrationIndex:
        case FormulaId::ConcentrationIndexPct:
        case FormulaId::FrictionIndex:
            return UnitKind::Dimensionless;
        case FormulaId::GrowthMultiplier:
        case FormulaId::ScaleRatio:
        case FormulaId::DemandMultiplier:
        case FormulaId::StockFlowRatio:
        case FormulaId::NewToDisplacedRatio:
            return UnitKind::Ratio;
    }
    return UnitKind::Dimensionless;
}

/// Interpretation boundary of an output. Any projection input taints the
/// result as projection-based; scale-style comparisons are marked as such;
/// everything else derived from reported values is an observed fact.
inline InterpretationBoundary result_boundary(FormulaId id, std::span<const EvalInput> ins) {
    for (const auto& in : ins) {
        if (in.status == EvidenceStatus::Projection) {
            return InterpretationBoundary::ProjectionBased;
        }
    }
    if (id == FormulaId::ScaleRatio || id == FormulaId::InstallationShare) {
        return InterpretationBoundary::ScaleComparison;
    }
    return InterpretationBoundary::ObservedFact;
}

}  // namespace ecodiag
