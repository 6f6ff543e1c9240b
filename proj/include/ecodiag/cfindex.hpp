#pragma once

// Forward-looking sector-level coordination-friction index: component
// normalization, weighting, the weighted-sum index and rank-correlation
// validation against sector outcomes. The engine ships no real sector data;
// series are synthetic and labeled as such, never as reported.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecodiag/types.hpp"

namespace ecodiag {

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

/// The seven computable friction components.
enum class ComponentKind {
    Latency,           // lat:    decision or settlement delay
    DisputeRate,       // disp:   dispute or failed-match rate
    ModelErrorCost,    // err:    cost of model error
    ProtocolFailure,   // prot:   protocol-failure pressure
    AuditGap,          // audgap: audit-gap intensity
    EnergyBottleneck,  // enb:    energy or infrastructure bottleneck
    OverrideBurden,    // ovr:    human-override burden
};

inline constexpr std::size_t kComponentCount = 7;

inline constexpr std::array<ComponentKind, kComponentCount> kComponentKinds = {
    ComponentKind::Latency,        ComponentKind::DisputeRate,
    ComponentKind::ModelErrorCost, ComponentKind::ProtocolFailure,
    ComponentKind::AuditGap,       ComponentKind::EnergyBottleneck,
    ComponentKind::OverrideBurden,
};

inline std::string_view component_token(ComponentKind k) {
    switch (k) {
        case ComponentKind::Latency: return "lat";
        case ComponentKind::DisputeRate: return "disp";
        case ComponentKind::ModelErrorCost: return "err";
        case ComponentKind::ProtocolFailure: return "prot";
        case ComponentKind::AuditGap: return "audgap";
        case ComponentKind::EnergyBottleneck: return "enb";
        case ComponentKind::OverrideBurden: return "ovr";
    }
    return "lat";
}

inline std::optional<ComponentKind> component_from_token(std::string_view tok) {
    for (ComponentKind k : kComponentKinds) {
        if (component_token(k) == tok) return k;
    }
    return std::nullopt;
}

/// The broader coordination-cost taxonomy the seven components come from.
/// Documentation-level: only the seven ComponentKind entries are computable.
enum class CoordinationCost {
    Search,
    Bargain,
    Contract,
    Monitor,
    Latency,
    ModelError,
    ProtocolFailure,
    Energy,
    Audit,
    Override,
};

inline constexpr std::array<CoordinationCost, 10> kCoordinationCosts = {
    CoordinationCost::Search,   CoordinationCost::Bargain,
    CoordinationCost::Contract, CoordinationCost::Monitor,
    CoordinationCost::Latency,  CoordinationCost::ModelError,
    CoordinationCost::ProtocolFailure, CoordinationCost::Energy,
    CoordinationCost::Audit,    CoordinationCost::Override,
};

/// Which computable component, if any, covers a taxonomy category. Disputes
/// and failed matches are the observable face of bargaining friction; the
/// remaining classical costs have no sector feed yet.
inline std::optional<ComponentKind> computable_component(CoordinationCost c) {
    switch (c) {
        case CoordinationCost::Bargain: return ComponentKind::DisputeRate;
        case CoordinationCost::Latency: return ComponentKind::Latency;
        case CoordinationCost::ModelError: return ComponentKind::ModelErrorCost;
        case CoordinationCost::ProtocolFailure: return ComponentKind::ProtocolFailure;
        case CoordinationCost::Energy: return ComponentKind::EnergyBottleneck;
        case CoordinationCost::Audit: return ComponentKind::AuditGap;
        case CoordinationCost::Override: return ComponentKind::OverrideBurden;
        case CoordinationCost::Search:
        case CoordinationCost::Contract:
        case CoordinationCost::Monitor:
            return std::nullopt;
    }
    return std::nullopt;
}

/// Sector indicators proposed for future measurement of auditable trust and
/// human sovereignty. Definition templates only; the engine computes none of
/// them beyond the seven index components.
struct FutureIndicatorTemplate {
    std::string_view name;
    std::string_view definition;
    ComponentKind extends;
};

inline std::span<const FutureIndicatorTemplate> future_indicator_templates() {
    static constexpr FutureIndicatorTemplate templates[] = {
        {"human_review_share", "share of AI-assisted decisions receiving human review",
         ComponentKind::OverrideBurden},
        {"override_frequency", "rate of human overrides per automated decision",
         ComponentKind::OverrideBurden},
        {"decision_reversal_rate", "share of automated decisions later reversed",
         ComponentKind::OverrideBurden},
        {"audit_log_completeness", "share of automated actions with a complete audit trail",
         ComponentKind::AuditGap},
        {"appeal_mechanism", "availability of a contestability or appeal channel",
         ComponentKind::AuditGap},
        {"model_documentation", "availability of model documentation for deployed systems",
         ComponentKind::AuditGap},
        {"protocol_failure_incidents", "count of rule-execution or settlement failures",
         ComponentKind::ProtocolFailure},
        {"api_failure_rate", "API downtime or failure rate of dependent services",
         ComponentKind::ProtocolFailure},
        {"liability_clarity", "clarity of liability allocation for automated action",
         ComponentKind::AuditGap},
    };
    return templates;
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

enum class WeightScheme { Equal, Expert, Empirical };

inline std::string_view weight_scheme_token(WeightScheme s) {
    switch (s) {
        case WeightScheme::Equal: return "equal";
        case WeightScheme::Expert: return "expert";
        case WeightScheme::Empirical: return "empirical";
    }
    return "equal";
}

struct CfWeights {
    std::array<double, kComponentCount> w{};
    WeightScheme scheme = WeightScheme::Equal;

    void validate() const {
        double sum = 0.0;
        for (double wi : w) {
            if (!std::isfinite(wi) || wi < 0.0) {
                throw WeightError("weights must be finite and nonnegative");
            }
            sum += wi;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw WeightError("weights sum to " + std::to_string(sum) + ", expected 1");
        }
    }
};

/// Least-assumption default: 1/7 on every component.
inline CfWeights equal_weights() {
    CfWeights weights;
    weights.w.fill(1.0 / static_cast<double>(kComponentCount));
    weights.scheme = WeightScheme::Equal;
    return weights;
}

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

struct SectorObservation {
    Period period;
    std::array<double, kComponentCount> raw{};  // indexed by ComponentKind order
};

struct SectorSeries {
    std::string sector_label;
    std::string data_label = "synthetic";  // provenance of the series itself
    std::vector<SectorObservation> observations;
    std::vector<double> outcomes;  // optional; aligned with observations when present

    void validate() const {
        for (std::size_t i = 0; i < observations.size(); ++i) {
            for (double v : observations[i].raw) {
                if (!std::isfinite(v) || v < 0.0) {
                    throw DomainError("sector '" + sector_label +
                                      "' has a negative or non-finite component value");
                }
            }
            if (i > 0 && !(observations[i - 1].period.start_year <
                           observations[i].period.start_year)) {
                throw PeriodError("sector '" + sector_label +
                                  "' periods are not strictly increasing");
            }
        }
        if (!outcomes.empty() && outcomes.size() != observations.size()) {
            throw AlignmentError("sector '" + sector_label +
                                 "' outcome series length differs from observations");
        }
    }
};

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

enum class NormScheme { MinMax, ZScore };

inline std::string_view norm_scheme_token(NormScheme s) {
    return s == NormScheme::MinMax ? "minmax" : "zscore";
}

struct NormalizedSeries {
    std::string sector_label;
    std::string data_label;
    std::vector<Period> periods;
    std::vector<std::array<double, kComponentCount>> values;
    std::vector<double> outcomes;
    /// Components whose range collapsed under min-max (mapped to all zeros).
    std::vector<ComponentKind> degenerate;
};

/// Per-series normalization to a common scale. Min-max maps each component to
/// [0,1] over the series (a constant component maps to all zeros and is
/// flagged); z-score centers to mean zero and unit population variance and
/// rejects constant components.
inline NormalizedSeries normalize(const SectorSeries& series, NormScheme scheme) {
    series.validate();
    const std::size_t n = series.observations.size();
    if (n < 2) {
        throw DomainError("sector '" + series.sector_label +
                          "' needs at least two observations to normalize");
    }

    NormalizedSeries out;
    out.sector_label = series.sector_label;
    out.data_label = series.data_label;
    out.outcomes = series.outcomes;
    out.periods.reserve(n);
    for (const auto& obs : series.observations) out.periods.push_back(obs.period);
    out.values.assign(n, {});

    for (std::size_t c = 0; c < kComponentCount; ++c) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = series.observations[i].raw[c];

        if (scheme == NormScheme::MinMax) {
            const auto [mn_it, mx_it] = std::minmax_element(column.begin(), column.end());
            const double mn = *mn_it, mx = *mx_it;
            if (mx == mn) {
                out.degenerate.push_back(kComponentKinds[c]);
                for (std::size_t i = 0; i < n; ++i) out.values[i][c] = 0.0;
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    out.values[i][c] = (column[i] - mn) / (mx - mn);
                }
            }
        } else {
            const double mean =
                std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(n);
            double var = 0.0;
            for (double v : column) var += (v - mean) * (v - mean);
            var /= static_cast<double>(n);
            if (var == 0.0) {
                throw DegenerateVariance(
                    "component '" + std::string(component_token(kComponentKinds[c])) +
                    "' is constant; z-score undefined");
            }
            const double sd = std::sqrt(var);
            for (std::size_t i = 0; i < n; ++i) out.values[i][c] = (column[i] - mean) / sd;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Index
// ---------------------------------------------------------------------------

/// Weighted sum of the seven normalized components.
inline double cf_index(const std::array<double, kComponentCount>& components,
                       const CfWeights& weights) {
    weights.validate();
    double acc = 0.0;
    for (std::size_t i = 0; i < kComponentCount; ++i) {
        if (!std::isfinite(components[i])) {
            throw DomainError("non-finite normalized component");
        }
        acc += weights.w[i] * components[i];
    }
    return acc;
}

/// Kind-keyed entry point: components are matched by kind, never by
/// position, and all seven must be present.
inline double cf_index(const std::map<ComponentKind, double>& components,
                       const CfWeights& weights) {
    std::array<double, kComponentCount> ordered{};
    for (std::size_t i = 0; i < kComponentCount; ++i) {
        const auto it = components.find(kComponentKinds[i]);
        if (it == components.end()) {
            throw IncompleteObservation(
                "missing component '" + std::string(component_token(kComponentKinds[i])) + "'");
        }
        ordered[i] = it->second;
    }
    if (components.size() != kComponentCount) {
        throw IncompleteObservation("observation carries unknown extra components");
    }
    return cf_index(ordered, weights);
}

inline std::vector<double> index_series(const NormalizedSeries& series,
                                        const CfWeights& weights) {
    std::vector<double> out;
    out.reserve(series.values.size());
    for (const auto& row : series.values) out.push_back(cf_index(row, weights));
    return out;
}

// ---------------------------------------------------------------------------
// Outcome validation
// ---------------------------------------------------------------------------

namespace detail {
/// Mid-ranks: tied values share the average of the rank positions they span.
inline std::vector<double> mid_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateVariance("rank correlation over a constant series");
    }
    return sxy / std::sqrt(sxx * syy);
}
}  // namespace detail

/// Rank correlation (ties mid-ranked) between aligned index and outcome
/// series of length >= 3. The sign is reported as computed; the engine does
/// not decide which direction counts as better.
inline double validate_against_outcomes(std::span<const double> index_values,
                                        std::span<const double> outcomes) {
    if (index_values.size() != outcomes.size()) {
        throw AlignmentError("index and outcome series differ in length");
    }
    if (index_values.size() < 3) {
        throw AlignmentError("rank correlation needs at least three aligned points");
    }
    const std::vector<double> rx = detail::mid_ranks(index_values);
    const std::vector<double> ry = detail::mid_ranks(outcomes);
    return detail::pearson(rx, ry);
}

}  // namespace ecodiag
