#pragma once

// The six elementary transformations every other module consumes.
// All arithmetic runs in binary64; rounding to reported precision happens
// only at report emission.

#include <cmath>

#include "ecodiag/types.hpp"

namespace ecodiag {

// --- raw arithmetic ---------------------------------------------------------

/// xt - x0. Unit handling lives in the checked overload below.
inline double absolute_change(double x0, double xt) noexcept { return xt - x0; }

/// xt / x0; multiplicative growth. Rejects non-positive bases rather than
/// returning signed infinities.
inline double growth_multiplier(double x0, double xt) {
    if (!(x0 > 0.0)) throw DomainError("growth multiplier requires a positive base");
    return xt / x0;
}

/// (xt - x0) / x0, evaluated as xt/x0 - 1 so that
/// relative_change == growth_multiplier - 1 holds bitwise for x0 > 0.
inline double relative_change(double x0, double xt) {
    if (x0 == 0.0) throw DivisionByZeroBase("relative change over a zero base");
    return xt / x0 - 1.0;
}

/// (xt/x0)^(1/n) - 1, annualized growth over n >= 1 years.
inline double cagr(double x0, double xt, int n) {
    if (n == 0) throw PeriodError("growth horizon of zero years");
    if (n < 1) throw PeriodError("growth horizon must be at least one year");
    if (!(x0 > 0.0) || !(xt > 0.0)) {
        throw DomainError("annualized growth requires positive start and end values");
    }
    return std::pow(xt / x0, 1.0 / static_cast<double>(n)) - 1.0;
}

/// xi / xref against a positive reference. Callers comparing values from
/// different source categories must carry the scale-comparison boundary.
inline double scale_ratio(double xi, double xref) {
    if (!(xref > 0.0)) throw DomainError("scale ratio requires a positive reference");
    return xi / xref;
}

// --- unit-checked overloads -------------------------------------------------

/// A bare (value, unit-kind) pair for the checked transformation contracts.
struct Quantity {
    double value = 0.0;
    UnitKind unit = UnitKind::Dimensionless;
};

namespace detail {
inline void require_finite(const Quantity& q, const char* op) {
    if (!std::isfinite(q.value)) throw DomainError(std::string(op) + ": non-finite input");
}
}  // namespace detail

/// Absolute difference in the shared unit of its inputs.
inline Quantity absolute_change(Quantity x0, Quantity xt) {
    detail::require_finite(x0, "absolute change");
    detail::require_finite(xt, "absolute change");
    if (x0.unit != xt.unit) {
        throw UnitError("absolute change across mixed units");
    }
    return Quantity{absolute_change(x0.value, xt.value), x0.unit};
}

/// Same arithmetic as absolute_change but restricted to percent inputs;
/// the result is in percentage points. The restriction is the whole contract.
inline Quantity percentage_point_change(Quantity x0, Quantity xt) {
    detail::require_finite(x0, "percentage-point change");
    detail::require_finite(xt, "percentage-point change");
    if (x0.unit != UnitKind::Percent || xt.unit != UnitKind::Percent) {
        throw UnitError("percentage-point change requires percent inputs");
    }
    return Quantity{absolute_change(x0.value, xt.value), UnitKind::PercentagePoint};
}

/// Dimensionless fraction of growth relative to the starting value.
inline Quantity relative_change(Quantity x0, Quantity xt) {
    detail::require_finite(x0, "relative change");
    detail::require_finite(xt, "relative change");
    if (x0.unit != xt.unit) throw UnitError("relative change across mixed units");
    return Quantity{relative_change(x0.value, xt.value), UnitKind::Dimensionless};
}

inline Quantity cagr(Quantity x0, Quantity xt, int n) {
    detail::require_finite(x0, "annualized growth");
    detail::require_finite(xt, "annualized growth");
    if (x0.unit != xt.unit) throw UnitError("annualized growth across mixed units");
    return Quantity{cagr(x0.value, xt.value, n), UnitKind::Dimensionless};
}

inline Quantity growth_multiplier(Quantity x0, Quantity xt) {
    detail::require_finite(x0, "growth multiplier");
    detail::require_finite(xt, "growth multiplier");
    if (x0.unit != xt.unit) throw UnitError("growth multiplier across mixed units");
    return Quantity{growth_multiplier(x0.value, xt.value), UnitKind::Ratio};
}

inline Quantity scale_ratio(Quantity xi, Quantity xref) {
    detail::require_finite(xi, "scale ratio");
    detail::require_finite(xref, "scale ratio");
    if (xi.unit != xref.unit) throw UnitError("scale ratio across mixed units");
    return Quantity{scale_ratio(xi.value, xref.value), UnitKind::Ratio};
}

}  // namespace ecodiag
