#pragma once

// Domain-specific metrics: robotics stock-flow persistence, compute-energy
// demand growth and labour-reallocation ratios.

#include <cmath>

#include "ecodiag/types.hpp"
#include "ecodiag/transforms.hpp"

namespace ecodiag {

struct RobotStockSnapshot {
    double operational_stock = 0.0;
    double annual_installations = 0.0;
    Period period;
};

/// Gross labour-flow projection. Treated as projection evidence throughout;
/// every ratio derived from it is projection-based.
struct LabourProjection {
    double new_roles = 0.0;
    double displaced_roles = 0.0;
    Period period;

    static constexpr EvidenceStatus evidence_status = EvidenceStatus::Projection;
};

namespace detail {
inline void require_nonnegative(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw DomainError(std::string(what) + " must be finite and nonnegative");
    }
}
}  // namespace detail

/// operational stock / annual installations. High values mean the installed
/// base is a persistent stock, not an isolated annual flow.
inline double stock_flow_ratio(const RobotStockSnapshot& s) {
    detail::require_nonnegative(s.operational_stock, "operational stock");
    detail::require_nonnegative(s.annual_installations, "annual installations");
    if (s.annual_installations == 0.0) {
        throw DivisionByZeroBase("stock-flow ratio over zero installations");
    }
    return s.operational_stock / s.annual_installations;
}

/// annual installations / operational stock. A scale indicator only; never a
/// depreciation estimate, so it carries the scale-comparison boundary.
inline double installation_share_of_stock(const RobotStockSnapshot& s) {
    detail::require_nonnegative(s.operational_stock, "operational stock");
    detail::require_nonnegative(s.annual_installations, "annual installations");
    if (s.operational_stock == 0.0) {
        throw DivisionByZeroBase("installation share over zero stock");
    }
    return s.annual_installations / s.operational_stock;
}

/// Energy-demand growth multiplier; same contract as growth_multiplier but
/// kept as its own operation so audit records name the demand-specific
/// formula.
inline double demand_multiplier(double baseline_twh, double target_twh) {
    return growth_multiplier(baseline_twh, target_twh);
}

/// new roles / displaced roles.
inline double new_to_displaced_ratio(const LabourProjection& p) {
    detail::require_nonnegative(p.new_roles, "new roles");
    detail::require_nonnegative(p.displaced_roles, "displaced roles");
    if (p.displaced_roles == 0.0) {
        throw DivisionByZeroBase("new-to-displaced ratio over zero displaced roles");
    }
    return p.new_roles / p.displaced_roles;
}

/// displaced roles / new roles; keeps gross disruption visible next to a
/// positive net result.
inline double displacement_relative_to_new(const LabourProjection& p) {
    detail::require_nonnegative(p.new_roles, "new roles");
    detail::require_nonnegative(p.displaced_roles, "displaced roles");
    if (p.new_roles == 0.0) {
        throw DivisionByZeroBase("displacement share over zero new roles");
    }
    return p.displaced_roles / p.new_roles;
}

/// new roles - displaced roles, signed; displacement may exceed creation.
inline double net_labour_change(const LabourProjection& p) {
    detail::require_nonnegative(p.new_roles, "new roles");
    detail::require_nonnegative(p.displaced_roles, "displaced roles");
    return p.new_roles - p.displaced_roles;
}

/// Share of projected new roles remaining after displacement. Evaluated as
/// the complement of the displacement share so the two sum to one bitwise.
inline double net_gain_ratio(const LabourProjection& p) {
    return 1.0 - displacement_relative_to_new(p);
}

}  // namespace ecodiag
