#pragma once

// Boundary-controlled share and concentration-index computation. The
// denominator group and its scope must be declared before any share is
// computed, and every concentration output carries a boundary statement
// naming the denominator it is valid for.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecodiag/types.hpp"

namespace ecodiag {

struct GroupMember {
    std::string id;
    double value = 0.0;
};

/// A denominator group. The residual member, when present, stands for an
/// "other/rounding" category and participates in shares and the index like
/// any other member.
struct ShareGroup {
    std::string label;
    GroupScope scope = GroupScope::ReportedComparison;
    std::vector<GroupMember> members;
    std::optional<GroupMember> residual;
};

/// Shares over a declared group. `prerounded` marks vectors ingested from
/// already-rounded percentages, which are held to the looser 0.01 sum
/// tolerance instead of 1e-9.
struct ShareVector {
    std::vector<GroupMember> shares;
    GroupScope scope = GroupScope::ReportedComparison;
    std::string label;
    bool prerounded = false;
};

struct ConcentrationResult {
    double value = 0.0;
    GroupScope scope = GroupScope::ReportedComparison;
    std::string label;
    std::string boundary_statement;
};

inline std::string denominator_statement(GroupScope scope, const std::string& label) {
    return "Valid only within the declared " + std::string(scope_token(scope)) +
           " denominator '" + label + "'; not a wider concentration measure.";
}

/// share_i = value_i / sum(values), residual included.
inline ShareVector shares(const ShareGroup& group) {
    std::vector<GroupMember> all(group.members);
    if (group.residual) all.push_back(*group.residual);
    if (all.empty()) throw EmptyDenominator("share group '" + group.label + "' has no members");

    double sum = 0.0;
    for (const auto& m : all) {
        if (!std::isfinite(m.value) || m.value < 0.0) {
            throw DomainError("share member '" + m.id + "' has a negative or non-finite value");
        }
        sum += m.value;
    }
    if (!(sum > 0.0)) {
        throw EmptyDenominator("share group '" + group.label + "' sums to zero");
    }

    ShareVector out;
    out.scope = group.scope;
    out.label = group.label;
    out.shares.reserve(all.size());
    for (const auto& m : all) out.shares.push_back({m.id, m.value / sum});
    return out;
}

namespace detail {
inline void check_share_sum(const ShareVector& v) {
    if (v.shares.empty()) throw MalformedShares("empty share vector");
    double sum = 0.0;
    for (const auto& s : v.shares) {
        if (!std::isfinite(s.value) || s.value < 0.0 || s.value > 1.0) {
            throw MalformedShares("share '" + s.id + "' outside [0, 1]");
        }
        sum += s.value;
    }
    const double tol = v.prerounded ? 0.01 : 1e-9;
    if (std::fabs(sum - 1.0) > tol) {
        throw MalformedShares("shares sum to " + std::to_string(sum) +
                              ", outside the declared tolerance");
    }
}
}  // namespace detail

/// Sum of squared shares, in (0, 1]; carries the input's scope and a
/// mandatory denominator statement.
inline ConcentrationResult hhi(const ShareVector& v) {
    detail::check_share_sum(v);
    double sum_sq = 0.0;
    for (const auto& s : v.shares) sum_sq += s.value * s.value;
    return ConcentrationResult{sum_sq, v.scope, v.label,
                               denominator_statement(v.scope, v.label)};
}

/// Concentration over percentages exactly as reported. Pre-rounded shares are
/// squared as given, never renormalized; with a residual category the
/// percentages must sum to 100 +- 1, otherwise to 100 within 1e-6.
inline double hhi_from_reported_percentages(std::span<const double> percents,
                                            bool residual_allowed) {
    if (percents.empty()) throw MalformedShares("no percentages supplied");
    double sum = 0.0;
    for (double p : percents) {
        if (!std::isfinite(p) || p < 0.0) {
            throw MalformedShares("negative or non-finite percentage");
        }
        sum += p;
    }
    const double tol = residual_allowed ? 1.0 : 1e-6;
    if (std::fabs(sum - 100.0) > tol) {
        throw MalformedShares("percentages sum to " + std::to_string(sum) +
                              ", outside 100 +- " + std::to_string(tol));
    }
    double sum_sq = 0.0;
    for (double p : percents) {
        const double s = p / 100.0;
        sum_sq += s * s;
    }
    return sum_sq;
}

}  // namespace ecodiag
