#pragma once

// Reproducibility audit trail. Every derived indicator gets exactly one
// audit record holding the input snapshot, the formula and an independent
// recomputation; verification replays the whole log. The log is the one
// stateful object in the engine: append-only, single writer, shared readers.
//
// On disk the log is line-delimited JSON, one record per line, with a fixed
// field order so that runs diff cleanly:
//   result_id, formula_id, inputs[](id, value, unit, period, status),
//   years, recomputed, declared, match, boundary, supersedes, engine_version

#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecodiag/formula.hpp"
#include "ecodiag/types.hpp"

namespace ecodiag {

/// Snapshot of one input at audit time.
using AuditInput = EvalInput;

inline constexpr std::string_view kAuditLabel = "author-calculated";

struct AuditRecord {
    std::string result_id;
    FormulaId formula = FormulaId::AbsoluteChange;
    std::vector<AuditInput> inputs;
    std::optional<int> years;
    double recomputed = 0.0;
    double declared = 0.0;
    bool match = false;
    InterpretationBoundary boundary = InterpretationBoundary::ObservedFact;
    std::optional<std::string> supersedes;  // result_id of the record this corrects
    std::string engine{kEngineVersion};
};

/// Half-unit-in-last-digit check for values declared by external sources at
/// a known rounding precision (e.g. a figure published as "26.95" checks
/// within +-0.005). Engine-declared values use exact binary64 equality.
inline bool matches_reported(double computed, double reported, int decimals) {
    const double tol = 0.5 * std::pow(10.0, -decimals);
    return std::fabs(computed - reported) <= tol;
}

/// Recomputes a derived indicator from resolved inputs and freezes the
/// snapshot into a record. Engine-declared values must match exactly.
inline AuditRecord record_audit(
    const DerivedIndicator& d,
    const std::function<const SourceValue*(const std::string&)>& resolve) {
    AuditRecord rec;
    rec.result_id = d.id;
    rec.formula = d.formula;
    rec.years = d.years;
    rec.inputs.reserve(d.inputs.size());
    for (const auto& input_id : d.inputs) {
        const SourceValue* sv = resolve(input_id);
        if (sv == nullptr) {
            throw LineageError("indicator '" + d.id + "' references unknown input '" +
                               input_id + "'");
        }
        rec.inputs.push_back(AuditInput{sv->id, sv->quantity, sv->unit.kind, sv->period,
                                        sv->evidence_status});
    }
    rec.recomputed = evaluate_formula(d.formula, rec.inputs, d.years);
    rec.declared = d.quantity;
    rec.match = (rec.recomputed == rec.declared);
    rec.boundary = result_boundary(d.formula, rec.inputs);
    return rec;
}

/// Audit over inputs that are already snapshots (friction-index outputs,
/// whose inputs are normalized components plus weights rather than sources).
inline AuditRecord record_audit(const DerivedIndicator& d,
                                std::vector<AuditInput> snapshot) {
    AuditRecord rec;
    rec.result_id = d.id;
    rec.formula = d.formula;
    rec.years = d.years;
    rec.inputs = std::move(snapshot);
    rec.recomputed = evaluate_formula(d.formula, rec.inputs, d.years);
    rec.declared = d.quantity;
    rec.match = (rec.recomputed == rec.declared);
    rec.boundary = result_boundary(d.formula, rec.inputs);
    return rec;
}

// ---------------------------------------------------------------------------
// Append-only log
// ---------------------------------------------------------------------------

class AuditLog {
public:
    AuditLog() = default;
    AuditLog(const AuditLog&) = delete;
    AuditLog& operator=(const AuditLog&) = delete;

    /// Appends a record; duplicate result ids are rejected. Appends are
    /// serialized internally; records are never mutated afterwards.
    void append(AuditRecord rec) {
        std::lock_guard<std::mutex> lock(write_mutex_);
        for (const auto& existing : records_) {
            if (existing.result_id == rec.result_id && !rec.supersedes) {
                throw DuplicateIdError("audit record '" + rec.result_id +
                                       "' already exists; corrections must supersede");
            }
        }
        records_.push_back(std::move(rec));
    }

    /// Corrections never rewrite history: the corrected record is appended
    /// with a reference to the record it supersedes.
    void append_correction(const std::string& original_result_id, AuditRecord corrected) {
        corrected.supersedes = original_result_id;
        append(std::move(corrected));
    }

    const std::vector<AuditRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

private:
    std::vector<AuditRecord> records_;
    std::mutex write_mutex_;
};

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct VerificationReport {
    std::size_t total = 0;
    std::size_t passed = 0;
    std::vector<std::string> failed;  // result ids, in log order
};

/// Replays every record: the formula re-evaluated over the stored snapshot
/// must equal both the stored recomputation and the declared value, and the
/// stored match flag must be consistent. Deterministic and idempotent.
inline VerificationReport verify_audit_log(std::span<const AuditRecord> log) {
    VerificationReport report;
    report.total = log.size();
    for (const auto& rec : log) {
        bool ok = false;
        try {
            const double fresh = evaluate_formula(rec.formula, rec.inputs, rec.years);
            const bool consistent_flag = (rec.match == (rec.recomputed == rec.declared));
            ok = (fresh == rec.recomputed) && consistent_flag && rec.match;
        } catch (const Error&) {
            ok = false;
        }
        if (ok) {
            ++report.passed;
        } else {
            report.failed.push_back(rec.result_id);
        }
    }
    return report;
}

inline VerificationReport verify_audit_log(const AuditLog& log) {
    return verify_audit_log(std::span<const AuditRecord>(log.records()));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string to_line(const AuditRecord& rec) {
    nlohmann::ordered_json j;
    j["result_id"] = rec.result_id;
    j["formula_id"] = std::string(formula_token(rec.formula));
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& in : rec.inputs) {
        nlohmann::ordered_json ji;
        ji["id"] = in.id;
        ji["value"] = in.value;
        ji["unit"] = std::string(unit_token(in.unit));
        ji["period"] = {in.period.start_year, in.period.end_year};
        ji["status"] = std::string(status_token(in.status));
        inputs.push_back(std::move(ji));
    }
    j["inputs"] = std::move(inputs);
    j["years"] = rec.years ? nlohmann::ordered_json(*rec.years) : nlohmann::ordered_json(nullptr);
    j["recomputed"] = rec.recomputed;
    j["declared"] = rec.declared;
    j["match"] = rec.match;
    j["label"] = std::string(kAuditLabel);
    j["boundary"] = std::string(boundary_token(rec.boundary));
    j["supersedes"] =
        rec.supersedes ? nlohmann::ordered_json(*rec.supersedes) : nlohmann::ordered_json(nullptr);
    j["engine_version"] = rec.engine;
    return j.dump();
}

inline AuditRecord parse_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed audit record: ") + e.what());
    }
    AuditRecord rec;
    try {
        rec.result_id = j.at("result_id").get<std::string>();
        const auto formula = formula_from_token(j.at("formula_id").get<std::string>());
        if (!formula) throw IoError("unknown formula token in audit record");
        rec.formula = *formula;
        for (const auto& ji : j.at("inputs")) {
            AuditInput in;
            in.id = ji.at("id").get<std::string>();
            in.value = ji.at("value").get<double>();
            const auto unit = unit_kind_from_token(ji.at("unit").get<std::string>());
            if (!unit) throw IoError("unknown unit token in audit record");
            in.unit = *unit;
            in.period = Period{ji.at("period").at(0).get<int>(), ji.at("period").at(1).get<int>()};
            const auto status = status_from_token(ji.at("status").get<std::string>());
            if (!status) throw IoError("unknown status token in audit record");
            in.status = *status;
            rec.inputs.push_back(std::move(in));
        }
        if (!j.at("years").is_null()) rec.years = j.at("years").get<int>();
        rec.recomputed = j.at("recomputed").get<double>();
        rec.declared = j.at("declared").get<double>();
        rec.match = j.at("match").get<bool>();
        const auto boundary = boundary_from_token(j.at("boundary").get<std::string>());
        if (!boundary) throw IoError("unknown boundary token in audit record");
        rec.boundary = *boundary;
        if (!j.at("supersedes").is_null()) {
            rec.supersedes = j.at("supersedes").get<std::string>();
        }
        rec.engine = j.at("engine_version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("audit record missing field: ") + e.what());
    }
    return rec;
}

inline void write_audit_log(std::ostream& os, std::span<const AuditRecord> log) {
    for (const auto& rec : log) os << to_line(rec) << '\n';
}

inline std::vector<AuditRecord> read_audit_log(std::istream& is) {
    std::vector<AuditRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(parse_line(line));
    }
    return out;
}

}  // namespace ecodiag
