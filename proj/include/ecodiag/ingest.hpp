#pragma once

// File-format front end: the dataset table, the indicator-definition
// grammar, mapping-rule and hypothesis configuration, and sector series.
// All parsers are strict; positions are reported for every rejection.
//
// Dataset: UTF-8 TSV with header
//   id  concept  quantity  unit  period_start  period_end  source_family  status  notes
// Definitions: one per line,  out_id = FORMULA(in_1, in_2[, n]) [@scope]
// Rules / hypotheses / friction-index config: JSON with named fields.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecodiag/cfindex.hpp"
#include "ecodiag/evidence.hpp"
#include "ecodiag/formula.hpp"
#include "ecodiag/framework.hpp"
#include "ecodiag/types.hpp"

namespace ecodiag {

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::optional<double> parse_double(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (errno != 0 || end != t.c_str() + t.size()) return std::nullopt;
    return v;
}

inline std::optional<int> parse_int(const std::string& s) {
    const std::string t = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

inline bool notes_contain(const std::string& notes, std::string_view marker) {
    return notes.find(marker) != std::string::npos;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

inline constexpr std::string_view kDatasetHeader =
    "id\tconcept\tquantity\tunit\tperiod_start\tperiod_end\tsource_family\tstatus\tnotes";

/// Parses the dataset table into vetting candidates. Notes may carry the
/// markers `over-100-ok`, `unsupported-assumption` and `off-domain`, which
/// set the corresponding candidate flags.
inline std::vector<CandidateSource> parse_dataset(std::istream& in) {
    std::vector<CandidateSource> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kDatasetHeader) {
                throw IngestError(line_no, 1, "dataset header must be exactly '" +
                                               std::string(kDatasetHeader) + "'");
            }
            header_seen = true;
            continue;
        }

        const auto cols = detail::split_tabs(line);
        if (cols.size() != 9) {
            throw IngestError(line_no, cols.size(),
                              "expected 9 tab-separated columns, got " +
                                  std::to_string(cols.size()));
        }

        CandidateSource cand;
        SourceValue& v = cand.value;
        v.id = detail::trim(cols[0]);
        if (v.id.empty()) throw IngestError(line_no, 1, "empty id");
        if (!seen.insert(v.id).second) {
            throw DuplicateIdError("duplicate dataset id '" + v.id + "' at line " +
                                   std::to_string(line_no));
        }
        v.concept_name = detail::trim(cols[1]);

        const auto qty = detail::parse_double(cols[2]);
        if (!qty) throw IngestError(line_no, 3, "quantity '" + cols[2] + "' is not numeric");
        v.quantity = *qty;

        const auto unit = unit_kind_from_token(detail::trim(cols[3]));
        if (!unit) throw IngestError(line_no, 4, "unknown unit token '" + cols[3] + "'");
        v.unit = make_unit(*unit);

        const auto start = detail::parse_int(cols[4]);
        const auto end = detail::parse_int(cols[5]);
        if (!start) throw IngestError(line_no, 5, "period_start '" + cols[4] + "' is not a year");
        if (!end) throw IngestError(line_no, 6, "period_end '" + cols[5] + "' is not a year");
        if (*start > *end) throw IngestError(line_no, 5, "period_start after period_end");
        v.period = Period{*start, *end};

        v.source_family = detail::trim(cols[6]);

        const auto status = status_from_token(detail::trim(cols[7]));
        if (!status) throw IngestError(line_no, 8, "unknown status token '" + cols[7] + "'");
        if (*status != EvidenceStatus::Reported && *status != EvidenceStatus::Projection) {
            throw IngestError(line_no, 8,
                              "only 'reported' or 'projection' may be ingested");
        }
        v.evidence_status = *status;

        v.notes = detail::trim(cols[8]);
        v.over_100_allowed = detail::notes_contain(v.notes, "over-100-ok");
        cand.requires_unsupported_assumption =
            detail::notes_contain(v.notes, "unsupported-assumption");
        cand.domain_relevant = !detail::notes_contain(v.notes, "off-domain");
        cand.has_numeric_value = true;

        out.push_back(std::move(cand));
    }
    return out;
}

inline std::vector<CandidateSource> parse_dataset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
    return parse_dataset(in);
}

// ---------------------------------------------------------------------------
// Indicator definitions
// ---------------------------------------------------------------------------

struct IndicatorDef {
    std::string id;
    FormulaId formula = FormulaId::AbsoluteChange;
    std::vector<std::string> inputs;
    std::optional<int> years;       // trailing integer argument (CAGR only)
    std::optional<GroupScope> scope;  // trailing @scope (share / HHI only)
    std::size_t line = 0;
};

namespace detail {

struct DefCursor {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw DefinitionParseError(line, pos + 1, what);
    }
    void skip_spaces() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() const { return pos >= text.size(); }
    char peek() const { return pos < text.size() ? text[pos] : '\0'; }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    std::string identifier() {
        skip_spaces();
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
        }
        if (pos == start) fail("expected an identifier");
        return text.substr(start, pos - start);
    }
};

}  // namespace detail

/// Parses definitions against the set of known source ids. Unknown formulas,
/// bad arity and dangling input ids are all rejected here, before any
/// evaluation happens. `#` starts a comment.
inline std::vector<IndicatorDef> parse_indicator_defs(std::istream& in,
                                                      const std::set<std::string>& known_ids) {
    std::vector<IndicatorDef> out;
    std::set<std::string> defined;
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::size_t hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        detail::DefCursor cur{line, 0, line_no};
        IndicatorDef def;
        def.line = line_no;
        def.id = cur.identifier();
        cur.skip_spaces();
        cur.expect('=');
        const std::string token = cur.identifier();
        const auto formula = formula_from_token(token);
        if (!formula) cur.fail("unknown formula '" + token + "'");
        def.formula = *formula;
        cur.skip_spaces();
        cur.expect('(');

        bool first = true;
        while (true) {
            cur.skip_spaces();
            if (cur.peek() == ')') break;
            if (!first) {
                cur.expect(',');
                cur.skip_spaces();
            }
            first = false;
            if (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
                const std::size_t start = cur.pos;
                while (std::isdigit(static_cast<unsigned char>(cur.peek()))) ++cur.pos;
                const auto n = detail::parse_int(line.substr(start, cur.pos - start));
                cur.skip_spaces();
                if (cur.peek() != ')') cur.fail("a year count must be the final argument");
                if (!formula_info(def.formula).takes_years) {
                    cur.fail("'" + token + "' does not take a year count");
                }
                def.years = n;
                break;
            }
            def.inputs.push_back(cur.identifier());
        }
        cur.expect(')');
        cur.skip_spaces();
        if (cur.peek() == '@') {
            ++cur.pos;
            const std::string scope_tok = cur.identifier();
            const auto scope = scope_from_token(scope_tok);
            if (!scope) cur.fail("unknown scope '" + scope_tok + "'");
            if (def.formula != FormulaId::GroupShare &&
                def.formula != FormulaId::ConcentrationIndex &&
                def.formula != FormulaId::ConcentrationIndexPct) {
                cur.fail("scope annotations apply only to share and concentration formulas");
            }
            def.scope = scope;
            cur.skip_spaces();
        }
        if (!cur.done()) cur.fail("trailing content after definition");

        if (def.years && *def.years < 1) {
            throw DefinitionParseError(line_no, 1, "year count must be at least 1");
        }
        const auto& info = formula_info(def.formula);
        if (def.inputs.size() < info.min_arity ||
            (info.max_arity != kVariadic && def.inputs.size() > info.max_arity)) {
            throw DefinitionParseError(
                line_no, 1,
                "'" + std::string(info.token) + "' expects " + std::to_string(info.min_arity) +
                    (info.max_arity == kVariadic ? "+ inputs" : " inputs") + ", got " +
                    std::to_string(def.inputs.size()));
        }
        if (known_ids.count(def.id) || !defined.insert(def.id).second) {
            throw DuplicateIdError("definition id '" + def.id + "' collides at line " +
                                   std::to_string(line_no));
        }
        for (const auto& input : def.inputs) {
            if (!known_ids.count(input)) {
                throw DefinitionParseError(line_no, 1,
                                           "input '" + input + "' is not a dataset id");
            }
        }
        out.push_back(std::move(def));
    }
    return out;
}

inline std::vector<IndicatorDef> parse_indicator_defs_file(const std::filesystem::path& path,
                                                           const std::set<std::string>& known) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open definitions '" + path.string() + "'");
    return parse_indicator_defs(in, known);
}

// ---------------------------------------------------------------------------
// Mapping rules and hypothesis specs (JSON)
// ---------------------------------------------------------------------------

inline MappingRuleset parse_mapping_rules(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("mapping rules are not valid JSON: ") + e.what());
    }
    MappingRuleset out;
    try {
        if (j.contains("unmeasured")) {
            for (const auto& tok : j.at("unmeasured")) {
                const auto v = action_variable_from_token(tok.get<std::string>());
                if (!v) throw SpecError("unknown action variable '" + tok.get<std::string>() + "'");
                out.unmeasured.insert(*v);
            }
        }
        if (j.contains("projections_carry_uncertainty")) {
            out.projections_carry_uncertainty = j.at("projections_carry_uncertainty").get<bool>();
        }
        for (const auto& jr : j.at("rules")) {
            MappingRule rule;
            rule.pattern = jr.at("pattern").get<std::string>();
            for (const auto& tok : jr.at("targets")) {
                const auto v = action_variable_from_token(tok.get<std::string>());
                if (!v) throw SpecError("unknown action variable '" + tok.get<std::string>() + "'");
                rule.targets.push_back(*v);
            }
            rule.boundary = jr.at("boundary").get<std::string>();
            if (rule.pattern.empty()) throw SpecError("mapping rule with empty pattern");
            if (rule.targets.empty()) throw SpecError("mapping rule with no targets");
            if (rule.boundary.empty()) throw SpecError("mapping rule with empty boundary");
            out.rules.push_back(std::move(rule));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("mapping rules malformed: ") + e.what());
    }
    return out;
}

inline MappingRuleset parse_mapping_rules_file(const std::filesystem::path& path) {
    return parse_mapping_rules(detail::read_file(path));
}

inline std::vector<HypothesisSpec> parse_hypotheses(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("hypothesis specs are not valid JSON: ") + e.what());
    }
    std::vector<HypothesisSpec> out;
    std::set<std::string> seen;
    try {
        for (const auto& jh : j.at("hypotheses")) {
            HypothesisSpec spec;
            spec.id = jh.at("id").get<std::string>();
            if (!seen.insert(spec.id).second) {
                throw DuplicateIdError("duplicate hypothesis id '" + spec.id + "'");
            }
            const std::string kind = jh.at("kind").get<std::string>();
            if (kind == "empirical") {
                spec.kind = ClaimKind::Empirical;
            } else if (kind == "conceptual") {
                spec.kind = ClaimKind::Conceptual;
            } else {
                throw SpecError("hypothesis '" + spec.id + "' has unknown kind '" + kind + "'");
            }
            for (const auto& req : jh.at("required")) {
                spec.required.push_back(req.get<std::string>());
            }
            if (spec.required.empty()) {
                throw SpecError("hypothesis '" + spec.id + "' declares no required indicators");
            }
            if (jh.contains("projection_sensitivity")) {
                const std::string s = jh.at("projection_sensitivity").get<std::string>();
                if (s == "under_projection") {
                    spec.sensitivity = ProjectionSensitivity::UnderProjection;
                } else if (s == "with_caution") {
                    spec.sensitivity = ProjectionSensitivity::WithCaution;
                } else {
                    throw SpecError("hypothesis '" + spec.id +
                                    "' has unknown projection sensitivity '" + s + "'");
                }
            }
            spec.boundary = jh.at("boundary").get<std::string>();
            if (spec.boundary.empty()) {
                throw SpecError("hypothesis '" + spec.id + "' lacks a boundary statement");
            }
            out.push_back(std::move(spec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("hypothesis specs malformed: ") + e.what());
    }
    return out;
}

inline std::vector<HypothesisSpec> parse_hypotheses_file(const std::filesystem::path& path) {
    return parse_hypotheses(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Sector series and friction-index configuration
// ---------------------------------------------------------------------------

/// Sector table: a `year` column, the seven component columns and an
/// optional `outcome` column, with `# sector:` / `# label:` directives.
inline SectorSeries parse_sector_series(std::istream& in, const std::string& default_label) {
    SectorSeries series;
    series.sector_label = default_label;

    std::vector<std::string> header;
    std::string line;
    std::size_t line_no = 0;
    bool has_outcome = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        if (trimmed[0] == '#') {
            const auto directive = [&](std::string_view key) -> std::optional<std::string> {
                const std::string prefix = "# " + std::string(key) + ":";
                if (trimmed.rfind(prefix, 0) == 0) {
                    return detail::trim(trimmed.substr(prefix.size()));
                }
                return std::nullopt;
            };
            if (auto v = directive("sector")) series.sector_label = *v;
            if (auto v = directive("label")) series.data_label = *v;
            continue;
        }
        const auto cols = detail::split_tabs(line);
        if (header.empty()) {
            header = cols;
            if (header.empty() || header[0] != "year") {
                throw IngestError(line_no, 1, "sector table must start with a 'year' column");
            }
            std::set<ComponentKind> present;
            for (std::size_t i = 1; i < header.size(); ++i) {
                const std::string name = detail::trim(header[i]);
                if (name == "outcome") {
                    has_outcome = true;
                    if (i + 1 != header.size()) {
                        throw IngestError(line_no, i + 1, "'outcome' must be the last column");
                    }
                    continue;
                }
                const auto kind = component_from_token(name);
                if (!kind) throw IngestError(line_no, i + 1, "unknown component '" + name + "'");
                present.insert(*kind);
            }
            if (present.size() != kComponentCount) {
                throw IncompleteObservation("sector table must carry all seven components");
            }
            continue;
        }

        if (cols.size() != header.size()) {
            throw IngestError(line_no, cols.size(), "row width differs from header");
        }
        SectorObservation obs;
        const auto year_v = detail::parse_int(cols[0]);
        if (!year_v) throw IngestError(line_no, 1, "year '" + cols[0] + "' is not an integer");
        obs.period = year(*year_v);
        for (std::size_t i = 1; i < header.size(); ++i) {
            const std::string name = detail::trim(header[i]);
            const auto value = detail::parse_double(cols[i]);
            if (!value) {
                throw IngestError(line_no, i + 1, "value '" + cols[i] + "' is not numeric");
            }
            if (name == "outcome") {
                series.outcomes.push_back(*value);
                continue;
            }
            const auto kind = component_from_token(name);
            for (std::size_t c = 0; c < kComponentCount; ++c) {
                if (kComponentKinds[c] == *kind) obs.raw[c] = *value;
            }
        }
        series.observations.push_back(obs);
    }
    if (has_outcome && series.outcomes.size() != series.observations.size()) {
        throw AlignmentError("sector outcome column is incomplete");
    }
    series.validate();
    return series;
}

struct CfConfig {
    NormScheme normalization = NormScheme::MinMax;
    CfWeights weights = equal_weights();
    std::vector<std::filesystem::path> sector_files;
};

inline CfConfig parse_cf_config(const std::string& text,
                                const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("friction-index config is not valid JSON: ") + e.what());
    }
    CfConfig out;
    try {
        if (j.contains("normalization")) {
            const std::string n = j.at("normalization").get<std::string>();
            if (n == "minmax") {
                out.normalization = NormScheme::MinMax;
            } else if (n == "zscore") {
                out.normalization = NormScheme::ZScore;
            } else {
                throw SpecError("unknown normalization '" + n + "'");
            }
        }
        const std::string scheme =
            j.contains("scheme") ? j.at("scheme").get<std::string>() : "equal";
        if (scheme == "equal") {
            out.weights = equal_weights();
        } else if (scheme == "expert" || scheme == "empirical") {
            out.weights.scheme =
                scheme == "expert" ? WeightScheme::Expert : WeightScheme::Empirical;
            const auto& jw = j.at("weights");
            for (std::size_t c = 0; c < kComponentCount; ++c) {
                out.weights.w[c] =
                    jw.at(std::string(component_token(kComponentKinds[c]))).get<double>();
            }
            out.weights.validate();
        } else {
            throw SpecError("unknown weighting scheme '" + scheme + "'");
        }
        for (const auto& p : j.at("sectors")) {
            std::filesystem::path path = p.get<std::string>();
            if (path.is_relative()) path = base_dir / path;
            out.sector_files.push_back(path);
        }
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("friction-index config malformed: ") + e.what());
    }
    return out;
}

inline CfConfig parse_cf_config_file(const std::filesystem::path& path) {
    return parse_cf_config(detail::read_file(path), path.parent_path());
}

}  // namespace ecodiag
