#include "aiodc/classify.hpp"

#include <algorithm>
#include <set>

#include "aiodc/text.hpp"

namespace aiodc {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view s, const std::array<Enum, N>& values) {
  const auto t = text::trim(s);
  for (auto v : values) {
    if (text::iequals(t, to_string(v))) return v;
  }
  return std::nullopt;
}

bool word_start_match(std::string_view label, std::string_view keyword) {
  for (auto pos = label.find(keyword); pos != std::string_view::npos;
       pos = label.find(keyword, pos + 1)) {
    if (pos == 0 || label[pos - 1] == ' ') return true;
  }
  return false;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

std::string_view to_string(Criticality c) {
  switch (c) {
    case Criticality::SafetyCritical: return "SafetyCritical";
    case Criticality::Enterprise: return "Enterprise";
    case Criticality::NonCritical: return "NonCritical";
  }
  return "Enterprise";
}

std::string_view to_string(Reversibility r) {
  switch (r) {
    case Reversibility::Irreversible: return "Irreversible";
    case Reversibility::Reversible: return "Reversible";
    case Reversibility::Transient: return "Transient";
  }
  return "Reversible";
}

std::string_view to_string(Scope s) {
  return s == Scope::Systemic ? "Systemic" : "Localized";
}

std::optional<Criticality> parse_criticality(std::string_view s) {
  return parse_enum(s, kCriticalities);
}
std::optional<Reversibility> parse_reversibility(std::string_view s) {
  return parse_enum(s, kReversibilities);
}
std::optional<Scope> parse_scope(std::string_view s) { return parse_enum(s, kScopes); }

SeverityMatrix SeverityMatrix::standard() {
  SeverityMatrix m;
  m.set_base(Reversibility::Irreversible, Scope::Systemic, Severity::Catastrophic);
  m.set_base(Reversibility::Irreversible, Scope::Localized, Severity::Critical);
  m.set_base(Reversibility::Reversible, Scope::Systemic, Severity::Critical);
  m.set_base(Reversibility::Reversible, Scope::Localized, Severity::High);
  m.set_base(Reversibility::Transient, Scope::Systemic, Severity::High);
  m.set_base(Reversibility::Transient, Scope::Localized, Severity::Medium);
  m.set_shift(Criticality::SafetyCritical, +1);
  m.set_shift(Criticality::Enterprise, 0);
  m.set_shift(Criticality::NonCritical, -1);
  return m;
}

Severity assign_severity(const SeverityContext& ctx, const SeverityMatrix& matrix) {
  const int rank = severity_rank(matrix.base(ctx.reversibility, ctx.scope)) +
                   matrix.shift(ctx.criticality);
  return *severity_from_rank(std::clamp(rank, 1, 5));
}

RuleSet parse_rules(std::string_view contents, const Taxonomy& tax) {
  enum class Section { None, Ai, Impact, Severity };
  RuleSet rules;
  Section section = Section::None;
  std::set<std::string> ai_patterns, impact_patterns;
  std::array<std::array<bool, 2>, 3> base_seen{};
  std::array<bool, 3> shift_seen{};

  int line_no = 0;
  for (const auto& raw : text::lines(contents)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '@') {
      const auto fields = text::split_whitespace(line);
      if (fields.size() != 2 || fields[0] != "@version") fail(line_no, "expected '@version <text>'");
      rules.version = fields[1];
      continue;
    }
    if (line.front() == '[') {
      if (line == "[ai-rules]") {
        section = Section::Ai;
      } else if (line == "[impact-rules]") {
        section = Section::Impact;
      } else if (line == "[severity-matrix]") {
        section = Section::Severity;
      } else {
        fail(line_no, "unknown section " + std::string(line));
      }
      continue;
    }
    const auto arrow = line.find("=>");
    if (arrow == std::string_view::npos) fail(line_no, "expected '<lhs> => <rhs>'");
    const auto lhs = text::trim(line.substr(0, arrow));
    const auto rhs = text::trim(line.substr(arrow + 2));

    switch (section) {
      case Section::None: fail(line_no, "rule outside of a section");
      case Section::Ai: {
        auto pattern = text::normalize_label(lhs);
        const auto attr = parse_ai_attribute(rhs);
        if (!attr || *attr == AIAttribute::Unclassified) {
          fail(line_no, "unknown AI attribute '" + std::string(rhs) + "'");
        }
        if (!ai_patterns.insert(pattern).second) fail(line_no, "duplicate ai-rule '" + pattern + "'");
        rules.ai_rules.push_back({std::move(pattern), *attr});
        break;
      }
      case Section::Impact: {
        auto pattern = text::normalize_label(lhs);
        ImpactRule rule{pattern, {}};
        for (const auto& part : text::split(rhs, ';')) {
          if (text::trim(part).empty()) continue;
          auto path = parse_impact_path(part);
          if (!path) fail(line_no, "malformed impact path '" + std::string(text::trim(part)) + "'");
          if (auto diag = validate_impact_path(*path, tax)) {
            throw Error(diag->code, "line " + std::to_string(line_no) + ": " + diag->message);
          }
          rule.paths.push_back(std::move(*path));
        }
        if (!impact_patterns.insert(pattern).second) {
          fail(line_no, "duplicate impact-rule '" + pattern + "'");
        }
        rules.impact_rules.push_back(std::move(rule));
        break;
      }
      case Section::Severity: {
        const auto fields = text::split_whitespace(lhs);
        if (fields.size() == 2 && fields[0] == "shift") {
          const auto crit = parse_criticality(fields[1]);
          if (!crit) fail(line_no, "unknown criticality '" + fields[1] + "'");
          int v = 0;
          if (rhs == "+1") v = 1;
          else if (rhs == "0") v = 0;
          else if (rhs == "-1") v = -1;
          else fail(line_no, "shift must be +1, 0 or -1");
          rules.severity_matrix.set_shift(*crit, v);
          shift_seen[static_cast<int>(*crit)] = true;
        } else if (fields.size() == 2) {
          const auto rev = parse_reversibility(fields[0]);
          const auto scope = parse_scope(fields[1]);
          const auto sev = parse_severity(rhs);
          if (!rev || !scope || !sev) fail(line_no, "expected '<reversibility> <scope> => <severity>'");
          rules.severity_matrix.set_base(*rev, *scope, *sev);
          base_seen[static_cast<int>(*rev)][static_cast<int>(*scope)] = true;
        } else {
          fail(line_no, "malformed severity-matrix entry");
        }
        break;
      }
    }
  }

  for (auto r : kReversibilities) {
    for (auto s : kScopes) {
      if (!base_seen[static_cast<int>(r)][static_cast<int>(s)]) {
        fail(line_no, "severity matrix has no cell for " + std::string(to_string(r)) + " " +
                          std::string(to_string(s)));
      }
    }
  }
  for (auto c : kCriticalities) {
    if (!shift_seen[static_cast<int>(c)]) {
      fail(line_no, "severity matrix has no shift for " + std::string(to_string(c)));
    }
  }
  return rules;
}

RuleSet load_rules(const std::filesystem::path& path, const Taxonomy& tax) {
  return parse_rules(text::read_file(path), tax);
}

AiMatch explain_ai_attribute(const DefectRecord& record, const RuleSet& rules) {
  const auto label = text::normalize_label(record.defect_type_label);
  if (label.empty()) return {};
  for (const auto& rule : rules.ai_rules) {
    if (rule.pattern == label) return {rule.attribute, MatchKind::Exact, rule.pattern};
  }
  for (const auto& kw : kKeywordHeuristics) {
    if (word_start_match(label, kw.keyword)) {
      return {kw.attribute, MatchKind::Keyword, std::string(kw.keyword)};
    }
  }
  return {};
}

AIAttribute classify_ai_attribute(const DefectRecord& record, const RuleSet& rules) {
  return explain_ai_attribute(record, rules).attribute;
}

std::vector<ImpactPath> map_impact(const DefectRecord& record, const RuleSet& rules) {
  const auto label = text::normalize_label(record.defect_type_label);
  for (const auto& rule : rules.impact_rules) {
    if (rule.pattern == label) return rule.paths;
  }
  return {};
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Rule: return "Rule";
    case Provenance::Human: return "Human";
    case Provenance::Resolved: return "Resolved";
  }
  return "Rule";
}

std::optional<Provenance> parse_provenance(std::string_view s) {
  const auto t = text::trim(s);
  for (auto p : {Provenance::Rule, Provenance::Human, Provenance::Resolved}) {
    if (text::iequals(t, to_string(p))) return p;
  }
  return std::nullopt;
}

ContextMap parse_contexts(std::string_view contents) {
  ContextMap out;
  int line_no = 0;
  for (const auto& raw : text::lines(contents)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::split_whitespace(line);
    if (f.size() != 4) fail(line_no, "expected 'id criticality reversibility scope'");
    const auto crit = parse_criticality(f[1]);
    const auto rev = parse_reversibility(f[2]);
    const auto scope = parse_scope(f[3]);
    if (!crit) fail(line_no, "unknown criticality '" + f[1] + "'");
    if (!rev) fail(line_no, "unknown reversibility '" + f[2] + "'");
    if (!scope) fail(line_no, "unknown scope '" + f[3] + "'");
    if (!out.emplace(f[0], SeverityContext{*crit, *rev, *scope}).second) {
      throw Error(ErrorCode::DuplicateId, f[0]);
    }
  }
  return out;
}

ContextMap load_contexts(const std::filesystem::path& path) {
  return parse_contexts(text::read_file(path));
}

std::vector<ClassificationLabel> classify_dataset(const std::vector<DefectRecord>& records,
                                                  const RuleSet& rules,
                                                  const ContextMap& contexts) {
  std::set<std::string_view> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw Error(ErrorCode::DuplicateId, r.id);
  }
  for (const auto& [id, ctx] : contexts) {
    if (!ids.count(id)) throw Error(ErrorCode::UnknownContextId, id);
  }

  std::vector<ClassificationLabel> labels;
  labels.reserve(records.size());
  for (const auto& r : records) {
    ClassificationLabel label;
    label.defect_id = r.id;
    const auto match = explain_ai_attribute(r, rules);
    label.ai = match.attribute;
    label.impacts = map_impact(r, rules);
    label.provenance = Provenance::Rule;
    switch (match.kind) {
      case MatchKind::Exact: label.rationale = "exact rule '" + match.matched + "'"; break;
      case MatchKind::Keyword: label.rationale = "keyword '" + match.matched + "'"; break;
      case MatchKind::None: label.rationale = "no rule matched"; break;
    }
    if (const auto it = contexts.find(r.id); it != contexts.end()) {
      label.severity = assign_severity(it->second, rules.severity_matrix);
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

}  // namespace aiodc
