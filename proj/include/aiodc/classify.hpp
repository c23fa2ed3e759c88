#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aiodc/ingest.hpp"
#include "aiodc/taxonomy.hpp"

namespace aiodc {

enum class Criticality { SafetyCritical, Enterprise, NonCritical };
enum class Reversibility { Irreversible, Reversible, Transient };
enum class Scope { Systemic, Localized };

inline constexpr std::array<Criticality, 3> kCriticalities = {
    Criticality::NonCritical, Criticality::Enterprise, Criticality::SafetyCritical};
inline constexpr std::array<Reversibility, 3> kReversibilities = {
    Reversibility::Irreversible, Reversibility::Reversible, Reversibility::Transient};
inline constexpr std::array<Scope, 2> kScopes = {Scope::Systemic, Scope::Localized};

std::string_view to_string(Criticality c);
std::string_view to_string(Reversibility r);
std::string_view to_string(Scope s);
std::optional<Criticality> parse_criticality(std::string_view s);
std::optional<Reversibility> parse_reversibility(std::string_view s);
std::optional<Scope> parse_scope(std::string_view s);

struct SeverityContext {
  Criticality criticality = Criticality::Enterprise;
  Reversibility reversibility = Reversibility::Reversible;
  Scope scope = Scope::Localized;

  bool operator==(const SeverityContext&) const = default;
};

// Base severity per (reversibility, scope) plus a criticality shift,
// clamped to 1..5.
class SeverityMatrix {
 public:
  Severity base(Reversibility r, Scope s) const {
    return base_[static_cast<int>(r)][static_cast<int>(s)];
  }
  int shift(Criticality c) const { return shift_[static_cast<int>(c)]; }

  void set_base(Reversibility r, Scope s, Severity v) {
    base_[static_cast<int>(r)][static_cast<int>(s)] = v;
  }
  void set_shift(Criticality c, int v) { shift_[static_cast<int>(c)] = v; }

  // The default decision matrix (Keras study reproduces with Enterprise).
  static SeverityMatrix standard();

  bool operator==(const SeverityMatrix&) const = default;

 private:
  std::array<std::array<Severity, 2>, 3> base_{};
  std::array<int, 3> shift_{};
};

Severity assign_severity(const SeverityContext& ctx, const SeverityMatrix& matrix);

struct AiRule {
  std::string pattern;  // normalized defect-type label
  AIAttribute attribute;
};

struct ImpactRule {
  std::string pattern;
  std::vector<ImpactPath> paths;
};

struct RuleSet {
  std::string version;
  std::vector<AiRule> ai_rules;
  std::vector<ImpactRule> impact_rules;
  SeverityMatrix severity_matrix;
};

// Rule file: '@version <text>', then sections [ai-rules], [impact-rules],
// [severity-matrix], one "<lhs> => <rhs>" rule per line. Impact paths are
// validated against `tax`; the severity matrix must be total.
RuleSet parse_rules(std::string_view contents, const Taxonomy& tax);
RuleSet load_rules(const std::filesystem::path& path, const Taxonomy& tax);

// Keyword fallback used when no ai-rule matches exactly. Scanned in order;
// a keyword matches at the start of any word of the normalized label.
struct KeywordRule {
  std::string_view keyword;
  AIAttribute attribute;
};
inline constexpr std::array<KeywordRule, 16> kKeywordHeuristics = {{
    {"data", AIAttribute::Data},
    {"dataset", AIAttribute::Data},
    {"tensor shape", AIAttribute::Data},
    {"preprocess", AIAttribute::Data},
    {"epoch", AIAttribute::Learning},
    {"batch", AIAttribute::Learning},
    {"loss", AIAttribute::Learning},
    {"optimiz", AIAttribute::Learning},
    {"train", AIAttribute::Learning},
    {"layer", AIAttribute::Thinking},
    {"architecture", AIAttribute::Thinking},
    {"activation", AIAttribute::Thinking},
    {"inference", AIAttribute::Thinking},
    {"network", AIAttribute::Thinking},
    {"api", AIAttribute::NotRelated},
    {"documentation", AIAttribute::NotRelated},
}};

enum class MatchKind { Exact, Keyword, None };

struct AiMatch {
  AIAttribute attribute = AIAttribute::Unclassified;
  MatchKind kind = MatchKind::None;
  std::string matched;  // pattern or keyword
};

AiMatch explain_ai_attribute(const DefectRecord& record, const RuleSet& rules);
AIAttribute classify_ai_attribute(const DefectRecord& record, const RuleSet& rules);

std::vector<ImpactPath> map_impact(const DefectRecord& record, const RuleSet& rules);

enum class Provenance { Rule, Human, Resolved };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view s);

struct ClassificationLabel {
  std::string defect_id;
  AIAttribute ai = AIAttribute::Unclassified;
  std::optional<Severity> severity;
  std::vector<ImpactPath> impacts;
  Provenance provenance = Provenance::Rule;
  std::optional<std::string> annotator;
  std::optional<std::string> rationale;

  bool operator==(const ClassificationLabel&) const = default;
};

using ContextMap = std::map<std::string, SeverityContext, std::less<>>;

// Lines "id criticality reversibility scope"; '#' comments.
ContextMap parse_contexts(std::string_view contents);
ContextMap load_contexts(const std::filesystem::path& path);

std::vector<ClassificationLabel> classify_dataset(const std::vector<DefectRecord>& records,
                                                  const RuleSet& rules,
                                                  const ContextMap& contexts);

}  // namespace aiodc
