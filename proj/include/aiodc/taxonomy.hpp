#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aiodc/error.hpp"

namespace aiodc {

// AI attribute of a defect. Unclassified is internal: it marks defects that
// no rule could place and that need a human annotator.
enum class AIAttribute { Data, Learning, Thinking, NotRelated, Unclassified };

inline constexpr std::array<AIAttribute, 4> kAiCategories = {
    AIAttribute::Data, AIAttribute::Learning, AIAttribute::Thinking,
    AIAttribute::NotRelated};

std::string_view to_string(AIAttribute a);
std::string_view describe(AIAttribute a);
std::optional<AIAttribute> parse_ai_attribute(std::string_view s);

enum class Severity { Low = 1, Medium = 2, High = 3, Critical = 4, Catastrophic = 5 };

// Descending, the order severity tables are reported in.
inline constexpr std::array<Severity, 5> kSeverityLevels = {
    Severity::Catastrophic, Severity::Critical, Severity::High, Severity::Medium,
    Severity::Low};

constexpr int severity_rank(Severity s) noexcept { return static_cast<int>(s); }

constexpr auto operator<=>(Severity a, Severity b) noexcept {
  return severity_rank(a) <=> severity_rank(b);
}

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view s);
// Inverse of severity_rank; nullopt outside 1..5.
std::optional<Severity> severity_from_rank(int rank);

// Original ODC defect types plus the two Cloud-ODC additions.
enum class OdcDefectType {
  Function,
  Interface,
  Checking,
  Assignment,
  TimingSerialization,
  BuildPackageMerge,
  Documentation,
  Algorithm,
  Isolation,
  IaaSPaaS,
};

std::string_view to_string(OdcDefectType t);
std::optional<OdcDefectType> parse_odc_defect_type(std::string_view s);
bool is_cloud_extension(OdcDefectType t);

struct OdcBaseAttributes {
  std::optional<OdcDefectType> defect_type;
  std::optional<std::string> trigger;
  std::optional<std::string> phase_found;

  bool operator==(const OdcBaseAttributes&) const = default;
};

enum class QualityModel { AI, AIP, Shared };

std::string_view to_string(QualityModel m);
std::optional<QualityModel> parse_quality_model(std::string_view s);

struct QualityCharacteristic {
  std::string name;
  QualityModel model = QualityModel::AI;
  int layer = 1;
  // Shared characteristics can sit at a different depth in the AIP
  // hierarchy than in the AI one; unset means "same as layer".
  std::optional<int> aip_layer;
  std::string comment;

  // Layer of this characteristic when used inside a path of `path_model`.
  int layer_in(QualityModel path_model) const {
    if (path_model == QualityModel::AIP && aip_layer) return *aip_layer;
    return layer;
  }

  bool operator==(const QualityCharacteristic&) const = default;
};

struct ImpactPath {
  QualityModel model = QualityModel::AI;  // AI or AIP only
  std::vector<std::string> characteristics;  // layer-1 first

  auto operator<=>(const ImpactPath&) const = default;
};

// "AI:Trustworthiness>Accuracy"
std::string render_impact_path(const ImpactPath& p);
std::optional<ImpactPath> parse_impact_path(std::string_view s);

class Taxonomy {
 public:
  Taxonomy() = default;
  // Throws DuplicateCharacteristic / BadLayer.
  Taxonomy(std::string version, std::vector<QualityCharacteristic> characteristics);

  const std::string& version() const { return version_; }
  const std::vector<QualityCharacteristic>& characteristics() const {
    return characteristics_;
  }
  const QualityCharacteristic* find(std::string_view name) const;

  bool operator==(const Taxonomy&) const = default;

 private:
  std::string version_;
  std::vector<QualityCharacteristic> characteristics_;
};

// Characteristics the bundled impact rules rely on.
inline constexpr std::array<std::string_view, 10> kRequiredCharacteristics = {
    "Maintainability", "Reliability",  "Security",    "Integrity",      "Accuracy",
    "Trustworthiness", "Robustness",   "Effectiveness", "Explainability", "Completeness"};

Taxonomy parse_taxonomy(std::string_view contents);
Taxonomy load_taxonomy(const std::filesystem::path& path);
std::string render_taxonomy(const Taxonomy& tax);

struct PathDiagnostic {
  ErrorCode code;
  std::string message;
};

// nullopt when the path is valid, otherwise the first violated rule.
std::optional<PathDiagnostic> validate_impact_path(const ImpactPath& path,
                                                   const Taxonomy& tax);

}  // namespace aiodc
