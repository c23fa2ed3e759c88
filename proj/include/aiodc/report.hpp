#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aiodc/analyze.hpp"
#include "aiodc/annotate.hpp"

namespace aiodc {

enum class ReportFormat { Text, Csv, Structured };

std::optional<ReportFormat> parse_report_format(std::string_view s);
std::string_view file_extension(ReportFormat f);

std::string render_distribution(const Distribution& d, ReportFormat format);
std::string render_contingency(const ContingencyTable& t, ReportFormat format);
std::string render_impact_frequencies(std::span<const ImpactFrequency> freqs, ReportFormat format);

// One entry per attribute; an unset result carries the error that
// prevented computing it (NoOverlap, DegenerateMarginals).
struct AgreementEntry {
  AgreementAttribute attribute;
  std::optional<AgreementResult> result;
  std::string error;
};
std::vector<AgreementEntry> agreement_summary(const AnnotationSession& session);
std::string render_agreement(std::span<const AgreementEntry> entries, ReportFormat format);

// Rows are AI categories, columns severity levels, integer cells.
std::string render_heatmap_csv(const ContingencyTable& t);

nlohmann::json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);
nlohmann::json contingency_to_json(const ContingencyTable& t);
nlohmann::json agreement_to_json(std::span<const AgreementEntry> entries);

// Inverse of the CSV rendering; throws ParseError.
Distribution parse_distribution_csv(std::string_view csv, std::string attribute);

struct BundleOptions {
  std::string dataset_id = "unnamed";
  ReportFormat format = ReportFormat::Text;
  const AnnotationSession* session = nullptr;  // agreement artifact source
  // Fixed timestamp for reproducible metadata; current UTC time when unset.
  std::optional<std::string> timestamp;
};

struct ReportBundle {
  nlohmann::json metadata;
  std::map<std::string, std::filesystem::path> artifacts;  // name -> written file
};

// Writes one-way (AI, severity), two-way, heatmap, impact-frequency and
// agreement artifacts plus metadata.json into out_dir. Artifact bytes depend
// only on the inputs; only metadata's "generated_at" line varies by run.
ReportBundle export_analysis_bundle(std::span<const ClassificationLabel> labels,
                                    const RuleSet& rules, const Taxonomy& taxonomy,
                                    const std::filesystem::path& out_dir,
                                    const BundleOptions& options = {});

}  // namespace aiodc
