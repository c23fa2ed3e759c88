#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aiodc/classify.hpp"

namespace aiodc {

// Label file: UTF-8, one label per line, tab-separated columns
//   defect_id  annotator  ai  severity  impacts  rationale  provenance
// '-' marks an absent annotator/severity/impact list; impacts are
// ';'-joined paths ("AI:Trustworthiness>Accuracy;AIP:Accuracy"). Text
// fields use backslash escapes for tab, newline and backslash. The
// provenance column may be omitted on import (defaults to Human). Lines
// starting with '#' are comments.
std::string render_label_line(const ClassificationLabel& label);
std::string render_labels(const std::vector<ClassificationLabel>& labels);

std::vector<ClassificationLabel> parse_labels(std::string_view contents);
std::vector<ClassificationLabel> load_labels(const std::filesystem::path& path);

std::string render_impacts(const std::vector<ImpactPath>& paths);
std::vector<ImpactPath> parse_impacts(std::string_view s);

// Structured form shared by the session log, the server and reports.
nlohmann::json label_to_json(const ClassificationLabel& label);
ClassificationLabel label_from_json(const nlohmann::json& j);  // throws ParseError

}  // namespace aiodc
