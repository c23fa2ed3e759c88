#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aiodc/taxonomy.hpp"

namespace aiodc {

enum class Platform { GitHub, StackOverflow, Other };

std::string_view to_string(Platform p);
std::optional<Platform> parse_platform(std::string_view s);

struct DefectRecord {
  std::string id;
  Platform platform = Platform::Other;
  std::string framework;  // lowercase tag, e.g. "keras"
  std::string title;
  std::string description;
  std::string defect_type_label;  // normalized; empty when missing
  std::set<std::string> cross_refs;
  OdcBaseAttributes odc;
  std::optional<std::string> created_at;  // ISO-8601 UTC, "YYYY-MM-DDTHH:MM:SSZ"

  bool operator==(const DefectRecord&) const = default;
};

enum class DatasetFormat { Canonical, Csv, GithubExport };

std::optional<DatasetFormat> parse_dataset_format(std::string_view s);

struct RejectedRow {
  std::size_t row;  // 1-based source row (line for canonical, data row for csv)
  std::string reason;
};

struct LoadResult {
  std::vector<DefectRecord> records;
  std::vector<RejectedRow> rejected;
  // Loaded, but without a defect-type label; these classify as Unclassified.
  std::vector<std::string> flagged;
};

struct LoadOptions {
  // github_export only: file with lines "<issue label> => <defect type label>".
  std::optional<std::filesystem::path> label_mapping;
  // github_export only: framework tag stamped on every record.
  std::string framework = "unknown";
};

LoadResult load_defects(const std::filesystem::path& path, DatasetFormat format,
                        const LoadOptions& options = {});

// Parsers over in-memory content, used by load_defects.
LoadResult parse_canonical(std::string_view contents);
LoadResult parse_csv_dataset(std::string_view contents);
LoadResult parse_github_export(std::string_view contents,
                               const std::vector<std::pair<std::string, std::string>>& mapping,
                               std::string_view framework);

std::vector<std::pair<std::string, std::string>> parse_label_mapping(std::string_view contents);

// One JSON object per line, keys sorted, trailing newline.
std::string render_canonical_record(const DefectRecord& r);
std::string render_canonical(const std::vector<DefectRecord>& records);

std::vector<DefectRecord> filter_defects(const std::vector<DefectRecord>& records,
                                         std::optional<Platform> platform,
                                         std::optional<std::string_view> framework);

struct DedupeResult {
  std::vector<DefectRecord> kept;
  std::vector<std::pair<DefectRecord, std::string>> dropped;  // (record, kept id)
};

// Records are duplicates when one id appears in the other's cross_refs,
// closed transitively. Each class keeps its lexicographically smallest id.
DedupeResult dedupe_by_issue_id(const std::vector<DefectRecord>& records);

}  // namespace aiodc
