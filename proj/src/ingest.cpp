#include "aiodc/ingest.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <regex>
#include <unordered_map>

#include <json.hpp>

#include "aiodc/text.hpp"

namespace aiodc {

using nlohmann::json;

namespace {

const std::regex& timestamp_pattern() {
  static const std::regex re(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$)");
  return re;
}

// Thrown inside per-row parsing; converted into a RejectedRow.
struct RowError {
  std::string reason;
};

std::string require_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw RowError{std::string("missing or non-string field '") + key + "'"};
  }
  return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw RowError{std::string("field '") + key + "' must be a string"};
  return it->get<std::string>();
}

// Shared field validation for all adapters.
void finish_record(DefectRecord& r, std::string_view platform, std::string_view defect_type,
                   std::string_view created_at) {
  if (text::trim(r.id).empty()) throw RowError{"empty id"};
  r.id = std::string(text::trim(r.id));
  const auto p = parse_platform(platform);
  if (!p) throw RowError{"unknown platform '" + std::string(platform) + "'"};
  r.platform = *p;
  r.framework = text::normalize_label(r.framework);
  r.defect_type_label = text::normalize_label(r.defect_type_label);
  if (!text::trim(defect_type).empty()) {
    const auto t = parse_odc_defect_type(defect_type);
    if (!t) throw RowError{"unknown ODC defect type '" + std::string(defect_type) + "'"};
    r.odc.defect_type = *t;
  }
  if (!created_at.empty()) {
    if (!std::regex_match(created_at.begin(), created_at.end(), timestamp_pattern())) {
      throw RowError{"created_at must be YYYY-MM-DDTHH:MM:SSZ"};
    }
    r.created_at = std::string(created_at);
  }
}

class Collector {
 public:
  void add(DefectRecord r) {
    if (!ids_.insert(r.id).second) throw Error(ErrorCode::DuplicateId, r.id);
    if (r.defect_type_label.empty()) result_.flagged.push_back(r.id);
    result_.records.push_back(std::move(r));
  }
  void reject(std::size_t row, std::string reason) {
    result_.rejected.push_back({row, std::move(reason)});
  }
  LoadResult take() { return std::move(result_); }

 private:
  std::set<std::string> ids_;
  LoadResult result_;
};

DefectRecord record_from_json(const json& obj) {
  if (!obj.is_object()) throw RowError{"row is not an object"};
  DefectRecord r;
  r.id = require_string(obj, "id");
  const auto platform = require_string(obj, "platform");
  r.framework = require_string(obj, "framework");
  r.title = optional_string(obj, "title");
  r.description = optional_string(obj, "description");
  r.defect_type_label = optional_string(obj, "defect_type_label");
  if (const auto it = obj.find("cross_refs"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw RowError{"cross_refs must be an array"};
    for (const auto& ref : *it) {
      if (!ref.is_string()) throw RowError{"cross_refs entries must be strings"};
      r.cross_refs.insert(ref.get<std::string>());
    }
  }
  std::string defect_type;
  if (const auto it = obj.find("odc"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) throw RowError{"odc must be an object"};
    defect_type = optional_string(*it, "defect_type");
    if (auto t = optional_string(*it, "trigger"); !t.empty()) r.odc.trigger = t;
    if (auto p = optional_string(*it, "phase_found"); !p.empty()) r.odc.phase_found = p;
  }
  finish_record(r, platform, defect_type, optional_string(obj, "created_at"));
  return r;
}

// Minimal RFC 4180 reader: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> read_csv(std::string_view s) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r': break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default: field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::GitHub: return "GitHub";
    case Platform::StackOverflow: return "StackOverflow";
    case Platform::Other: return "Other";
  }
  return "Other";
}

std::optional<Platform> parse_platform(std::string_view s) {
  const auto key = text::to_lower(text::trim(s));
  if (key == "github") return Platform::GitHub;
  if (key == "stackoverflow" || key == "stack overflow" || key == "stack_overflow") {
    return Platform::StackOverflow;
  }
  if (key == "other") return Platform::Other;
  return std::nullopt;
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view s) {
  const auto key = text::to_lower(text::trim(s));
  if (key == "canonical" || key == "jsonl") return DatasetFormat::Canonical;
  if (key == "csv") return DatasetFormat::Csv;
  if (key == "github_export" || key == "github-export") return DatasetFormat::GithubExport;
  return std::nullopt;
}

LoadResult parse_canonical(std::string_view contents) {
  Collector out;
  std::size_t row = 0;
  for (const auto& line : text::lines(contents)) {
    ++row;
    if (text::trim(line).empty()) continue;
    try {
      const auto obj = json::parse(line);
      out.add(record_from_json(obj));
    } catch (const json::exception& e) {
      out.reject(row, std::string("malformed JSON: ") + e.what());
    } catch (const RowError& e) {
      out.reject(row, e.reason);
    }
  }
  return out.take();
}

LoadResult parse_csv_dataset(std::string_view contents) {
  const auto rows = read_csv(contents);
  Collector out;
  if (rows.empty()) return out.take();

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    col[text::normalize_label(rows[0][i])] = i;
  }
  for (const char* required : {"id", "platform", "framework"}) {
    if (!col.count(required)) {
      throw Error(ErrorCode::ParseError, std::string("row 0: CSV header lacks '") + required + "'");
    }
  }
  const auto width = rows[0].size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() == 1 && text::trim(cells[0]).empty()) continue;
    try {
      if (cells.size() != width) {
        throw RowError{"expected " + std::to_string(width) + " fields, got " +
                       std::to_string(cells.size())};
      }
      auto get = [&](const char* name) -> std::string {
        const auto it = col.find(name);
        return it == col.end() ? std::string() : cells[it->second];
      };
      DefectRecord rec;
      rec.id = get("id");
      rec.framework = get("framework");
      rec.title = get("title");
      rec.description = get("description");
      rec.defect_type_label = get("defect_type_label");
      for (const auto& ref : text::split(get("cross_refs"), ';')) {
        const auto t = text::trim(ref);
        if (!t.empty()) rec.cross_refs.emplace(t);
      }
      if (auto t = get("trigger"); !t.empty()) rec.odc.trigger = t;
      if (auto p = get("phase_found"); !p.empty()) rec.odc.phase_found = p;
      finish_record(rec, get("platform"), get("defect_type"), text::trim(get("created_at")));
      out.add(std::move(rec));
    } catch (const RowError& e) {
      out.reject(r, e.reason);
    }
  }
  return out.take();
}

std::vector<std::pair<std::string, std::string>> parse_label_mapping(std::string_view contents) {
  std::vector<std::pair<std::string, std::string>> mapping;
  int line_no = 0;
  for (const auto& raw : text::lines(contents)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto arrow = line.find("=>");
    if (arrow == std::string_view::npos) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected '<label> => <defect type>'");
    }
    mapping.emplace_back(text::normalize_label(line.substr(0, arrow)),
                         text::normalize_label(line.substr(arrow + 2)));
  }
  return mapping;
}

LoadResult parse_github_export(std::string_view contents,
                               const std::vector<std::pair<std::string, std::string>>& mapping,
                               std::string_view framework) {
  json doc;
  try {
    doc = json::parse(contents);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("row 0: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "row 0: export must be a JSON array");

  static const std::regex issue_ref(R"(#(\d+))");
  Collector out;
  std::size_t row = 0;
  for (const auto& item : doc) {
    ++row;
    try {
      if (!item.is_object()) throw RowError{"issue is not an object"};
      DefectRecord rec;
      const auto id = item.find("id");
      if (id == item.end()) throw RowError{"issue has no id"};
      if (id->is_number_integer()) {
        rec.id = std::to_string(id->get<long long>());
      } else if (id->is_string()) {
        rec.id = id->get<std::string>();
      } else {
        throw RowError{"issue id must be an integer or string"};
      }
      rec.framework = std::string(framework);
      rec.title = optional_string(item, "title");
      rec.description = optional_string(item, "body");
      if (const auto labels = item.find("labels"); labels != item.end() && labels->is_array()) {
        for (const auto& l : *labels) {
          std::string name;
          if (l.is_string()) {
            name = l.get<std::string>();
          } else if (l.is_object() && l.contains("name") && l["name"].is_string()) {
            name = l["name"].get<std::string>();
          }
          const auto key = text::normalize_label(name);
          const auto hit = std::find_if(mapping.begin(), mapping.end(),
                                        [&](const auto& m) { return m.first == key; });
          if (hit != mapping.end()) {
            rec.defect_type_label = hit->second;
            break;
          }
        }
      }
      for (std::sregex_iterator it(rec.description.begin(), rec.description.end(), issue_ref),
           end;
           it != end; ++it) {
        auto ref = (*it)[1].str();
        if (ref != rec.id) rec.cross_refs.insert(std::move(ref));
      }
      finish_record(rec, "GitHub", "", "");
      out.add(std::move(rec));
    } catch (const RowError& e) {
      out.reject(row, e.reason);
    }
  }
  return out.take();
}

LoadResult load_defects(const std::filesystem::path& path, DatasetFormat format,
                        const LoadOptions& options) {
  const auto contents = text::read_file(path);
  switch (format) {
    case DatasetFormat::Canonical: return parse_canonical(contents);
    case DatasetFormat::Csv: return parse_csv_dataset(contents);
    case DatasetFormat::GithubExport: {
      std::vector<std::pair<std::string, std::string>> mapping;
      if (options.label_mapping) mapping = parse_label_mapping(text::read_file(*options.label_mapping));
      return parse_github_export(contents, mapping, options.framework);
    }
  }
  throw Error(ErrorCode::UnsupportedFormat, "dataset format");
}

std::string render_canonical_record(const DefectRecord& r) {
  json obj;
  obj["id"] = r.id;
  obj["platform"] = std::string(to_string(r.platform));
  obj["framework"] = r.framework;
  obj["title"] = r.title;
  obj["description"] = r.description;
  obj["defect_type_label"] = r.defect_type_label;
  obj["cross_refs"] = json::array();
  for (const auto& ref : r.cross_refs) obj["cross_refs"].push_back(ref);
  json odc = json::object();
  if (r.odc.defect_type) odc["defect_type"] = std::string(to_string(*r.odc.defect_type));
  if (r.odc.trigger) odc["trigger"] = *r.odc.trigger;
  if (r.odc.phase_found) odc["phase_found"] = *r.odc.phase_found;
  obj["odc"] = std::move(odc);
  if (r.created_at) obj["created_at"] = *r.created_at;
  return obj.dump() + "\n";
}

std::string render_canonical(const std::vector<DefectRecord>& records) {
  std::string out;
  for (const auto& r : records) out += render_canonical_record(r);
  return out;
}

std::vector<DefectRecord> filter_defects(const std::vector<DefectRecord>& records,
                                         std::optional<Platform> platform,
                                         std::optional<std::string_view> framework) {
  const auto fw = framework ? std::optional(text::normalize_label(*framework)) : std::nullopt;
  std::vector<DefectRecord> out;
  for (const auto& r : records) {
    if (platform && r.platform != *platform) continue;
    if (fw && r.framework != *fw) continue;
    out.push_back(r);
  }
  return out;
}

DedupeResult dedupe_by_issue_id(const std::vector<DefectRecord>& records) {
  const auto n = records.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(records[i].id, i);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& ref : records[i].cross_refs) {
      const auto it = index.find(ref);
      if (it == index.end()) continue;
      parent[find(i)] = find(it->second);
    }
  }

  // Smallest id per class.
  std::unordered_map<std::size_t, std::size_t> rep;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    auto [it, inserted] = rep.emplace(root, i);
    if (!inserted && records[i].id < records[it->second].id) it->second = i;
  }

  DedupeResult out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto keep = rep.at(find(i));
    if (keep == i) {
      out.kept.push_back(records[i]);
    } else {
      out.dropped.emplace_back(records[i], records[keep].id);
    }
  }
  return out;
}

}  // namespace aiodc
