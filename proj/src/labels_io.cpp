#include "aiodc/labels_io.hpp"

#include "aiodc/text.hpp"

namespace aiodc {

namespace {

constexpr std::string_view kHeader =
    "# defect_id\tannotator\tai\tseverity\timpacts\trationale\tprovenance\n";

std::string dash_if_empty(std::string s) { return s.empty() ? "-" : s; }

}  // namespace

std::string render_impacts(const std::vector<ImpactPath>& paths) {
  std::string out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (i) out.push_back(';');
    out += render_impact_path(paths[i]);
  }
  return dash_if_empty(std::move(out));
}

std::vector<ImpactPath> parse_impacts(std::string_view s) {
  std::vector<ImpactPath> out;
  s = text::trim(s);
  if (s.empty() || s == "-") return out;
  for (const auto& part : text::split(s, ';')) {
    if (text::trim(part).empty()) continue;
    auto p = parse_impact_path(part);
    if (!p) throw Error(ErrorCode::ParseError, "malformed impact path '" + part + "'");
    out.push_back(std::move(*p));
  }
  return out;
}

std::string render_label_line(const ClassificationLabel& l) {
  std::string line = text::escape_field(l.defect_id);
  line += '\t';
  line += l.annotator ? dash_if_empty(text::escape_field(*l.annotator)) : "-";
  line += '\t';
  line += to_string(l.ai);
  line += '\t';
  line += l.severity ? std::string(to_string(*l.severity)) : "-";
  line += '\t';
  line += render_impacts(l.impacts);
  line += '\t';
  line += l.rationale ? text::escape_field(*l.rationale) : "";
  line += '\t';
  line += to_string(l.provenance);
  line += '\n';
  return line;
}

std::string render_labels(const std::vector<ClassificationLabel>& labels) {
  std::string out(kHeader);
  for (const auto& l : labels) out += render_label_line(l);
  return out;
}

std::vector<ClassificationLabel> parse_labels(std::string_view contents) {
  std::vector<ClassificationLabel> out;
  int line_no = 0;
  for (const auto& line : text::lines(contents)) {
    ++line_no;
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto cols = text::split(line, '\t');
    if (cols.size() != 6 && cols.size() != 7) {
      throw Error(ErrorCode::ParseError, where + "expected 6 or 7 tab-separated columns");
    }
    ClassificationLabel l;
    l.defect_id = text::unescape_field(cols[0]);
    if (l.defect_id.empty()) throw Error(ErrorCode::ParseError, where + "empty defect id");
    if (cols[1] != "-" && !cols[1].empty()) l.annotator = text::unescape_field(cols[1]);
    const auto ai = parse_ai_attribute(cols[2]);
    if (!ai) throw Error(ErrorCode::ParseError, where + "unknown AI attribute '" + cols[2] + "'");
    l.ai = *ai;
    if (cols[3] != "-" && !cols[3].empty()) {
      const auto sev = parse_severity(cols[3]);
      if (!sev) throw Error(ErrorCode::ParseError, where + "unknown severity '" + cols[3] + "'");
      l.severity = *sev;
    }
    try {
      l.impacts = parse_impacts(cols[4]);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + e.what());
    }
    if (!cols[5].empty()) l.rationale = text::unescape_field(cols[5]);
    l.provenance = Provenance::Human;
    if (cols.size() == 7) {
      const auto p = parse_provenance(cols[6]);
      if (!p) throw Error(ErrorCode::ParseError, where + "unknown provenance '" + cols[6] + "'");
      l.provenance = *p;
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<ClassificationLabel> load_labels(const std::filesystem::path& path) {
  return parse_labels(text::read_file(path));
}

nlohmann::json label_to_json(const ClassificationLabel& l) {
  nlohmann::json j;
  j["defect_id"] = l.defect_id;
  j["ai"] = std::string(to_string(l.ai));
  j["severity"] = l.severity ? nlohmann::json(std::string(to_string(*l.severity))) : nlohmann::json();
  j["impacts"] = nlohmann::json::array();
  for (const auto& p : l.impacts) j["impacts"].push_back(render_impact_path(p));
  j["provenance"] = std::string(to_string(l.provenance));
  j["annotator"] = l.annotator ? nlohmann::json(*l.annotator) : nlohmann::json();
  j["rationale"] = l.rationale ? nlohmann::json(*l.rationale) : nlohmann::json();
  return j;
}

ClassificationLabel label_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& what) { return Error(ErrorCode::ParseError, "label: " + what); };
  if (!j.is_object()) throw bad("not an object");
  ClassificationLabel l;
  const auto id = j.find("defect_id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw bad("missing defect_id");
  }
  l.defect_id = id->get<std::string>();
  const auto ai = j.find("ai");
  if (ai == j.end() || !ai->is_string()) throw bad("missing ai");
  const auto parsed_ai = parse_ai_attribute(ai->get<std::string>());
  if (!parsed_ai) throw bad("unknown ai '" + ai->get<std::string>() + "'");
  l.ai = *parsed_ai;
  if (const auto s = j.find("severity"); s != j.end() && !s->is_null()) {
    if (!s->is_string()) throw bad("severity must be a string");
    const auto sev = parse_severity(s->get<std::string>());
    if (!sev) throw bad("unknown severity '" + s->get<std::string>() + "'");
    l.severity = *sev;
  }
  if (const auto im = j.find("impacts"); im != j.end() && !im->is_null()) {
    if (!im->is_array()) throw bad("impacts must be an array");
    for (const auto& p : *im) {
      if (!p.is_string()) throw bad("impact paths must be strings");
      auto path = parse_impact_path(p.get<std::string>());
      if (!path) throw bad("malformed impact path '" + p.get<std::string>() + "'");
      l.impacts.push_back(std::move(*path));
    }
  }
  l.provenance = Provenance::Human;
  if (const auto p = j.find("provenance"); p != j.end() && !p->is_null()) {
    const auto prov = p->is_string() ? parse_provenance(p->get<std::string>()) : std::nullopt;
    if (!prov) throw bad("unknown provenance");
    l.provenance = *prov;
  }
  if (const auto a = j.find("annotator"); a != j.end() && a->is_string()) {
    l.annotator = a->get<std::string>();
  }
  if (const auto r = j.find("rationale"); r != j.end() && r->is_string()) {
    l.rationale = r->get<std::string>();
  }
  return l;
}

}  // namespace aiodc
