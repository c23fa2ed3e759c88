#include "aiodc/taxonomy.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "aiodc/text.hpp"

namespace aiodc {

namespace {

std::string squash(std::string_view s) {
  // Lowercase and drop separators so "Not Related", "not_related" and
  // "NotRelated" compare equal.
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-' || c == '/') continue;
    out.push_back(c);
  }
  return text::to_lower(out);
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

bool valid_layer(int layer) { return layer >= 1 && layer <= 3; }

}  // namespace

std::string_view to_string(AIAttribute a) {
  switch (a) {
    case AIAttribute::Data: return "Data";
    case AIAttribute::Learning: return "Learning";
    case AIAttribute::Thinking: return "Thinking";
    case AIAttribute::NotRelated: return "NotRelated";
    case AIAttribute::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::string_view describe(AIAttribute a) {
  switch (a) {
    case AIAttribute::Data: return "Issues with training / testing data.";
    case AIAttribute::Learning: return "Faults in the AI model training process.";
    case AIAttribute::Thinking: return "Faults in inference, logic, or decision making.";
    case AIAttribute::NotRelated: return "Defects unrelated to AI logic or behavior.";
    case AIAttribute::Unclassified: return "No rule matched; needs a human annotator.";
  }
  return "";
}

std::optional<AIAttribute> parse_ai_attribute(std::string_view s) {
  const auto key = squash(text::trim(s));
  if (key == "data") return AIAttribute::Data;
  if (key == "learning") return AIAttribute::Learning;
  if (key == "thinking") return AIAttribute::Thinking;
  if (key == "notrelated") return AIAttribute::NotRelated;
  if (key == "unclassified") return AIAttribute::Unclassified;
  return std::nullopt;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Low: return "Low";
    case Severity::Medium: return "Medium";
    case Severity::High: return "High";
    case Severity::Critical: return "Critical";
    case Severity::Catastrophic: return "Catastrophic";
  }
  return "Low";
}

std::optional<Severity> parse_severity(std::string_view s) {
  const auto t = text::trim(s);
  for (auto level : kSeverityLevels) {
    if (text::iequals(t, to_string(level))) return level;
  }
  return std::nullopt;
}

std::optional<Severity> severity_from_rank(int rank) {
  if (rank < 1 || rank > 5) return std::nullopt;
  return static_cast<Severity>(rank);
}

std::string_view to_string(OdcDefectType t) {
  switch (t) {
    case OdcDefectType::Function: return "Function";
    case OdcDefectType::Interface: return "Interface";
    case OdcDefectType::Checking: return "Checking";
    case OdcDefectType::Assignment: return "Assignment";
    case OdcDefectType::TimingSerialization: return "TimingSerialization";
    case OdcDefectType::BuildPackageMerge: return "BuildPackageMerge";
    case OdcDefectType::Documentation: return "Documentation";
    case OdcDefectType::Algorithm: return "Algorithm";
    case OdcDefectType::Isolation: return "Isolation";
    case OdcDefectType::IaaSPaaS: return "IaaSPaaS";
  }
  return "Function";
}

std::optional<OdcDefectType> parse_odc_defect_type(std::string_view s) {
  const auto key = squash(text::trim(s));
  for (int i = 0; i <= static_cast<int>(OdcDefectType::IaaSPaaS); ++i) {
    const auto t = static_cast<OdcDefectType>(i);
    if (key == squash(to_string(t))) return t;
  }
  return std::nullopt;
}

bool is_cloud_extension(OdcDefectType t) {
  return t == OdcDefectType::Isolation || t == OdcDefectType::IaaSPaaS;
}

std::string_view to_string(QualityModel m) {
  switch (m) {
    case QualityModel::AI: return "AI";
    case QualityModel::AIP: return "AIP";
    case QualityModel::Shared: return "Shared";
  }
  return "AI";
}

std::optional<QualityModel> parse_quality_model(std::string_view s) {
  const auto t = text::trim(s);
  if (text::iequals(t, "AI")) return QualityModel::AI;
  if (text::iequals(t, "AIP")) return QualityModel::AIP;
  if (text::iequals(t, "Shared")) return QualityModel::Shared;
  return std::nullopt;
}

std::string render_impact_path(const ImpactPath& p) {
  std::string out(to_string(p.model));
  out.push_back(':');
  for (std::size_t i = 0; i < p.characteristics.size(); ++i) {
    if (i) out.push_back('>');
    out += p.characteristics[i];
  }
  return out;
}

std::optional<ImpactPath> parse_impact_path(std::string_view s) {
  s = text::trim(s);
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto model = parse_quality_model(s.substr(0, colon));
  if (!model || *model == QualityModel::Shared) return std::nullopt;
  ImpactPath path{*model, {}};
  const auto body = text::trim(s.substr(colon + 1));
  if (body.empty()) return path;
  for (const auto& part : text::split(body, '>')) {
    const auto name = text::trim(part);
    if (name.empty()) return std::nullopt;
    path.characteristics.emplace_back(name);
  }
  return path;
}

Taxonomy::Taxonomy(std::string version, std::vector<QualityCharacteristic> characteristics)
    : version_(std::move(version)), characteristics_(std::move(characteristics)) {
  std::set<std::string, std::less<>> seen;
  for (const auto& c : characteristics_) {
    if (!seen.insert(c.name).second) {
      throw Error(ErrorCode::DuplicateCharacteristic, c.name);
    }
    if (!valid_layer(c.layer) || (c.aip_layer && !valid_layer(*c.aip_layer))) {
      throw Error(ErrorCode::BadLayer, c.name);
    }
    if (c.aip_layer && c.model != QualityModel::Shared) {
      throw Error(ErrorCode::BadLayer, c.name + " (split layer requires model Shared)");
    }
  }
}

const QualityCharacteristic* Taxonomy::find(std::string_view name) const {
  for (const auto& c : characteristics_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Taxonomy parse_taxonomy(std::string_view contents) {
  std::string version;
  std::vector<QualityCharacteristic> chars;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  for (const auto& raw : text::lines(contents)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto where = "line " + std::to_string(line_no);
    if (line.front() == '@') {
      auto fields = text::split_whitespace(line);
      if (fields[0] != "@version" || fields.size() != 2) {
        throw Error(ErrorCode::ParseError, where + ": expected '@version <text>'");
      }
      version = fields[1];
      continue;
    }
    // name model layer [comment...]
    std::istringstream in{std::string(line)};
    std::string name, model_tok, layer_tok;
    if (!(in >> name >> model_tok >> layer_tok)) {
      throw Error(ErrorCode::ParseError, where + ": expected 'name model layer [comment]'");
    }
    std::string comment;
    std::getline(in, comment);
    const auto model = parse_quality_model(model_tok);
    if (!model) {
      throw Error(ErrorCode::ParseError, where + ": unknown model '" + model_tok + "'");
    }
    if (!seen.insert(name).second) throw Error(ErrorCode::DuplicateCharacteristic, name);

    QualityCharacteristic c{name, *model, 0, std::nullopt, std::string(text::trim(comment))};
    const auto slash = layer_tok.find('/');
    const auto layer = parse_int(std::string_view(layer_tok).substr(0, slash));
    if (!layer || !valid_layer(*layer)) throw Error(ErrorCode::BadLayer, name);
    c.layer = *layer;
    if (slash != std::string::npos) {
      const auto aip = parse_int(std::string_view(layer_tok).substr(slash + 1));
      if (!aip || !valid_layer(*aip) || *model != QualityModel::Shared) {
        throw Error(ErrorCode::BadLayer, name);
      }
      c.aip_layer = *aip;
    }
    chars.push_back(std::move(c));
  }
  if (chars.empty()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                           ": taxonomy defines no characteristics");
  }
  return Taxonomy(std::move(version), std::move(chars));
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  return parse_taxonomy(text::read_file(path));
}

std::string render_taxonomy(const Taxonomy& tax) {
  std::ostringstream out;
  if (!tax.version().empty()) out << "@version " << tax.version() << '\n';
  for (const auto& c : tax.characteristics()) {
    out << c.name << ' ' << to_string(c.model) << ' ' << c.layer;
    if (c.aip_layer) out << '/' << *c.aip_layer;
    if (!c.comment.empty()) out << ' ' << c.comment;
    out << '\n';
  }
  return out.str();
}

std::optional<PathDiagnostic> validate_impact_path(const ImpactPath& path,
                                                   const Taxonomy& tax) {
  const auto& names = path.characteristics;
  if (names.empty()) return PathDiagnostic{ErrorCode::EmptyPath, "impact path is empty"};
  if (path.model == QualityModel::Shared) {
    return PathDiagnostic{ErrorCode::ModelMismatch, "path model must be AI or AIP"};
  }
  if (names.size() > 3) {
    return PathDiagnostic{ErrorCode::LayerMismatch,
                          "path has " + std::to_string(names.size()) + " layers, max is 3"};
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto* c = tax.find(names[i]);
    if (!c) return PathDiagnostic{ErrorCode::UnknownCharacteristic, names[i]};
    if (c->model != QualityModel::Shared && c->model != path.model) {
      return PathDiagnostic{ErrorCode::ModelMismatch,
                            names[i] + " belongs to " + std::string(to_string(c->model)) +
                                ", path is " + std::string(to_string(path.model))};
    }
    const int expected = static_cast<int>(i) + 1;
    if (c->layer_in(path.model) != expected) {
      return PathDiagnostic{ErrorCode::LayerMismatch,
                            names[i] + " is layer " + std::to_string(c->layer_in(path.model)) +
                                " but appears at position " + std::to_string(expected)};
    }
  }
  return std::nullopt;
}

}  // namespace aiodc
