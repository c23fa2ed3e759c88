#include "aiodc/session_log.hpp"

#include <fstream>

#include <json.hpp>

#include "aiodc/labels_io.hpp"
#include "aiodc/text.hpp"

namespace aiodc {

using nlohmann::json;

namespace {

std::vector<std::string> string_array(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw Error(ErrorCode::ParseError, std::string("missing array '") + key + "'");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) out.push_back(v.get<std::string>());
  return out;
}

}  // namespace

SessionStore::SessionStore(std::optional<std::filesystem::path> log_path)
    : log_path_(std::move(log_path)) {
  if (!log_path_ || !std::filesystem::exists(*log_path_)) return;
  const auto contents = text::read_file(*log_path_);
  int line_no = 0;
  for (const auto& line : text::lines(contents)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto ev = json::parse(line);
      const auto type = ev.at("type").get<std::string>();
      const auto id = ev.at("session").get<std::string>();
      if (type == "open") {
        AnnotationSession s(ev.at("project").get<std::string>(), string_array(ev, "defects"),
                            string_array(ev, "annotators"));
        if (!sessions_.emplace(id, std::move(s)).second) {
          throw Error(ErrorCode::DuplicateId, id);
        }
      } else if (type == "label") {
        mutable_get(id).submit_label(ev.at("annotator").get<std::string>(),
                                     label_from_json(ev.at("label")));
      } else if (type == "resolution") {
        const auto label = label_from_json(ev.at("label"));
        mutable_get(id).resolve_dispute(label.defect_id, ev.at("resolver").get<std::string>(),
                                        label);
      } else {
        throw Error(ErrorCode::ParseError, "unknown event type '" + type + "'");
      }
      ++events_;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::CorruptPersistence,
                  log_path_->string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void SessionStore::append(const std::string& line) {
  ++events_;
  if (!log_path_) return;
  std::ofstream out(*log_path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + log_path_->string());
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "short write to " + log_path_->string());
}

const AnnotationSession& SessionStore::open(const std::string& session_id, std::string project,
                                            std::vector<std::string> defects,
                                            std::vector<std::string> annotators) {
  if (const auto it = sessions_.find(session_id); it != sessions_.end()) {
    const auto& s = it->second;
    if (s.project() == project && s.defects() == defects && s.annotators() == annotators) {
      return s;
    }
    throw Error(ErrorCode::DuplicateId, "session '" + session_id + "' exists");
  }
  AnnotationSession session(project, defects, annotators);
  json ev{{"type", "open"},     {"session", session_id}, {"project", project},
          {"defects", defects}, {"annotators", annotators}};
  append(ev.dump());
  return sessions_.emplace(session_id, std::move(session)).first->second;
}

DefectStatus SessionStore::submit(const std::string& session_id, const std::string& annotator,
                                  ClassificationLabel label) {
  auto& session = mutable_get(session_id);
  // Validate against a copy so a rejected label never reaches the log.
  if (const auto* existing = session.label(label.defect_id, annotator)) {
    auto normalized = label;
    normalized.annotator = annotator;
    normalized.provenance = Provenance::Human;
    if (*existing == normalized) return session.status(label.defect_id);
  }
  AnnotationSession trial = session;
  const auto status = trial.submit_label(annotator, label);
  json ev{{"type", "label"},
          {"session", session_id},
          {"annotator", annotator},
          {"label", label_to_json(*trial.label(label.defect_id, annotator))}};
  append(ev.dump());
  session = std::move(trial);
  return status;
}

void SessionStore::resolve(const std::string& session_id, const std::string& defect_id,
                           const std::string& resolver, ClassificationLabel final_label) {
  auto& session = mutable_get(session_id);
  const auto* before = session.resolution(defect_id);
  const bool had = before != nullptr;
  AnnotationSession trial = session;
  trial.resolve_dispute(defect_id, resolver, final_label);
  if (had) return;  // identical resubmission accepted as a no-op
  json ev{{"type", "resolution"},
          {"session", session_id},
          {"resolver", resolver},
          {"label", label_to_json(*trial.resolution(defect_id))}};
  append(ev.dump());
  session = std::move(trial);
}

bool SessionStore::contains(std::string_view session_id) const {
  return sessions_.find(session_id) != sessions_.end();
}

const AnnotationSession& SessionStore::get(std::string_view session_id) const {
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, std::string(session_id));
  return it->second;
}

AnnotationSession& SessionStore::mutable_get(std::string_view session_id) {
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, std::string(session_id));
  return it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace aiodc
