#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aiodc/annotate.hpp"

namespace aiodc {

// Annotation sessions persisted as an append-only event log (one JSON
// event per line: "open", "label", "resolution"). State is the fold of the
// log; every accepted mutation is appended before it becomes visible.
//
// Not thread-safe; the server wraps it with per-session locking.
class SessionStore {
 public:
  // Replays `log_path` when it exists. Throws CorruptPersistence on a
  // malformed or inapplicable event. No path means in-memory only.
  explicit SessionStore(std::optional<std::filesystem::path> log_path = std::nullopt);

  // Opening an existing id with identical parameters is a no-op; different
  // parameters raise DuplicateId.
  const AnnotationSession& open(const std::string& session_id, std::string project,
                                std::vector<std::string> defects,
                                std::vector<std::string> annotators);

  DefectStatus submit(const std::string& session_id, const std::string& annotator,
                      ClassificationLabel label);
  void resolve(const std::string& session_id, const std::string& defect_id,
               const std::string& resolver, ClassificationLabel final_label);

  bool contains(std::string_view session_id) const;
  const AnnotationSession& get(std::string_view session_id) const;  // UnknownSession
  std::vector<std::string> ids() const;
  std::size_t event_count() const { return events_; }

 private:
  AnnotationSession& mutable_get(std::string_view session_id);
  void append(const std::string& line);

  std::optional<std::filesystem::path> log_path_;
  std::map<std::string, AnnotationSession, std::less<>> sessions_;
  std::size_t events_ = 0;
};

}  // namespace aiodc
