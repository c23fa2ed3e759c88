#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "aiodc/classify.hpp"
#include "aiodc/ingest.hpp"
#include "aiodc/session_log.hpp"
#include "aiodc/taxonomy.hpp"

namespace httplib {
class Server;
}

namespace aiodc {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds any free port
  std::filesystem::path project_root = ".";
  std::filesystem::path persistence = "sessions.log";
  std::filesystem::path static_dir = "ui/dist";
  std::filesystem::path dataset = "data/keras-github.jsonl";
  std::filesystem::path taxonomy = "data/taxonomy/ai-quality-subset.tax";
  std::filesystem::path rules = "rules/aiodc-paper.rules";
  std::optional<std::filesystem::path> contexts;

  // Joins a configured path onto project_root unless it is absolute.
  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

// JSON config file; relative project_root is taken from the file's
// directory. Throws InvalidConfig.
ServerConfig load_server_config(const std::filesystem::path& path);
ServerConfig server_config_from_json(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir = ".");
// Port range and a writable persistence path; throws InvalidConfig.
void validate_config(const ServerConfig& config);

// Transport-independent request handling. Mutations are serialized behind
// one writer lock; reads share it, so each session is linearizable.
class AnnotationService {
 public:
  explicit AnnotationService(const ServerConfig& config);

  nlohmann::json list_sessions() const;
  nlohmann::json create_session(const nlohmann::json& body);
  // Lowest-id defect this annotator has not labeled yet; nullopt when done.
  std::optional<DefectRecord> next_task(const std::string& session_id,
                                        const std::string& annotator) const;
  nlohmann::json post_label(const std::string& session_id, const nlohmann::json& body);
  nlohmann::json disputes(const std::string& session_id,
                          const std::optional<std::string>& attribute) const;
  nlohmann::json post_resolution(const std::string& session_id, const nlohmann::json& body);
  nlohmann::json stats(const std::string& session_id) const;
  nlohmann::json one_way(const std::string& attribute,
                         const std::optional<std::string>& session_id) const;
  nlohmann::json two_way(const std::optional<std::string>& session_id) const;
  nlohmann::json rubric() const;
  nlohmann::json severity_preview(const std::string& criticality, const std::string& reversibility,
                                  const std::string& scope) const;

  const std::vector<DefectRecord>& dataset() const { return records_; }

 private:
  ClassificationLabel label_from_request(const nlohmann::json& j) const;
  std::vector<ClassificationLabel> analysis_labels(const std::optional<std::string>& session_id) const;

  Taxonomy taxonomy_;
  RuleSet rules_;
  std::vector<DefectRecord> records_;
  std::vector<ClassificationLabel> rule_labels_;
  mutable std::shared_mutex mutex_;
  SessionStore store_;
};

nlohmann::json record_to_json(const DefectRecord& r);

// HTTP front end. start() binds and serves on a background thread.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Returns the bound port. Throws BindFailure / CorruptPersistence /
  // InvalidConfig.
  int start();
  void stop();
  // Blocks until the listener exits.
  void wait();

  AnnotationService& service() { return *service_; }

 private:
  void install_routes();

  ServerConfig config_;
  std::unique_ptr<AnnotationService> service_;
  std::unique_ptr<httplib::Server> http_;
  std::thread listener_;
};

}  // namespace aiodc
