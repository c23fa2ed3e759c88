#include "aiodc/server.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include <httplib.h>

#include "aiodc/analyze.hpp"
#include "aiodc/labels_io.hpp"
#include "aiodc/report.hpp"
#include "aiodc/text.hpp"

namespace aiodc {

using nlohmann::json;

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownDefect: return 404;
    case ErrorCode::UnknownAnnotator: return 403;
    case ErrorCode::NotDisputed:
    case ErrorCode::ResolverIsParty:
    case ErrorCode::LabelsFrozen:
    case ErrorCode::DuplicateId:
    case ErrorCode::DuplicateDefectId: return 409;
    case ErrorCode::NoOverlap:
    case ErrorCode::DegenerateMarginals:
    case ErrorCode::EmptyInput:
    case ErrorCode::DegenerateTable: return 422;
    case ErrorCode::IoError:
    case ErrorCode::CorruptPersistence: return 500;
    default: return 400;
  }
}

json error_body(const Error& e) {
  return {{"error", std::string(to_string(e.code()))}, {"detail", e.what()}};
}

std::string require_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorCode::ParseError, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' holds non-strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

json status_json(const AnnotationSession& s) {
  json out = json::object();
  for (const auto& [status, n] : s.status_counts()) out[std::string(to_string(status))] = n;
  return out;
}

std::filesystem::path path_field(const json& j, const char* key, std::filesystem::path fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw Error(ErrorCode::InvalidConfig, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::filesystem::path ServerConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : project_root / p;
}

ServerConfig server_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  ServerConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  auto root = path_field(j, "project_root", ".");
  c.project_root = root.is_absolute() ? root : (base_dir / root).lexically_normal();
  c.persistence = path_field(j, "persistence", c.persistence);
  c.static_dir = path_field(j, "static", c.static_dir);
  c.dataset = path_field(j, "dataset", c.dataset);
  c.taxonomy = path_field(j, "taxonomy", c.taxonomy);
  c.rules = path_field(j, "rules", c.rules);
  if (j.contains("contexts") && !j["contexts"].is_null()) c.contexts = path_field(j, "contexts", {});
  return c;
}

ServerConfig load_server_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(text::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return server_config_from_json(j, path.parent_path().empty() ? "." : path.parent_path());
}

void validate_config(const ServerConfig& c) {
  if (c.port < 0 || c.port > 65535) {
    throw Error(ErrorCode::InvalidConfig, "port " + std::to_string(c.port) + " out of range");
  }
  const auto log = c.resolve(c.persistence);
  std::ofstream probe(log, std::ios::app);
  if (!probe) throw Error(ErrorCode::InvalidConfig, "persistence path not writable: " + log.string());
}

json record_to_json(const DefectRecord& r) {
  return json::parse(render_canonical_record(r));
}

AnnotationService::AnnotationService(const ServerConfig& config)
    : taxonomy_(load_taxonomy(config.resolve(config.taxonomy))),
      rules_(load_rules(config.resolve(config.rules), taxonomy_)),
      store_(config.resolve(config.persistence)) {
  auto loaded = load_defects(config.resolve(config.dataset), DatasetFormat::Canonical);
  records_ = std::move(loaded.records);
  ContextMap contexts;
  if (config.contexts) contexts = load_contexts(config.resolve(*config.contexts));
  rule_labels_ = classify_dataset(records_, rules_, contexts);
}

json AnnotationService::list_sessions() const {
  std::shared_lock lock(mutex_);
  json arr = json::array();
  for (const auto& id : store_.ids()) {
    const auto& s = store_.get(id);
    arr.push_back({{"id", id},
                   {"project", s.project()},
                   {"defects", s.defects().size()},
                   {"annotators", s.annotators()},
                   {"status", status_json(s)}});
  }
  return {{"sessions", arr}};
}

json AnnotationService::create_session(const json& body) {
  const auto project = require_field(body, "project");
  const auto id = body.contains("id") ? require_field(body, "id") : project;
  auto annotators = string_list(body, "annotators");
  auto defects = string_list(body, "defects");
  if (!body.contains("defects")) {
    for (const auto& r : records_) defects.push_back(r.id);
    std::sort(defects.begin(), defects.end());
  }
  std::unique_lock lock(mutex_);
  const auto& s = store_.open(id, project, std::move(defects), std::move(annotators));
  return {{"id", id},
          {"project", s.project()},
          {"defects", s.defects().size()},
          {"annotators", s.annotators()},
          {"status", status_json(s)}};
}

std::optional<DefectRecord> AnnotationService::next_task(const std::string& session_id,
                                                         const std::string& annotator) const {
  std::shared_lock lock(mutex_);
  const auto& s = store_.get(session_id);
  if (!s.has_annotator(annotator)) throw Error(ErrorCode::UnknownAnnotator, annotator);
  std::vector<std::string> ids = s.defects();
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    if (s.label(id, annotator)) continue;
    const auto it = std::find_if(records_.begin(), records_.end(),
                                 [&](const DefectRecord& r) { return r.id == id; });
    if (it != records_.end()) return *it;
    DefectRecord bare;
    bare.id = id;
    return bare;
  }
  return std::nullopt;
}

ClassificationLabel AnnotationService::label_from_request(const json& j) const {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "label must be an object");
  auto label = label_from_json(j);
  if (label.ai == AIAttribute::Unclassified) {
    throw Error(ErrorCode::ParseError, "label needs an AI attribute");
  }
  if (const auto ctx = j.find("context"); ctx != j.end() && ctx->is_object()) {
    const auto crit = parse_criticality(ctx->value("criticality", ""));
    const auto rev = parse_reversibility(ctx->value("reversibility", ""));
    const auto scope = parse_scope(ctx->value("scope", ""));
    if (!crit || !rev || !scope) throw Error(ErrorCode::ParseError, "incomplete severity context");
    const auto computed = assign_severity({*crit, *rev, *scope}, rules_.severity_matrix);
    // A free override must say why.
    if (label.severity && *label.severity != computed && !label.rationale) {
      throw Error(ErrorCode::ParseError, "severity override requires a rationale");
    }
    if (!label.severity) label.severity = computed;
  }
  for (const auto& p : label.impacts) {
    if (auto diag = validate_impact_path(p, taxonomy_)) throw Error(diag->code, diag->message);
  }
  return label;
}

json AnnotationService::post_label(const std::string& session_id, const json& body) {
  const auto annotator = require_field(body, "annotator");
  auto label = label_from_request(body.contains("label") ? body.at("label") : body);
  std::unique_lock lock(mutex_);
  const auto status = store_.submit(session_id, annotator, label);
  return {{"ok", true}, {"defect_id", label.defect_id}, {"status", std::string(to_string(status))}};
}

json AnnotationService::disputes(const std::string& session_id,
                                 const std::optional<std::string>& attribute) const {
  std::optional<AgreementAttribute> attr;
  if (attribute) {
    attr = parse_agreement_attribute(*attribute);
    if (!attr || *attr == AgreementAttribute::Combined) {
      throw Error(ErrorCode::ParseError, "attribute must be ai or severity");
    }
  }
  std::shared_lock lock(mutex_);
  const auto& s = store_.get(session_id);
  json arr = json::array();
  for (const auto& id : [&] {
         std::vector<std::string> ids = s.defects();
         std::sort(ids.begin(), ids.end());
         return ids;
       }()) {
    if (s.status(id) != DefectStatus::Disputed) continue;
    json on = json::array();
    for (auto a : {AgreementAttribute::AI, AgreementAttribute::Severity}) {
      if (s.disputed_on(id, a)) on.push_back(std::string(to_string(a)));
    }
    if (attr && !s.disputed_on(id, *attr)) continue;
    json diff = json::array();
    for (const auto& p : impact_disagreement(s, id)) diff.push_back(render_impact_path(p));
    arr.push_back({{"defect_id", id},
                   {"attributes", on},
                   {"label_a", label_to_json(*s.label(id, s.primary_a()))},
                   {"label_b", label_to_json(*s.label(id, s.primary_b()))},
                   {"impact_difference", diff}});
  }
  return {{"disputes", arr}};
}

json AnnotationService::post_resolution(const std::string& session_id, const json& body) {
  const auto resolver = require_field(body, "resolver");
  auto label = label_from_request(body.contains("label") ? body.at("label") : body);
  std::unique_lock lock(mutex_);
  store_.resolve(session_id, label.defect_id, resolver, label);
  return {{"ok", true}, {"defect_id", label.defect_id}, {"status", "Resolved"}};
}

std::vector<ClassificationLabel> AnnotationService::analysis_labels(
    const std::optional<std::string>& session_id) const {
  if (!session_id) return rule_labels_;
  return consolidatable_labels(store_.get(*session_id));
}

json AnnotationService::stats(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  const auto& s = store_.get(session_id);
  const auto labels = consolidatable_labels(s);
  const auto entries = agreement_summary(s);
  json out{{"session", session_id},
           {"progress",
            {{"defects", s.defects().size()},
             {"labels", s.label_count()},
             {"status", status_json(s)}}},
           {"agreement", agreement_to_json(entries)}};
  if (labels.empty()) {
    out["one_way"] = {{"ai", nullptr}, {"severity", nullptr}};
    out["two_way"] = nullptr;
  } else {
    out["one_way"] = {{"ai", distribution_to_json(aiodc::one_way(labels, LabelAttribute::AI))},
                      {"severity", distribution_to_json(aiodc::one_way(labels, LabelAttribute::Severity))}};
    out["two_way"] = contingency_to_json(aiodc::two_way(labels, LabelAttribute::AI, LabelAttribute::Severity));
  }
  return out;
}

json AnnotationService::one_way(const std::string& attribute,
                                const std::optional<std::string>& session_id) const {
  const auto attr = parse_label_attribute(attribute);
  if (!attr) throw Error(ErrorCode::ParseError, "attr must be ai or severity");
  std::shared_lock lock(mutex_);
  const auto labels = analysis_labels(session_id);
  return distribution_to_json(aiodc::one_way(labels, *attr));
}

json AnnotationService::two_way(const std::optional<std::string>& session_id) const {
  std::shared_lock lock(mutex_);
  const auto labels = analysis_labels(session_id);
  return contingency_to_json(aiodc::two_way(labels, LabelAttribute::AI, LabelAttribute::Severity));
}

json AnnotationService::rubric() const {
  json ai = json::array();
  for (auto a : kAiCategories) {
    ai.push_back({{"value", std::string(to_string(a))}, {"description", std::string(describe(a))}});
  }
  json matrix = json::array();
  for (auto r : kReversibilities) {
    for (auto s : kScopes) {
      matrix.push_back({{"reversibility", std::string(to_string(r))},
                        {"scope", std::string(to_string(s))},
                        {"base", std::string(to_string(rules_.severity_matrix.base(r, s)))}});
    }
  }
  json shifts = json::object();
  for (auto c : kCriticalities) shifts[std::string(to_string(c))] = rules_.severity_matrix.shift(c);
  json chars = json::array();
  for (const auto& c : taxonomy_.characteristics()) {
    json item{{"name", c.name}, {"model", std::string(to_string(c.model))}, {"layer", c.layer}};
    if (c.aip_layer) item["aip_layer"] = *c.aip_layer;
    chars.push_back(std::move(item));
  }
  return {{"rules_version", rules_.version},
          {"taxonomy_version", taxonomy_.version()},
          {"ai_attributes", ai},
          {"severity_matrix", matrix},
          {"criticality_shift", shifts},
          {"characteristics", chars}};
}

json AnnotationService::severity_preview(const std::string& criticality,
                                         const std::string& reversibility,
                                         const std::string& scope) const {
  const auto c = parse_criticality(criticality);
  const auto r = parse_reversibility(reversibility);
  const auto s = parse_scope(scope);
  if (!c || !r || !s) throw Error(ErrorCode::ParseError, "incomplete severity context");
  const auto sev = assign_severity({*c, *r, *s}, rules_.severity_matrix);
  return {{"severity", std::string(to_string(sev))}, {"rank", severity_rank(sev)}};
}

Server::Server(ServerConfig config) : config_(std::move(config)) {}

Server::~Server() { stop(); }

int Server::start() {
  validate_config(config_);
  service_ = std::make_unique<AnnotationService>(config_);
  http_ = std::make_unique<httplib::Server>();
  // The library default adds SO_REUSEPORT, which lets a second server share
  // an occupied port silently.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes();
  int port = config_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(config_.host);
    if (port < 0) throw Error(ErrorCode::BindFailure, config_.host + ":0");
  } else if (!http_->bind_to_port(config_.host, port)) {
    throw Error(ErrorCode::BindFailure, config_.host + ":" + std::to_string(port));
  }
  listener_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port;
}

void Server::stop() {
  if (http_) http_->stop();
  wait();
}

void Server::wait() {
  if (listener_.joinable()) listener_.join();
}

void Server::install_routes() {
  auto& http = *http_;
  auto& svc = *service_;

  auto guarded = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        res.status = http_status(e.code());
        res.set_content(error_body(e).dump(), "application/json");
      } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", "ParseError"}, {"detail", e.what()}}.dump(),
                        "application/json");
      }
    };
  };
  auto reply = [](httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  auto param = [](const httplib::Request& req, const char* key) -> std::optional<std::string> {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
  };

  http.Get("/health", guarded([=](const httplib::Request&, httplib::Response& res) {
             reply(res, {{"status", "ok"}});
           }));
  http.Get("/rubric", guarded([=, &svc](const httplib::Request&, httplib::Response& res) {
             reply(res, svc.rubric());
           }));
  http.Get("/severity", guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
             reply(res, svc.severity_preview(param(req, "criticality").value_or(""),
                                             param(req, "reversibility").value_or(""),
                                             param(req, "scope").value_or("")));
           }));
  http.Get("/sessions", guarded([=, &svc](const httplib::Request&, httplib::Response& res) {
             reply(res, svc.list_sessions());
           }));
  http.Post("/sessions", guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
              reply(res, svc.create_session(json::parse(req.body)), 201);
            }));
  http.Get(R"(/sessions/([^/]+)/next)",
           guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
             auto annotator = param(req, "annotator");
             if (!annotator && req.has_header("X-Annotator")) {
               annotator = req.get_header_value("X-Annotator");
             }
             if (!annotator) throw Error(ErrorCode::ParseError, "annotator parameter required");
             const auto task = svc.next_task(req.matches[1], *annotator);
             reply(res, task ? json{{"task", record_to_json(*task)}, {"done", false}}
                             : json{{"task", nullptr}, {"done", true}});
           }));
  http.Post(R"(/sessions/([^/]+)/labels)",
            guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
              auto body = json::parse(req.body);
              if (!body.contains("annotator") && req.has_header("X-Annotator")) {
                body["annotator"] = req.get_header_value("X-Annotator");
              }
              reply(res, svc.post_label(req.matches[1], body));
            }));
  http.Get(R"(/sessions/([^/]+)/disputes)",
           guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
             reply(res, svc.disputes(req.matches[1], param(req, "attribute")));
           }));
  http.Post(R"(/sessions/([^/]+)/resolutions)",
            guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
              reply(res, svc.post_resolution(req.matches[1], json::parse(req.body)));
            }));
  http.Get(R"(/sessions/([^/]+)/stats)",
           guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
             reply(res, svc.stats(req.matches[1]));
           }));
  http.Get("/analysis/one-way", guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
             reply(res, svc.one_way(param(req, "attr").value_or("ai"), param(req, "session")));
           }));
  http.Get("/analysis/two-way", guarded([=, &svc](const httplib::Request& req, httplib::Response& res) {
             reply(res, svc.two_way(param(req, "session")));
           }));

  const auto assets = config_.resolve(config_.static_dir);
  if (std::filesystem::is_directory(assets)) http.set_mount_point("/ui", assets.string());
}

}  // namespace aiodc
