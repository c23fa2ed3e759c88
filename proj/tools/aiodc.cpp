// aiodc command-line front end.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aiodc/analyze.hpp"
#include "aiodc/annotate.hpp"
#include "aiodc/classify.hpp"
#include "aiodc/error.hpp"
#include "aiodc/ingest.hpp"
#include "aiodc/labels_io.hpp"
#include "aiodc/report.hpp"
#include "aiodc/server.hpp"
#include "aiodc/session_log.hpp"
#include "aiodc/taxonomy.hpp"
#include "aiodc/text.hpp"

namespace fs = std::filesystem;
using namespace aiodc;

namespace {

// Bundled files are looked up relative to the working directory first,
// then relative to the source tree the binary was built from.
fs::path bundled(const fs::path& rel) {
  if (fs::exists(rel)) return rel;
#ifdef AIODC_SOURCE_ROOT
  const fs::path alt = fs::path(AIODC_SOURCE_ROOT) / rel;
  if (fs::exists(alt)) return alt;
#endif
  return rel;
}

const fs::path kDefaultRules = "rules/aiodc-paper.rules";
const fs::path kDefaultTaxonomy = "data/taxonomy/ai-quality-subset.tax";

void emit(const std::string& contents, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << contents;
  } else {
    text::write_file(out, contents);
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : text::split(s, ',')) {
    auto t = std::string(text::trim(part));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

struct SessionArgs {
  std::string log = "aiodc-session.log";
  std::string project = "default";
};

void add_session_args(CLI::App* cmd, SessionArgs& a) {
  cmd->add_option("--session", a.log, "Session event log")->capture_default_str();
  cmd->add_option("--project", a.project, "Session id")->capture_default_str();
}

AgreementAttribute agreement_attr(const std::string& s) {
  const auto a = parse_agreement_attribute(s);
  if (!a) throw Error(ErrorCode::ParseError, "unknown attribute '" + s + "'");
  return *a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AI-aware orthogonal defect classification toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Normalize a raw dataset into canonical JSONL");
  std::string in_path, format = "canonical", platform, framework, mapping, ingest_out;
  bool dedupe = false;
  ingest->add_option("path", in_path, "Input dataset")->required();
  ingest->add_option("--format", format, "canonical|csv|github")->capture_default_str();
  ingest->add_option("--platform", platform, "Keep only this platform");
  ingest->add_option("--framework", framework, "Keep only this framework (github: stamped tag)");
  ingest->add_flag("--dedupe", dedupe, "Collapse cross-referenced duplicates");
  ingest->add_option("--mapping", mapping, "Issue label mapping (github format)");
  ingest->add_option("--out", ingest_out, "Output file (stdout when omitted)");

  // classify
  auto* classify = app.add_subcommand("classify", "Apply the rule set to a canonical dataset");
  std::string rules_path, contexts_path, tax_path, classify_in, classify_out;
  classify->add_option("--rules", rules_path, "Rule file");
  classify->add_option("--taxonomy", tax_path, "Taxonomy file");
  classify->add_option("--contexts", contexts_path, "Per-defect severity contexts");
  classify->add_option("--in", classify_in, "Canonical dataset")->required();
  classify->add_option("--out", classify_out, "Label file (stdout when omitted)");

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Headless two-annotator workflow");
  annotate->require_subcommand(1);
  SessionArgs sess;

  auto* imp = annotate->add_subcommand("import", "Open a session and import a label file");
  std::string imp_labels, imp_annotators, imp_dataset, imp_as;
  add_session_args(imp, sess);
  imp->add_option("--labels", imp_labels, "Label file")->required();
  imp->add_option("--annotators", imp_annotators, "Comma list; first two are the primaries");
  imp->add_option("--dataset", imp_dataset, "Canonical dataset supplying the defect ids");
  imp->add_option("--annotator", imp_as, "Annotator for lines without one");

  auto* kappa = annotate->add_subcommand("kappa", "Agreement between the primaries");
  std::string kappa_attr = "all";
  add_session_args(kappa, sess);
  kappa->add_option("--attribute", kappa_attr, "ai|severity|combined|all")->capture_default_str();

  auto* disputes = annotate->add_subcommand("disputes", "List open disputes");
  std::string disp_attr = "ai", disp_out;
  add_session_args(disputes, sess);
  disputes->add_option("--attribute", disp_attr, "ai|severity|combined")->capture_default_str();
  disputes->add_option("--out", disp_out, "Write both conflicting labels as a label file");

  auto* resolve = annotate->add_subcommand("resolve", "Record third-party resolutions");
  std::string res_labels, resolver;
  add_session_args(resolve, sess);
  resolve->add_option("--labels", res_labels, "Label file with final labels")->required();
  resolve->add_option("--resolver", resolver, "Resolving annotator")->required();

  auto* consolidate_cmd = annotate->add_subcommand("consolidate", "Emit final labels");
  std::string cons_out;
  add_session_args(consolidate_cmd, sess);
  consolidate_cmd->add_option("--out", cons_out, "Label file (stdout when omitted)");

  // report
  auto* report = app.add_subcommand("report", "Export the analysis bundle");
  std::string rep_labels, rep_out, rep_format = "text", rep_rules, rep_tax, rep_session,
                                    rep_project = "default", rep_dataset_id, rep_timestamp;
  report->add_option("--labels", rep_labels, "Label file")->required();
  report->add_option("--out", rep_out, "Output directory")->required();
  report->add_option("--format", rep_format, "text|csv|structured")->capture_default_str();
  report->add_option("--rules", rep_rules, "Rule file");
  report->add_option("--taxonomy", rep_tax, "Taxonomy file");
  report->add_option("--session", rep_session, "Session log for the agreement artifact");
  report->add_option("--project", rep_project, "Session id inside --session");
  report->add_option("--dataset-id", rep_dataset_id, "Dataset id recorded in metadata");
  report->add_option("--timestamp", rep_timestamp, "Fixed metadata timestamp");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  std::string config_path;
  serve->add_option("--config", config_path, "Server config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto fmt = parse_dataset_format(format);
      if (!fmt) throw Error(ErrorCode::UnsupportedFormat, format);
      std::optional<Platform> plat;
      if (!platform.empty()) {
        plat = parse_platform(platform);
        if (!plat) throw Error(ErrorCode::ParseError, "unknown platform '" + platform + "'");
      }
      LoadOptions opts;
      if (!mapping.empty()) opts.label_mapping = mapping;
      if (!framework.empty()) opts.framework = framework;
      auto loaded = load_defects(in_path, *fmt, opts);
      for (const auto& r : loaded.rejected) {
        std::cerr << "rejected row " << r.row << ": " << r.reason << "\n";
      }
      for (const auto& id : loaded.flagged) std::cerr << "flagged " << id << ": no defect type label\n";
      std::optional<std::string_view> fw;
      if (!framework.empty() && *fmt != DatasetFormat::GithubExport) fw = framework;
      auto records = filter_defects(loaded.records, plat, fw);
      if (dedupe) {
        auto d = dedupe_by_issue_id(records);
        for (const auto& [rec, kept] : d.dropped) std::cerr << "duplicate " << rec.id << " of " << kept << "\n";
        records = std::move(d.kept);
      }
      emit(render_canonical(records), ingest_out);
      std::cerr << records.size() << " records\n";
    } else if (*classify) {
      const auto tax = load_taxonomy(tax_path.empty() ? bundled(kDefaultTaxonomy) : fs::path(tax_path));
      const auto rules = load_rules(rules_path.empty() ? bundled(kDefaultRules) : fs::path(rules_path), tax);
      const auto contexts = contexts_path.empty() ? ContextMap{} : load_contexts(contexts_path);
      const auto loaded = load_defects(classify_in, DatasetFormat::Canonical);
      for (const auto& r : loaded.rejected) {
        std::cerr << "rejected row " << r.row << ": " << r.reason << "\n";
      }
      emit(render_labels(classify_dataset(loaded.records, rules, contexts)), classify_out);
    } else if (*annotate) {
      SessionStore store(fs::path(sess.log));
      if (*imp) {
        auto labels = load_labels(imp_labels);
        if (!store.contains(sess.project)) {
          std::vector<std::string> annotators = split_list(imp_annotators);
          if (annotators.empty()) {
            std::set<std::string> seen;
            for (const auto& l : labels) {
              if (l.annotator && seen.insert(*l.annotator).second) annotators.push_back(*l.annotator);
            }
            if (!imp_as.empty() && seen.insert(imp_as).second) annotators.push_back(imp_as);
          }
          std::vector<std::string> defects;
          if (!imp_dataset.empty()) {
            for (const auto& r : load_defects(imp_dataset, DatasetFormat::Canonical).records) {
              defects.push_back(r.id);
            }
          } else {
            std::set<std::string> ids;
            for (const auto& l : labels) ids.insert(l.defect_id);
            defects.assign(ids.begin(), ids.end());
          }
          store.open(sess.project, sess.project, std::move(defects), std::move(annotators));
        }
        std::size_t n = 0;
        for (auto& l : labels) {
          const auto who = l.annotator ? *l.annotator : imp_as;
          if (who.empty()) throw Error(ErrorCode::UnknownAnnotator, "label for " + l.defect_id + " has no annotator");
          store.submit(sess.project, who, l);
          ++n;
        }
        const auto& s = store.get(sess.project);
        std::cout << "imported " << n << " labels into '" << sess.project << "'\n";
        for (const auto& [st, count] : s.status_counts()) {
          std::cout << to_string(st) << " " << count << "\n";
        }
      } else if (*kappa) {
        const auto& s = store.get(sess.project);
        std::vector<AgreementEntry> entries;
        if (kappa_attr == "all") {
          entries = agreement_summary(s);
        } else {
          const auto attr = agreement_attr(kappa_attr);
          for (const auto& e : agreement_summary(s)) {
            if (e.attribute == attr) entries.push_back(e);
          }
        }
        std::cout << render_agreement(entries, ReportFormat::Text);
      } else if (*disputes) {
        const auto& s = store.get(sess.project);
        const auto list = list_disputes(s, agreement_attr(disp_attr));
        std::vector<ClassificationLabel> both;
        for (const auto& d : list) {
          std::cout << d.defect_id << "\t" << s.primary_a() << "=" << to_string(d.label_a.ai) << "/"
                    << (d.label_a.severity ? std::string(to_string(*d.label_a.severity)) : "-") << "\t"
                    << s.primary_b() << "=" << to_string(d.label_b.ai) << "/"
                    << (d.label_b.severity ? std::string(to_string(*d.label_b.severity)) : "-") << "\n";
          both.push_back(d.label_a);
          both.push_back(d.label_b);
        }
        if (!disp_out.empty()) text::write_file(disp_out, render_labels(both));
        std::cerr << list.size() << " disputes\n";
      } else if (*resolve) {
        std::size_t n = 0;
        for (auto& l : load_labels(res_labels)) {
          store.resolve(sess.project, l.defect_id, resolver, l);
          ++n;
        }
        std::cout << "resolved " << n << " defects\n";
      } else if (*consolidate_cmd) {
        try {
          emit(render_labels(consolidate(store.get(sess.project))), cons_out);
        } catch (const UnresolvedDisputesError& e) {
          std::cerr << "error: " << to_string(e.code()) << ":";
          for (const auto& id : e.defect_ids()) std::cerr << " " << id;
          std::cerr << "\n";
          return 1;
        }
      }
    } else if (*report) {
      const auto fmt = parse_report_format(rep_format);
      if (!fmt) throw Error(ErrorCode::UnsupportedFormat, rep_format);
      const auto tax = load_taxonomy(rep_tax.empty() ? bundled(kDefaultTaxonomy) : fs::path(rep_tax));
      const auto rules = load_rules(rep_rules.empty() ? bundled(kDefaultRules) : fs::path(rep_rules), tax);
      const auto labels = load_labels(rep_labels);
      std::optional<SessionStore> store;
      BundleOptions opts;
      opts.format = *fmt;
      opts.dataset_id = rep_dataset_id.empty() ? fs::path(rep_labels).stem().string() : rep_dataset_id;
      if (!rep_timestamp.empty()) opts.timestamp = rep_timestamp;
      if (!rep_session.empty()) {
        store.emplace(fs::path(rep_session));
        opts.session = &store->get(rep_project);
      }
      const auto bundle = export_analysis_bundle(labels, rules, tax, rep_out, opts);
      for (const auto& [name, path] : bundle.artifacts) std::cout << name << "\t" << path.string() << "\n";
    } else if (*serve) {
      Server server(load_server_config(config_path));
      const int port = server.start();
      std::cerr << "listening on port " << port << "\n";
      server.wait();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
