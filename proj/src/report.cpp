#include "aiodc/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "aiodc/text.hpp"

namespace aiodc {

using nlohmann::json;

namespace {

// Left-aligned first column, right-aligned numeric columns, two-space gaps.
std::string render_aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += "  ";
      const auto pad = std::string(width[i] - r[i].size(), ' ');
      line += i == 0 ? r[i] + pad : pad + r[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string scientific(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

json independence_json(const ContingencyTable& t) {
  try {
    const auto test = chi_square_independence(t);
    return {{"statistic", test.statistic},
            {"dof", test.dof},
            {"p_value", test.p_value},
            {"low_expected_warning", test.low_expected_warning},
            {"rows", test.row_categories},
            {"columns", test.col_categories},
            {"expected", test.expected}};
  } catch (const Error& e) {
    return {{"error", std::string(to_string(e.code()))}, {"detail", e.what()}};
  }
}

std::string independence_text(const ContingencyTable& t) {
  try {
    const auto test = chi_square_independence(t);
    std::string out = "chi-square = " + fixed(test.statistic, 4) +
                      ", dof = " + std::to_string(test.dof) +
                      ", p = " + scientific(test.p_value) + '\n';
    if (test.low_expected_warning) out += "warning: some expected counts are below 5\n";
    return out;
  } catch (const Error& e) {
    return std::string("note: ") + e.what() + '\n';
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view s) {
  const auto key = text::to_lower(text::trim(s));
  if (key == "text") return ReportFormat::Text;
  if (key == "csv") return ReportFormat::Csv;
  if (key == "structured" || key == "json") return ReportFormat::Structured;
  return std::nullopt;
}

std::string_view file_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Text: return ".txt";
    case ReportFormat::Csv: return ".csv";
    case ReportFormat::Structured: return ".json";
  }
  return ".txt";
}

json distribution_to_json(const Distribution& d) {
  json rows = json::array();
  for (const auto& r : d.rows) {
    rows.push_back({{"category", r.category},
                    {"count", r.count},
                    {"percent", format_percent(r.percent_hundredths)},
                    {"percent_hundredths", r.percent_hundredths}});
  }
  return {{"attribute", d.attribute}, {"rows", rows}, {"total", d.total}, {"excluded", d.excluded}};
}

Distribution distribution_from_json(const json& j) {
  try {
    Distribution d;
    d.attribute = j.at("attribute").get<std::string>();
    d.total = j.at("total").get<long long>();
    d.excluded = j.at("excluded").get<long long>();
    for (const auto& r : j.at("rows")) {
      d.rows.push_back({r.at("category").get<std::string>(), r.at("count").get<long long>(),
                        r.at("percent_hundredths").get<long long>()});
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("distribution: ") + e.what());
  }
}

std::string render_distribution(const Distribution& d, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: {
      std::vector<std::vector<std::string>> rows{{d.attribute, "Count", "%"}};
      for (const auto& r : d.rows) {
        rows.push_back({r.category, std::to_string(r.count), format_percent(r.percent_hundredths)});
      }
      if (!d.rows.empty()) {
        rows.push_back({"Total", std::to_string(d.total), d.total > 0 ? "100.00%" : "0.00%"});
      }
      auto out = render_aligned(rows);
      if (d.excluded > 0) out += "excluded: " + std::to_string(d.excluded) + '\n';
      return out;
    }
    case ReportFormat::Csv: {
      std::string out = "category,count,percent\n";
      for (const auto& r : d.rows) {
        out += csv_quote(r.category) + ',' + std::to_string(r.count) + ',' +
               format_percent(r.percent_hundredths) + '\n';
      }
      return out;
    }
    case ReportFormat::Structured: return distribution_to_json(d).dump(2) + '\n';
  }
  throw Error(ErrorCode::UnsupportedFormat, "distribution");
}

Distribution parse_distribution_csv(std::string_view csv, std::string attribute) {
  const auto all = text::lines(csv);
  if (all.empty() || all[0] != "category,count,percent") {
    throw Error(ErrorCode::ParseError, "line 1: expected 'category,count,percent' header");
  }
  std::vector<std::string> cats;
  std::vector<long long> counts;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].empty()) continue;
    const auto& line = all[i];
    const auto where = "line " + std::to_string(i + 1) + ": malformed row";
    const auto c2 = line.rfind(',');
    if (c2 == std::string::npos || c2 == 0) throw Error(ErrorCode::ParseError, where);
    const auto c1 = line.rfind(',', c2 - 1);
    if (c1 == std::string::npos) throw Error(ErrorCode::ParseError, where);
    auto cat = line.substr(0, c1);
    const auto count_field = line.substr(c1 + 1, c2 - c1 - 1);
    if (cat.size() >= 2 && cat.front() == '"') {
      std::string unq;
      for (std::size_t k = 1; k + 1 < cat.size(); ++k) {
        unq += cat[k];
        if (cat[k] == '"') ++k;
      }
      cat = unq;
    }
    cats.push_back(cat);
    try {
      std::size_t used = 0;
      counts.push_back(std::stoll(count_field, &used));
      if (used != count_field.size()) throw std::invalid_argument(count_field);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(i + 1) + ": bad count");
    }
  }
  return make_distribution(std::move(attribute), std::move(cats), std::move(counts));
}

json contingency_to_json(const ContingencyTable& t) {
  return {{"row_attribute", t.row_attribute},
          {"col_attribute", t.col_attribute},
          {"rows", t.row_categories},
          {"columns", t.col_categories},
          {"counts", t.counts},
          {"row_marginals", t.row_marginals},
          {"col_marginals", t.col_marginals},
          {"total", t.total},
          {"excluded", t.excluded},
          {"independence", independence_json(t)}};
}

std::string render_contingency(const ContingencyTable& t, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: {
      std::vector<std::string> header{t.row_attribute + " \\ " + t.col_attribute};
      header.insert(header.end(), t.col_categories.begin(), t.col_categories.end());
      header.push_back("Total");
      std::vector<std::vector<std::string>> rows{header};
      for (std::size_t i = 0; i < t.row_categories.size(); ++i) {
        std::vector<std::string> r{t.row_categories[i]};
        for (auto c : t.counts[i]) r.push_back(std::to_string(c));
        r.push_back(std::to_string(t.row_marginals[i]));
        rows.push_back(std::move(r));
      }
      std::vector<std::string> footer{"Total"};
      for (auto c : t.col_marginals) footer.push_back(std::to_string(c));
      footer.push_back(std::to_string(t.total));
      rows.push_back(std::move(footer));
      auto out = render_aligned(rows);
      if (t.excluded > 0) out += "excluded: " + std::to_string(t.excluded) + '\n';
      return out + independence_text(t);
    }
    case ReportFormat::Csv: {
      std::string out = csv_quote(t.row_attribute + "\\" + t.col_attribute);
      for (const auto& c : t.col_categories) out += ',' + csv_quote(c);
      out += ",Total\n";
      for (std::size_t i = 0; i < t.row_categories.size(); ++i) {
        out += csv_quote(t.row_categories[i]);
        for (auto c : t.counts[i]) out += ',' + std::to_string(c);
        out += ',' + std::to_string(t.row_marginals[i]) + '\n';
      }
      out += "Total";
      for (auto c : t.col_marginals) out += ',' + std::to_string(c);
      return out + ',' + std::to_string(t.total) + '\n';
    }
    case ReportFormat::Structured: return contingency_to_json(t).dump(2) + '\n';
  }
  throw Error(ErrorCode::UnsupportedFormat, "contingency");
}

std::string render_heatmap_csv(const ContingencyTable& t) {
  std::string out = "category";
  for (const auto& c : t.col_categories) out += ',' + csv_quote(c);
  out += '\n';
  for (std::size_t i = 0; i < t.row_categories.size(); ++i) {
    out += csv_quote(t.row_categories[i]);
    for (auto c : t.counts[i]) out += ',' + std::to_string(c);
    out += '\n';
  }
  return out;
}

std::string render_impact_frequencies(std::span<const ImpactFrequency> freqs,
                                      ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: {
      std::vector<std::vector<std::string>> rows{{"Characteristic", "Model", "Count"}};
      for (const auto& f : freqs) {
        rows.push_back({f.characteristic, std::string(to_string(f.model)), std::to_string(f.count)});
      }
      return render_aligned(rows);
    }
    case ReportFormat::Csv: {
      std::string out = "model,characteristic,count\n";
      for (const auto& f : freqs) {
        out += std::string(to_string(f.model)) + ',' + csv_quote(f.characteristic) + ',' +
               std::to_string(f.count) + '\n';
      }
      return out;
    }
    case ReportFormat::Structured: {
      json arr = json::array();
      for (const auto& f : freqs) {
        arr.push_back({{"model", std::string(to_string(f.model))},
                       {"characteristic", f.characteristic},
                       {"count", f.count}});
      }
      return json{{"impact_frequencies", arr}}.dump(2) + '\n';
    }
  }
  throw Error(ErrorCode::UnsupportedFormat, "impact frequencies");
}

std::vector<AgreementEntry> agreement_summary(const AnnotationSession& session) {
  std::vector<AgreementEntry> out;
  for (auto attr : {AgreementAttribute::AI, AgreementAttribute::Severity,
                    AgreementAttribute::Combined}) {
    AgreementEntry e{attr, std::nullopt, {}};
    try {
      e.result = cohen_kappa(session, attr);
    } catch (const Error& err) {
      e.error = std::string(to_string(err.code()));
    }
    out.push_back(std::move(e));
  }
  return out;
}

json agreement_to_json(std::span<const AgreementEntry> entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    json item{{"attribute", std::string(to_string(e.attribute))}};
    if (e.result) {
      item["n"] = e.result->n;
      item["observed"] = e.result->observed;
      item["expected"] = e.result->expected;
      item["kappa"] = e.result->kappa;
    } else {
      item["error"] = e.error;
    }
    arr.push_back(std::move(item));
  }
  return arr;
}

std::string render_agreement(std::span<const AgreementEntry> entries, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: {
      std::vector<std::vector<std::string>> rows{{"Attribute", "n", "p_o", "p_e", "kappa"}};
      for (const auto& e : entries) {
        if (e.result) {
          rows.push_back({std::string(to_string(e.attribute)), std::to_string(e.result->n),
                          fixed(e.result->observed, 4), fixed(e.result->expected, 4),
                          fixed(e.result->kappa, 4)});
        } else {
          rows.push_back({std::string(to_string(e.attribute)), "-", "-", "-", e.error});
        }
      }
      return render_aligned(rows);
    }
    case ReportFormat::Csv: {
      std::string out = "attribute,n,observed,expected,kappa,error\n";
      for (const auto& e : entries) {
        out += std::string(to_string(e.attribute)) + ',';
        if (e.result) {
          out += std::to_string(e.result->n) + ',' + fixed(e.result->observed, 6) + ',' +
                 fixed(e.result->expected, 6) + ',' + fixed(e.result->kappa, 6) + ",\n";
        } else {
          out += ",,,," + e.error + '\n';
        }
      }
      return out;
    }
    case ReportFormat::Structured: return json{{"agreement", agreement_to_json(entries)}}.dump(2) + '\n';
  }
  throw Error(ErrorCode::UnsupportedFormat, "agreement");
}

ReportBundle export_analysis_bundle(std::span<const ClassificationLabel> labels,
                                    const RuleSet& rules, const Taxonomy& taxonomy,
                                    const std::filesystem::path& out_dir,
                                    const BundleOptions& options) {
  for (const auto& l : labels) {
    for (const auto& p : l.impacts) {
      if (auto diag = validate_impact_path(p, taxonomy)) {
        throw Error(diag->code, l.defect_id + ": " + diag->message);
      }
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() +
                                        (ec ? ": " + ec.message() : std::string()));
  }

  const auto fmt = options.format;
  const auto ext = std::string(file_extension(fmt));
  const bool empty = labels.empty();
  ReportBundle bundle;

  auto empty_artifact = [&](std::string_view what) -> std::string {
    switch (fmt) {
      case ReportFormat::Text: return "(empty: no labels for " + std::string(what) + ")\n";
      case ReportFormat::Csv: return "";
      case ReportFormat::Structured: return json{{"empty", true}}.dump(2) + '\n';
    }
    return "";
  };
  auto write = [&](const std::string& name, const std::string& file, const std::string& body) {
    const auto path = out_dir / file;
    text::write_file(path, body);
    bundle.artifacts[name] = path;
  };

  if (empty) {
    write("one-way-ai", "one-way-ai" + ext, empty_artifact("AI one-way"));
    write("one-way-severity", "one-way-severity" + ext, empty_artifact("severity one-way"));
    write("two-way-ai-severity", "two-way-ai-severity" + ext, empty_artifact("AI x severity"));
    write("heatmap-ai-severity", "heatmap-ai-severity.csv", "");
  } else {
    const auto ai = one_way(labels, LabelAttribute::AI);
    const auto sev = one_way(labels, LabelAttribute::Severity);
    const auto table = two_way(labels, LabelAttribute::AI, LabelAttribute::Severity);
    write("one-way-ai", "one-way-ai" + ext, render_distribution(ai, fmt));
    write("one-way-severity", "one-way-severity" + ext, render_distribution(sev, fmt));
    write("two-way-ai-severity", "two-way-ai-severity" + ext, render_contingency(table, fmt));
    write("heatmap-ai-severity", "heatmap-ai-severity.csv", render_heatmap_csv(table));
  }
  const auto freqs = impact_frequencies(labels);
  write("impact-frequencies", "impact-frequencies" + ext, render_impact_frequencies(freqs, fmt));

  if (options.session) {
    const auto entries = agreement_summary(*options.session);
    write("agreement", "agreement" + ext, render_agreement(entries, fmt));
  } else {
    write("agreement", "agreement" + ext,
          fmt == ReportFormat::Structured
              ? json{{"agreement", nullptr}, {"note", "no annotation session supplied"}}.dump(2) + '\n'
              : fmt == ReportFormat::Csv ? std::string("attribute,n,observed,expected,kappa,error\n")
                                         : std::string("(no annotation session supplied)\n"));
  }

  json artifacts = json::object();
  for (const auto& [name, path] : bundle.artifacts) artifacts[name] = path.filename().string();
  // dump(2) keeps generated_at on its own line.
  bundle.metadata = {{"dataset", options.dataset_id},
                     {"rules_version", rules.version},
                     {"taxonomy_version", taxonomy.version()},
                     {"label_count", labels.size()},
                     {"format", std::string(ext.substr(1))},
                     {"artifacts", artifacts},
                     {"generated_at", options.timestamp.value_or(utc_now())}};
  text::write_file(out_dir / "metadata.json", bundle.metadata.dump(2) + '\n');
  bundle.artifacts["metadata"] = out_dir / "metadata.json";
  return bundle;
}

}  // namespace aiodc
