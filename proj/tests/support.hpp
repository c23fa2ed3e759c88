#pragma once

// Shared helpers and independently transcribed reference tables for tests.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace testsupport {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(AIODC_DATA_DIR) / rel;
}

inline const std::filesystem::path kKerasFixture = data_path("data/keras-github.jsonl");
inline const std::filesystem::path kBenchmark = data_path("data/benchmark-100.jsonl");
inline const std::filesystem::path kKerasContexts = data_path("data/keras-github.contexts");
inline const std::filesystem::path kRules = data_path("rules/aiodc-paper.rules");
inline const std::filesystem::path kTaxonomy = data_path("data/taxonomy/ai-quality-subset.tax");

// Fresh directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "aiodc") {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// The impact table rows, transcribed by hand: (description, model, chain).
struct ImpactRow {
  std::string description;
  std::string model;
  std::vector<std::string> chain;
};

inline const std::vector<ImpactRow>& reference_impact_rows() {
  static const std::vector<ImpactRow> rows = {
      {"deprecated api", "AIP", {"Maintainability"}},
      {"missing api call", "AIP", {"Reliability"}},
      {"missing argument scoping", "AI", {"Security", "Integrity"}},
      {"wrong api usage", "AIP", {"Accuracy"}},
      {"missing dense layer", "AI", {"Trustworthiness", "Accuracy"}},
      {"missing dense layer", "AIP", {"Accuracy"}},
      {"suboptimal network structure", "AI", {"Effectiveness"}},
      {"wrong size for convolutional layer", "AI", {"Trustworthiness", "Robustness"}},
      {"wrong size for convolutional layer", "AIP", {"Robustness"}},
      {"wrong layer type", "AI", {"Trustworthiness", "Accuracy"}},
      {"wrong layer type", "AIP", {"Accuracy"}},
      {"wrong network architecture", "AI", {"Trustworthiness", "Accuracy"}},
      {"wrong network architecture", "AI", {"Explainability", "Completeness"}},
      {"wrong network architecture", "AIP", {"Accuracy"}},
      {"wrong type of activation function", "AI", {"Trustworthiness", "Accuracy"}},
      {"wrong type of activation function", "AIP", {"Accuracy"}},
      {"wrong tensor shape", "AIP", {"Reliability"}},
      {"missing pre processing step", "AI", {"Trustworthiness", "Robustness"}},
      {"missing pre processing step", "AIP", {"Robustness"}},
      {"suboptimal batch size", "AI", {"Effectiveness"}},
      {"suboptimal number of epochs", "AI", {"Trustworthiness", "Accuracy"}},
      {"suboptimal number of epochs", "AIP", {"Accuracy"}},
      {"suboptimal number of epochs", "AIP", {"Effectiveness"}},
      {"wrong loss function calculation", "AI", {"Trustworthiness", "Accuracy"}},
      {"wrong loss function calculation", "AIP", {"Accuracy"}},
      {"wrong optimization function", "AI", {"Effectiveness"}},
      {"wrong selection of loss function", "AI", {"Trustworthiness", "Accuracy"}},
      {"wrong selection of loss function", "AI", {"Trustworthiness", "Robustness"}},
      {"wrong selection of loss function", "AIP", {"Accuracy"}},
      {"wrong selection of loss function", "AIP", {"Robustness"}},
  };
  return rows;
}

// AI attribute per description, transcribed from the classification table.
inline const std::map<std::string, std::string>& reference_ai_attribute() {
  static const std::map<std::string, std::string> m = {
      {"deprecated api", "NotRelated"},
      {"missing api call", "NotRelated"},
      {"missing argument scoping", "NotRelated"},
      {"wrong api usage", "NotRelated"},
      {"missing dense layer", "Thinking"},
      {"suboptimal network structure", "Thinking"},
      {"wrong size for convolutional layer", "Thinking"},
      {"wrong layer type", "Thinking"},
      {"wrong network architecture", "Thinking"},
      {"wrong type of activation function", "Thinking"},
      {"wrong tensor shape", "Data"},
      {"missing pre processing step", "Data"},
      {"suboptimal batch size", "Learning"},
      {"suboptimal number of epochs", "Learning"},
      {"wrong loss function calculation", "Learning"},
      {"wrong optimization function", "Learning"},
      {"wrong selection of loss function", "Learning"},
  };
  return m;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Brute-force join: every (model, characteristic) touched by every impact
// row of every defect's description.
inline std::map<std::pair<std::string, std::string>, long long> brute_force_impact_counts(
    const std::vector<std::string>& descriptions) {
  std::map<std::pair<std::string, std::string>, long long> out;
  for (const auto& d : descriptions) {
    for (const auto& row : reference_impact_rows()) {
      if (row.description != lower(d)) continue;
      for (const auto& c : row.chain) ++out[{row.model, c}];
    }
  }
  return out;
}

// Cohen's kappa straight from the definition, used as an oracle.
inline double reference_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string, double> ma, mb;
  double agree = 0;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1;
    mb[b[i]] += 1;
    if (a[i] == b[i]) agree += 1;
  }
  double pe = 0;
  for (const auto& [k, v] : ma) pe += (v / n) * (mb.count(k) ? mb[k] / n : 0.0);
  const double po = agree / n;
  return (po - pe) / (1 - pe);
}

}  // namespace testsupport
