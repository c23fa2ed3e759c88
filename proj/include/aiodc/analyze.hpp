#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aiodc/classify.hpp"

namespace aiodc {

enum class LabelAttribute { AI, Severity };

std::string_view to_string(LabelAttribute a);
std::optional<LabelAttribute> parse_label_attribute(std::string_view s);

// Canonical category names for an attribute: AI in (Data, Learning,
// Thinking, NotRelated); severity descending from Catastrophic.
std::vector<std::string> categories(LabelAttribute a);

struct DistributionRow {
  std::string category;
  long long count = 0;
  // Percent rounded half-up to two decimals, kept exactly as hundredths.
  long long percent_hundredths = 0;

  double percent() const { return static_cast<double>(percent_hundredths) / 100.0; }
  bool operator==(const DistributionRow&) const = default;
};

struct Distribution {
  std::string attribute;
  std::vector<DistributionRow> rows;
  long long total = 0;
  // Unclassified / severity-less labels left out of `total`.
  long long excluded = 0;

  bool operator==(const Distribution&) const = default;
};

// round_half_up(100 * count / total, 2 decimals) in hundredths of a percent.
long long percent_hundredths(long long count, long long total);

// "42.86%"
std::string format_percent(long long hundredths);

Distribution make_distribution(std::string attribute, std::vector<std::string> categories,
                               std::vector<long long> counts, long long excluded = 0);

// Throws EmptyInput when `labels` is empty.
Distribution one_way(std::span<const ClassificationLabel> labels, LabelAttribute attribute);

struct ContingencyTable {
  std::string row_attribute;
  std::string col_attribute;
  std::vector<std::string> row_categories;
  std::vector<std::string> col_categories;
  std::vector<std::vector<long long>> counts;  // [row][col]
  std::vector<long long> row_marginals;
  std::vector<long long> col_marginals;
  long long total = 0;
  long long excluded = 0;

  bool operator==(const ContingencyTable&) const = default;
};

// Builds a table from raw counts, computing marginals and total.
ContingencyTable make_table(std::string row_attribute, std::string col_attribute,
                            std::vector<std::string> row_categories,
                            std::vector<std::string> col_categories,
                            std::vector<std::vector<long long>> counts);

// Labels missing either attribute (Unclassified AI, no severity) are
// excluded and counted. Throws EmptyInput when `labels` is empty.
ContingencyTable two_way(std::span<const ClassificationLabel> labels, LabelAttribute row_attr,
                         LabelAttribute col_attr);

struct IndependenceTest {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  // Expected counts over the reduced table (all-zero rows/columns dropped).
  std::vector<std::vector<double>> expected;
  std::vector<std::string> row_categories;
  std::vector<std::string> col_categories;
  bool low_expected_warning = false;  // some expected cell < 5
};

// Pearson chi-square without continuity correction. Throws DegenerateTable
// when fewer than two non-empty rows or columns remain.
IndependenceTest chi_square_independence(const ContingencyTable& table);

// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
double regularized_gamma_q(double a, double x);
// P(X >= x) for X ~ chi-square(dof).
double chi_square_upper_tail(double x, int dof);

struct ImpactFrequency {
  QualityModel model;
  std::string characteristic;
  long long count;

  bool operator==(const ImpactFrequency&) const = default;
};

// Occurrences of each (path model, characteristic) over every layer of every
// path; sorted by count descending, then characteristic name, then model.
std::vector<ImpactFrequency> impact_frequencies(std::span<const ClassificationLabel> labels);

}  // namespace aiodc
