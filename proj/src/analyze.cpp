#include "aiodc/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "aiodc/text.hpp"

namespace aiodc {

namespace {

// Category index of a label under `attr`; nullopt if the label lacks it.
std::optional<std::size_t> category_index(const ClassificationLabel& l, LabelAttribute attr) {
  if (attr == LabelAttribute::AI) {
    for (std::size_t i = 0; i < kAiCategories.size(); ++i) {
      if (kAiCategories[i] == l.ai) return i;
    }
    return std::nullopt;
  }
  if (!l.severity) return std::nullopt;
  for (std::size_t i = 0; i < kSeverityLevels.size(); ++i) {
    if (kSeverityLevels[i] == *l.severity) return i;
  }
  return std::nullopt;
}

std::string attribute_name(LabelAttribute a) {
  return a == LabelAttribute::AI ? "AI" : "Severity";
}

// Series expansion of the lower regularized gamma P(a, x), x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), x >= a + 1 (modified Lentz).
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

std::string_view to_string(LabelAttribute a) {
  return a == LabelAttribute::AI ? "ai" : "severity";
}

std::optional<LabelAttribute> parse_label_attribute(std::string_view s) {
  const auto key = text::to_lower(text::trim(s));
  if (key == "ai") return LabelAttribute::AI;
  if (key == "severity") return LabelAttribute::Severity;
  return std::nullopt;
}

std::vector<std::string> categories(LabelAttribute a) {
  std::vector<std::string> out;
  if (a == LabelAttribute::AI) {
    for (auto c : kAiCategories) out.emplace_back(to_string(c));
  } else {
    for (auto s : kSeverityLevels) out.emplace_back(to_string(s));
  }
  return out;
}

long long percent_hundredths(long long count, long long total) {
  if (total <= 0) return 0;
  // 100 * 100 * count / total, rounded half-up, in integers.
  return (2 * 10000 * count + total) / (2 * total);
}

std::string format_percent(long long hundredths) {
  const auto whole = hundredths / 100;
  const auto frac = hundredths % 100;
  return std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac) + "%";
}

Distribution make_distribution(std::string attribute, std::vector<std::string> cats,
                               std::vector<long long> counts, long long excluded) {
  Distribution d;
  d.attribute = std::move(attribute);
  d.excluded = excluded;
  for (auto c : counts) d.total += c;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    d.rows.push_back({std::move(cats[i]), counts[i], percent_hundredths(counts[i], d.total)});
  }
  return d;
}

Distribution one_way(std::span<const ClassificationLabel> labels, LabelAttribute attribute) {
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "no labels to analyze");
  auto cats = categories(attribute);
  std::vector<long long> counts(cats.size(), 0);
  long long excluded = 0;
  for (const auto& l : labels) {
    if (const auto i = category_index(l, attribute)) {
      ++counts[*i];
    } else {
      ++excluded;
    }
  }
  return make_distribution(attribute_name(attribute), std::move(cats), std::move(counts),
                           excluded);
}

ContingencyTable make_table(std::string row_attribute, std::string col_attribute,
                            std::vector<std::string> row_categories,
                            std::vector<std::string> col_categories,
                            std::vector<std::vector<long long>> counts) {
  ContingencyTable t;
  t.row_attribute = std::move(row_attribute);
  t.col_attribute = std::move(col_attribute);
  t.row_categories = std::move(row_categories);
  t.col_categories = std::move(col_categories);
  t.counts = std::move(counts);
  t.row_marginals.assign(t.row_categories.size(), 0);
  t.col_marginals.assign(t.col_categories.size(), 0);
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
      t.row_marginals[i] += t.counts[i][j];
      t.col_marginals[j] += t.counts[i][j];
      t.total += t.counts[i][j];
    }
  }
  return t;
}

ContingencyTable two_way(std::span<const ClassificationLabel> labels, LabelAttribute row_attr,
                         LabelAttribute col_attr) {
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "no labels to analyze");
  auto rows = categories(row_attr);
  auto cols = categories(col_attr);
  std::vector<std::vector<long long>> counts(rows.size(), std::vector<long long>(cols.size(), 0));
  long long excluded = 0;
  for (const auto& l : labels) {
    const auto i = category_index(l, row_attr);
    const auto j = category_index(l, col_attr);
    if (i && j) {
      ++counts[*i][*j];
    } else {
      ++excluded;
    }
  }
  auto t = make_table(attribute_name(row_attr), attribute_name(col_attr), std::move(rows),
                      std::move(cols), std::move(counts));
  t.excluded = excluded;
  return t;
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0 || std::isnan(a) || std::isnan(x)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_upper_tail(double x, int dof) {
  if (x <= 0.0) return 1.0;
  return std::clamp(regularized_gamma_q(0.5 * dof, 0.5 * x), 0.0, 1.0);
}

IndependenceTest chi_square_independence(const ContingencyTable& table) {
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < table.row_marginals.size(); ++i) {
    if (table.row_marginals[i] > 0) rows.push_back(i);
  }
  for (std::size_t j = 0; j < table.col_marginals.size(); ++j) {
    if (table.col_marginals[j] > 0) cols.push_back(j);
  }
  if (table.total <= 0 || rows.size() < 2 || cols.size() < 2) {
    throw Error(ErrorCode::DegenerateTable,
                std::to_string(rows.size()) + " non-empty rows x " + std::to_string(cols.size()) +
                    " non-empty columns");
  }

  IndependenceTest t;
  t.dof = static_cast<int>((rows.size() - 1) * (cols.size() - 1));
  const double n = static_cast<double>(table.total);
  for (auto i : rows) t.row_categories.push_back(table.row_categories[i]);
  for (auto j : cols) t.col_categories.push_back(table.col_categories[j]);
  for (auto i : rows) {
    std::vector<double> exp_row;
    for (auto j : cols) {
      const double e = static_cast<double>(table.row_marginals[i]) *
                       static_cast<double>(table.col_marginals[j]) / n;
      exp_row.push_back(e);
      if (e < 5.0) t.low_expected_warning = true;
      if (e > 0.0) {
        const double diff = static_cast<double>(table.counts[i][j]) - e;
        t.statistic += diff * diff / e;
      }
    }
    t.expected.push_back(std::move(exp_row));
  }
  t.p_value = chi_square_upper_tail(t.statistic, t.dof);
  return t;
}

std::vector<ImpactFrequency> impact_frequencies(std::span<const ClassificationLabel> labels) {
  std::map<std::pair<std::string, QualityModel>, long long> counts;
  for (const auto& l : labels) {
    for (const auto& path : l.impacts) {
      for (const auto& c : path.characteristics) ++counts[{c, path.model}];
    }
  }
  std::vector<ImpactFrequency> out;
  for (const auto& [key, n] : counts) out.push_back({key.second, key.first, n});
  std::sort(out.begin(), out.end(), [](const ImpactFrequency& a, const ImpactFrequency& b) {
    return std::tie(b.count, a.characteristic, a.model) <
           std::tie(a.count, b.characteristic, b.model);
  });
  return out;
}

}  // namespace aiodc
