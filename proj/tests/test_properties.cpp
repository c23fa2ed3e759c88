// Randomized property checks with fixed seeds.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "aiodc/analyze.hpp"
#include "aiodc/annotate.hpp"
#include "aiodc/classify.hpp"
#include "aiodc/ingest.hpp"
#include "aiodc/labels_io.hpp"
#include "support.hpp"

using namespace aiodc;

namespace {

std::vector<std::string> random_labels(std::mt19937& rng, std::size_t n,
                                       const std::vector<std::string>& cats) {
  std::uniform_int_distribution<std::size_t> pick(0, cats.size() - 1);
  std::vector<std::string> out(n);
  for (auto& s : out) s = cats[pick(rng)];
  return out;
}

ClassificationLabel random_label(std::mt19937& rng, int idx) {
  static const std::array<AIAttribute, 5> ais = {AIAttribute::Data, AIAttribute::Learning,
                                                 AIAttribute::Thinking, AIAttribute::NotRelated,
                                                 AIAttribute::Unclassified};
  ClassificationLabel l;
  l.defect_id = "d" + std::to_string(idx);
  l.ai = ais[std::uniform_int_distribution<int>(0, 4)(rng)];
  const int sev = std::uniform_int_distribution<int>(0, 5)(rng);
  if (sev > 0) l.severity = severity_from_rank(sev);
  return l;
}

}  // namespace

TEST(Property, SeverityMonotoneOverAllContexts) {
  const auto m = SeverityMatrix::standard();
  auto rank = [&](Criticality c, Reversibility r, Scope s) {
    return severity_rank(assign_severity({c, r, s}, m));
  };
  int checked = 0;
  for (auto c : kCriticalities) {
    for (auto r : kReversibilities) {
      for (auto s : kScopes) {
        ++checked;
        const int here = rank(c, r, s);
        EXPECT_GE(here, 1);
        EXPECT_LE(here, 5);
        // Worse reversibility (lower enum index) never lowers severity.
        for (auto r2 : kReversibilities) {
          if (static_cast<int>(r2) < static_cast<int>(r)) EXPECT_GE(rank(c, r2, s), here);
        }
        if (s == Scope::Localized) EXPECT_GE(rank(c, r, Scope::Systemic), here);
        for (auto c2 : kCriticalities) {
          if (static_cast<int>(c2) < static_cast<int>(c)) EXPECT_GE(rank(c2, r, s), here);
        }
      }
    }
  }
  EXPECT_EQ(checked, 18);
}

TEST(Property, KappaSymmetricAndRenamingInvariant) {
  std::mt19937 rng(11);
  const std::vector<std::string> cats = {"Data", "Learning", "Thinking", "NotRelated"};
  const std::vector<std::string> renamed = {"w", "x", "y", "z"};
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_labels(rng, 30, cats);
    auto b = a;
    // Perturb some of b so agreement is partial.
    for (auto& s : b) {
      if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) s = cats[rng() % 4];
    }
    double k1, k2;
    try {
      k1 = cohen_kappa(a, b).kappa;
      k2 = cohen_kappa(b, a).kappa;
    } catch (const Error&) {
      continue;  // degenerate draw
    }
    EXPECT_NEAR(k1, k2, 1e-12);
    EXPECT_NEAR(k1, testsupport::reference_kappa(a, b), 1e-12);
    auto rename = [&](std::vector<std::string> v) {
      for (auto& s : v) s = renamed[std::find(cats.begin(), cats.end(), s) - cats.begin()];
      return v;
    };
    EXPECT_NEAR(cohen_kappa(rename(a), rename(b)).kappa, k1, 1e-12);
  }
}

TEST(Property, KappaNearZeroForIndependentRaters) {
  std::mt19937 rng(2024);
  const std::vector<std::string> cats = {"Data", "Learning", "Thinking", "NotRelated"};
  const auto a = random_labels(rng, 10000, cats);
  const auto b = random_labels(rng, 10000, cats);
  EXPECT_LT(std::abs(cohen_kappa(a, b).kappa), 0.05);
}

TEST(Property, TwoWayMarginalsMatchOneWay) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 120)(rng);
    std::vector<ClassificationLabel> labels;
    for (int i = 0; i < n; ++i) labels.push_back(random_label(rng, i));
    // Marginal consistency holds over labels carrying both attributes.
    std::vector<ClassificationLabel> complete;
    for (const auto& l : labels) {
      if (l.ai != AIAttribute::Unclassified && l.severity) complete.push_back(l);
    }
    if (complete.empty()) continue;
    const auto t = two_way(complete, LabelAttribute::AI, LabelAttribute::Severity);
    const auto ai = one_way(complete, LabelAttribute::AI);
    const auto sev = one_way(complete, LabelAttribute::Severity);
    for (std::size_t i = 0; i < ai.rows.size(); ++i) EXPECT_EQ(t.row_marginals[i], ai.rows[i].count);
    for (std::size_t j = 0; j < sev.rows.size(); ++j) EXPECT_EQ(t.col_marginals[j], sev.rows[j].count);
    EXPECT_EQ(t.total, ai.total);
    // On the raw set the exclusions account for every dropped label.
    const auto raw = two_way(labels, LabelAttribute::AI, LabelAttribute::Severity);
    EXPECT_EQ(raw.total + raw.excluded, static_cast<long long>(labels.size()));
    EXPECT_EQ(raw.counts, t.counts);
  }
}

TEST(Property, ChiSquarePermutationInvariant) {
  std::mt19937 rng(7);
  std::vector<std::vector<long long>> c(4, std::vector<long long>(5));
  for (auto& row : c) for (auto& v : row) v = std::uniform_int_distribution<int>(0, 30)(rng);
  auto build = [](const std::vector<std::vector<long long>>& counts) {
    std::vector<std::string> r(counts.size()), k(counts[0].size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = "r" + std::to_string(i);
    for (std::size_t j = 0; j < k.size(); ++j) k[j] = "c" + std::to_string(j);
    return make_table("R", "C", r, k, counts);
  };
  const auto base = chi_square_independence(build(c));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> rp(4), cp(5);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    std::vector<std::vector<long long>> p(4, std::vector<long long>(5));
    for (std::size_t i = 0; i < 4; ++i) for (std::size_t j = 0; j < 5; ++j) p[i][j] = c[rp[i]][cp[j]];
    const auto r = chi_square_independence(build(p));
    EXPECT_NEAR(r.statistic, base.statistic, 1e-9);
    EXPECT_EQ(r.dof, base.dof);
    EXPECT_NEAR(r.p_value, base.p_value, 1e-12);
  }
}

TEST(Property, DedupeIdempotent) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(0, 25)(rng);
    std::vector<DefectRecord> recs(n);
    for (int i = 0; i < n; ++i) recs[i].id = "r" + std::to_string(i);
    for (int i = 0; i < n; ++i) {
      const int refs = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int k = 0; k < refs; ++k) recs[i].cross_refs.insert("r" + std::to_string(rng() % (n + 3)));
    }
    const auto once = dedupe_by_issue_id(recs);
    const auto twice = dedupe_by_issue_id(once.kept);
    EXPECT_EQ(twice.kept, once.kept);
    EXPECT_EQ(once.kept.size() + once.dropped.size(), recs.size());
  }
}

TEST(Property, LabelFileRoundTrip) {
  std::mt19937 rng(3);
  const std::vector<std::string> annotators = {"", "alice", "bob w"};
  const std::vector<ImpactPath> paths = {{QualityModel::AI, {"Trustworthiness", "Accuracy"}},
                                         {QualityModel::AIP, {"Maintainability"}},
                                         {QualityModel::AI, {"Security", "Integrity"}}};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ClassificationLabel> labels;
    for (int i = 0; i < 8; ++i) {
      auto l = random_label(rng, i);
      const auto& who = annotators[rng() % annotators.size()];
      if (!who.empty()) l.annotator = who;
      for (const auto& p : paths) if (rng() % 2) l.impacts.push_back(p);
      if (rng() % 2) l.rationale = "why\t" + std::to_string(rng() % 1000) + "\n\\end";
      l.provenance = static_cast<Provenance>(rng() % 3);
      labels.push_back(std::move(l));
    }
    EXPECT_EQ(parse_labels(render_labels(labels)), labels);
  }
}

TEST(Property, CanonicalRecordRoundTrip) {
  std::mt19937 rng(8);
  const std::vector<std::string> tokens = {"a", "b", " ", "\"", "\\", "\t", "\n", "\xc3\xa9", "{", "]", ",", ":"};
  for (int trial = 0; trial < 100; ++trial) {
    DefectRecord r;
    r.id = "id-" + std::to_string(trial);
    r.platform = static_cast<Platform>(rng() % 3);
    r.framework = rng() % 2 ? "keras" : "tensorflow";
    for (int i = 0; i < 12; ++i) r.title += tokens[rng() % tokens.size()];
    r.description = r.title + r.title;
    r.defect_type_label = rng() % 2 ? "wrong layer type" : "";
    if (rng() % 2) r.cross_refs = {"x", "y"};
    if (rng() % 2) r.created_at = "2020-01-02T03:04:05Z";
    if (rng() % 2) r.odc.defect_type = static_cast<OdcDefectType>(rng() % 10);
    if (rng() % 2) r.odc.trigger = "Workload";
    const auto parsed = parse_canonical(render_canonical_record(r));
    ASSERT_EQ(parsed.records.size(), 1u) << render_canonical_record(r);
    EXPECT_EQ(parsed.records[0], r);
  }
}
