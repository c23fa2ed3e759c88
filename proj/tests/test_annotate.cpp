#include <gtest/gtest.h>

#include "aiodc/annotate.hpp"
#include "aiodc/labels_io.hpp"
#include "aiodc/session_log.hpp"
#include "aiodc/text.hpp"
#include "expect_error.hpp"
#include "support.hpp"

using namespace aiodc;
using testsupport::TempDir;

namespace {

ClassificationLabel lab(std::string id, AIAttribute ai, std::optional<Severity> sev = std::nullopt) {
  ClassificationLabel l;
  l.defect_id = std::move(id);
  l.ai = ai;
  l.severity = sev;
  return l;
}

AnnotationSession three_defects() {
  return open_session("x", {"d1", "d2", "d3"}, {"a1", "a2", "a3"});
}

}  // namespace

TEST(Session, Construction) {
  std::vector<std::string> ids;
  for (int i = 1; i <= 42; ++i) ids.push_back("k" + std::to_string(i));
  const auto s = open_session("keras", ids, {"a1", "a2"});
  EXPECT_EQ(s.status_counts().at(DefectStatus::Pending), 42u);
  const auto empty = open_session("x", {}, {"a1", "a2"});
  EXPECT_TRUE(empty.defects().empty());
  EXPECT_AIODC_ERROR(open_session("x", {"d"}, {"a1"}), ErrorCode::TooFewAnnotators);
  EXPECT_AIODC_ERROR(open_session("x", {"d"}, {"a1", "a1"}), ErrorCode::TooFewAnnotators);
  EXPECT_AIODC_ERROR(open_session("x", {"d", "d"}, {"a1", "a2"}), ErrorCode::DuplicateDefectId);
}

TEST(Session, AgreementAndDispute) {
  auto s = three_defects();
  EXPECT_EQ(s.submit_label("a1", lab("d1", AIAttribute::Learning)), DefectStatus::Pending);
  EXPECT_EQ(s.submit_label("a2", lab("d1", AIAttribute::Learning)), DefectStatus::Labeled);
  s.submit_label("a1", lab("d2", AIAttribute::Learning));
  EXPECT_EQ(s.submit_label("a2", lab("d2", AIAttribute::Thinking)), DefectStatus::Disputed);
  EXPECT_AIODC_ERROR(s.submit_label("a1", lab("nope", AIAttribute::Data)), ErrorCode::UnknownDefect);
  EXPECT_AIODC_ERROR(s.submit_label("zz", lab("d1", AIAttribute::Data)), ErrorCode::UnknownAnnotator);
}

TEST(Session, ThirdAnnotatorNeverDisputes) {
  auto s = three_defects();
  s.submit_label("a1", lab("d1", AIAttribute::Learning));
  s.submit_label("a2", lab("d1", AIAttribute::Learning));
  EXPECT_EQ(s.submit_label("a3", lab("d1", AIAttribute::Data)), DefectStatus::Labeled);
}

TEST(Session, SeverityOnlyDispute) {
  auto s = three_defects();
  s.submit_label("a1", lab("d3", AIAttribute::Data, Severity::High));
  s.submit_label("a2", lab("d3", AIAttribute::Data, Severity::Low));
  EXPECT_EQ(s.status("d3"), DefectStatus::Disputed);
  EXPECT_TRUE(list_disputes(s, AgreementAttribute::AI).empty());
  ASSERT_EQ(list_disputes(s, AgreementAttribute::Severity).size(), 1u);
  EXPECT_EQ(list_disputes(s, AgreementAttribute::Severity)[0].defect_id, "d3");
}

TEST(Session, ListDisputes) {
  auto s = three_defects();
  EXPECT_TRUE(list_disputes(s, AgreementAttribute::AI).empty());
  s.submit_label("a1", lab("d1", AIAttribute::Learning));
  s.submit_label("a2", lab("d1", AIAttribute::Learning));
  s.submit_label("a1", lab("d2", AIAttribute::Learning));
  s.submit_label("a2", lab("d2", AIAttribute::Thinking));
  const auto d = list_disputes(s, AgreementAttribute::AI);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].defect_id, "d2");
  EXPECT_EQ(d[0].label_a.ai, AIAttribute::Learning);
  EXPECT_EQ(d[0].label_b.ai, AIAttribute::Thinking);
}

TEST(Session, ResolveDispute) {
  auto s = three_defects();
  s.submit_label("a1", lab("d1", AIAttribute::Learning));
  s.submit_label("a2", lab("d1", AIAttribute::Learning));
  s.submit_label("a1", lab("d2", AIAttribute::Learning));
  s.submit_label("a2", lab("d2", AIAttribute::Thinking));
  EXPECT_AIODC_ERROR(s.resolve_dispute("d2", "a1", lab("d2", AIAttribute::Thinking)),
                     ErrorCode::ResolverIsParty);
  EXPECT_AIODC_ERROR(s.resolve_dispute("d1", "a3", lab("d1", AIAttribute::Thinking)),
                     ErrorCode::NotDisputed);
  s.resolve_dispute("d2", "a3", lab("d2", AIAttribute::Thinking));
  EXPECT_EQ(s.status("d2"), DefectStatus::Resolved);
  ASSERT_NE(s.resolution("d2"), nullptr);
  EXPECT_EQ(s.resolution("d2")->ai, AIAttribute::Thinking);
  EXPECT_EQ(s.resolution("d2")->provenance, Provenance::Resolved);
  // Identical re-resolution is a no-op; labels are frozen afterwards.
  s.resolve_dispute("d2", "a3", lab("d2", AIAttribute::Thinking));
  EXPECT_AIODC_ERROR(s.submit_label("a1", lab("d2", AIAttribute::Data)), ErrorCode::LabelsFrozen);
}

TEST(Session, ImpactDisagreement) {
  auto s = three_defects();
  auto a = lab("d1", AIAttribute::Learning);
  a.impacts = {{QualityModel::AIP, {"Accuracy"}}, {QualityModel::AI, {"Effectiveness"}}};
  auto b = lab("d1", AIAttribute::Learning);
  b.impacts = {{QualityModel::AIP, {"Accuracy"}}};
  s.submit_label("a1", a);
  s.submit_label("a2", b);
  const auto diff = impact_disagreement(s, "d1");
  ASSERT_EQ(diff.size(), 1u);
  EXPECT_EQ(render_impact_path(diff[0]), "AI:Effectiveness");
  // Impact differences alone do not open a dispute.
  EXPECT_EQ(s.status("d1"), DefectStatus::Labeled);
}

TEST(Kappa, Identical) {
  std::vector<std::string> v = {"Data", "Learning", "Thinking", "NotRelated", "Learning",
                                "Data", "Learning", "Thinking", "Thinking", "Learning"};
  const auto r = cohen_kappa(v, v);
  EXPECT_DOUBLE_EQ(r.kappa, 1.0);
  EXPECT_EQ(r.n, 10u);
}

TEST(Kappa, HandExample) {
  const std::vector<std::string> a = {"Data", "Learning", "Learning", "Thinking"};
  const std::vector<std::string> b = {"Data", "Learning", "Thinking", "Thinking"};
  // Marginals a: D .25 L .5 T .25; b: D .25 L .25 T .5 -> p_e = .0625 + .125 + .125.
  const auto r = cohen_kappa(a, b);
  EXPECT_NEAR(r.observed, 0.75, 1e-12);
  EXPECT_NEAR(r.expected, 0.3125, 1e-12);
  EXPECT_NEAR(r.kappa, 0.4375 / 0.6875, 1e-9);
  EXPECT_NEAR(r.kappa, testsupport::reference_kappa(a, b), 1e-12);
}

TEST(Kappa, Degenerate) {
  const std::vector<std::string> all(5, "Learning");
  EXPECT_AIODC_ERROR(cohen_kappa(all, all), ErrorCode::DegenerateMarginals);
  const std::vector<std::string> none;
  EXPECT_AIODC_ERROR(cohen_kappa(none, none), ErrorCode::NoOverlap);
}

TEST(Kappa, SessionUsesDoublyLabeledSubset) {
  auto s = open_session("x", {"d1", "d2", "d3", "d4", "d5", "d6"}, {"a1", "a2"});
  EXPECT_AIODC_ERROR(cohen_kappa(s, AgreementAttribute::AI), ErrorCode::NoOverlap);
  const std::vector<std::pair<AIAttribute, AIAttribute>> pairs = {
      {AIAttribute::Data, AIAttribute::Data},
      {AIAttribute::Learning, AIAttribute::Learning},
      {AIAttribute::Learning, AIAttribute::Thinking},
      {AIAttribute::Thinking, AIAttribute::Thinking}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto id = "d" + std::to_string(i + 1);
    s.submit_label("a1", lab(id, pairs[i].first));
    s.submit_label("a2", lab(id, pairs[i].second));
  }
  s.submit_label("a1", lab("d5", AIAttribute::NotRelated));  // single-labeled, ignored
  const auto r = cohen_kappa(s, AgreementAttribute::AI);
  EXPECT_EQ(r.n, 4u);
  EXPECT_NEAR(r.kappa, 0.4375 / 0.6875, 1e-9);
  // No severities yet.
  EXPECT_AIODC_ERROR(cohen_kappa(s, AgreementAttribute::Severity), ErrorCode::NoOverlap);
}

TEST(Consolidate, AllAgreed) {
  auto s = three_defects();
  for (const char* id : {"d1", "d2", "d3"}) {
    s.submit_label("a1", lab(id, AIAttribute::Data, Severity::Low));
    s.submit_label("a2", lab(id, AIAttribute::Data, Severity::Low));
  }
  const auto out = consolidate(s);
  ASSERT_EQ(out.size(), 3u);
  for (const auto& l : out) {
    EXPECT_EQ(l.provenance, Provenance::Human);
    EXPECT_FALSE(l.annotator);
  }
}

TEST(Consolidate, ResolvedCarriesProvenance) {
  auto s = three_defects();
  for (const char* id : {"d1", "d3"}) {
    s.submit_label("a1", lab(id, AIAttribute::Data));
    s.submit_label("a2", lab(id, AIAttribute::Data));
  }
  s.submit_label("a1", lab("d2", AIAttribute::Data));
  s.submit_label("a2", lab("d2", AIAttribute::Learning));
  s.resolve_dispute("d2", "a3", lab("d2", AIAttribute::Learning));
  const auto out = consolidate(s);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[1].defect_id, "d2");
  EXPECT_EQ(out[1].provenance, Provenance::Resolved);
  EXPECT_EQ(out[1].ai, AIAttribute::Learning);
}

TEST(Consolidate, PendingBlocks) {
  auto s = three_defects();
  s.submit_label("a1", lab("d1", AIAttribute::Data));
  try {
    consolidate(s);
    FAIL() << "expected UnresolvedDisputes";
  } catch (const UnresolvedDisputesError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnresolvedDisputes);
    EXPECT_EQ(e.defect_ids(), (std::vector<std::string>{"d1", "d2", "d3"}));
  }
  EXPECT_TRUE(consolidatable_labels(s).empty());
}

TEST(Consolidate, UnionOfImpacts) {
  auto s = three_defects();
  auto a = lab("d1", AIAttribute::Learning);
  a.impacts = {{QualityModel::AIP, {"Accuracy"}}};
  auto b = lab("d1", AIAttribute::Learning);
  b.impacts = {{QualityModel::AI, {"Effectiveness"}}};
  s.submit_label("a1", a);
  s.submit_label("a2", b);
  const auto out = consolidatable_labels(s);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].impacts.size(), 2u);
}

TEST(LabelFile, RoundTrip) {
  std::vector<ClassificationLabel> labels;
  auto l1 = lab("d1", AIAttribute::Learning, Severity::Catastrophic);
  l1.annotator = "alice";
  l1.impacts = {{QualityModel::AI, {"Trustworthiness", "Accuracy"}}, {QualityModel::AIP, {"Accuracy"}}};
  l1.rationale = "tab\there, newline\nand backslash \\";
  l1.provenance = Provenance::Human;
  labels.push_back(l1);
  auto l2 = lab("d2", AIAttribute::NotRelated);
  l2.provenance = Provenance::Rule;
  labels.push_back(l2);
  auto l3 = lab("d3", AIAttribute::Unclassified, Severity::Low);
  l3.provenance = Provenance::Resolved;
  l3.annotator = "carol";
  labels.push_back(l3);
  EXPECT_EQ(parse_labels(render_labels(labels)), labels);
}

TEST(LabelFile, SixColumnsDefaultToHuman) {
  const auto ls = parse_labels("d1\tbob\tData\tHigh\t-\tbecause\n");
  ASSERT_EQ(ls.size(), 1u);
  EXPECT_EQ(ls[0].provenance, Provenance::Human);
  EXPECT_EQ(ls[0].annotator, "bob");
  EXPECT_EQ(ls[0].severity, Severity::High);
  EXPECT_AIODC_ERROR(parse_labels("d1\tbob\tData\n"), ErrorCode::ParseError);
  EXPECT_AIODC_ERROR(parse_labels("d1\tbob\tNope\tHigh\t-\t\n"), ErrorCode::ParseError);
}

TEST(LabelFile, JsonRoundTrip) {
  auto l = lab("d9", AIAttribute::Thinking, Severity::Medium);
  l.impacts = {{QualityModel::AI, {"Explainability", "Completeness"}}};
  l.annotator = "x";
  l.rationale = "r";
  l.provenance = Provenance::Human;
  EXPECT_EQ(label_from_json(label_to_json(l)), l);
}

TEST(SessionStore, ReplayRestoresState) {
  TempDir dir;
  const auto log = dir / "s.log";
  {
    SessionStore store(log);
    store.open("p", "p", {"d1", "d2"}, {"a1", "a2", "a3"});
    store.submit("p", "a1", lab("d1", AIAttribute::Data));
    store.submit("p", "a2", lab("d1", AIAttribute::Learning));
    store.submit("p", "a1", lab("d2", AIAttribute::Data));
    store.resolve("p", "d1", "a3", lab("d1", AIAttribute::Learning));
  }
  SessionStore again(log);
  const auto& s = again.get("p");
  EXPECT_EQ(s.status("d1"), DefectStatus::Resolved);
  EXPECT_EQ(s.status("d2"), DefectStatus::Pending);
  EXPECT_EQ(s.label_count(), 3u);
  EXPECT_EQ(again.event_count(), 5u);
}

TEST(SessionStore, IdempotentResubmission) {
  TempDir dir;
  SessionStore store(dir / "s.log");
  store.open("p", "p", {"d1"}, {"a1", "a2"});
  store.open("p", "p", {"d1"}, {"a1", "a2"});
  store.submit("p", "a1", lab("d1", AIAttribute::Data));
  store.submit("p", "a1", lab("d1", AIAttribute::Data));
  EXPECT_EQ(store.event_count(), 2u);
  EXPECT_AIODC_ERROR(store.open("p", "p", {"d1", "d2"}, {"a1", "a2"}), ErrorCode::DuplicateId);
}

TEST(SessionStore, RejectedMutationIsNotLogged) {
  TempDir dir;
  SessionStore store(dir / "s.log");
  store.open("p", "p", {"d1"}, {"a1", "a2"});
  EXPECT_AIODC_ERROR(store.submit("p", "zz", lab("d1", AIAttribute::Data)), ErrorCode::UnknownAnnotator);
  EXPECT_EQ(store.event_count(), 1u);
  EXPECT_EQ(text::lines(text::read_file(dir / "s.log")).size(), 1u);
  EXPECT_AIODC_ERROR(store.get("nope"), ErrorCode::UnknownSession);
}

TEST(SessionStore, CorruptLog) {
  TempDir dir;
  text::write_file(dir / "s.log", "{\"type\":\"label\",\"session\":\"missing\"}\n");
  EXPECT_AIODC_ERROR(SessionStore(dir / "s.log"), ErrorCode::CorruptPersistence);
  text::write_file(dir / "t.log", "garbage\n");
  EXPECT_AIODC_ERROR(SessionStore(dir / "t.log"), ErrorCode::CorruptPersistence);
}
