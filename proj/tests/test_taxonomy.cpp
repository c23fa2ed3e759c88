#include <gtest/gtest.h>

#include "aiodc/taxonomy.hpp"
#include "expect_error.hpp"
#include "support.hpp"

using namespace aiodc;

namespace {

Taxonomy bundled() { return load_taxonomy(testsupport::kTaxonomy); }

ImpactPath path(QualityModel m, std::vector<std::string> chain) { return {m, std::move(chain)}; }

}  // namespace

TEST(Taxonomy, BundledFileHasRequiredCharacteristics) {
  const auto tax = bundled();
  EXPECT_GE(tax.characteristics().size(), 10u);
  for (auto name : kRequiredCharacteristics) {
    EXPECT_NE(tax.find(name), nullptr) << name;
  }
  const auto* trust = tax.find("Trustworthiness");
  ASSERT_NE(trust, nullptr);
  EXPECT_EQ(trust->model, QualityModel::AI);
  EXPECT_EQ(trust->layer, 1);
  const auto* acc = tax.find("Accuracy");
  ASSERT_NE(acc, nullptr);
  EXPECT_EQ(acc->model, QualityModel::Shared);
  EXPECT_EQ(acc->layer_in(QualityModel::AI), 2);
  EXPECT_EQ(acc->layer_in(QualityModel::AIP), 1);
}

TEST(Taxonomy, EmptyFileIsParseError) {
  EXPECT_AIODC_ERROR(parse_taxonomy(""), ErrorCode::ParseError);
  EXPECT_AIODC_ERROR(parse_taxonomy("# only a comment\n"), ErrorCode::ParseError);
}

TEST(Taxonomy, DuplicateNameRejected) {
  EXPECT_AIODC_ERROR(parse_taxonomy("Accuracy AI 1\nAccuracy AIP 1\n"),
                     ErrorCode::DuplicateCharacteristic);
}

TEST(Taxonomy, BadLayerRejected) {
  EXPECT_AIODC_ERROR(parse_taxonomy("Foo AI 4\n"), ErrorCode::BadLayer);
  EXPECT_AIODC_ERROR(parse_taxonomy("Foo AI 0\n"), ErrorCode::BadLayer);
}

TEST(Taxonomy, MissingFile) {
  EXPECT_AIODC_ERROR(load_taxonomy("/nonexistent/tax.tax"), ErrorCode::FileMissing);
}

TEST(Taxonomy, RenderRoundTrip) {
  const auto tax = bundled();
  EXPECT_EQ(parse_taxonomy(render_taxonomy(tax)), tax);
}

TEST(ImpactPathValidation, PaperRowsAreValid) {
  const auto tax = bundled();
  EXPECT_FALSE(validate_impact_path(path(QualityModel::AIP, {"Maintainability"}), tax));
  EXPECT_FALSE(validate_impact_path(path(QualityModel::AI, {"Trustworthiness", "Accuracy"}), tax));
  EXPECT_FALSE(validate_impact_path(path(QualityModel::AIP, {"Accuracy"}), tax));
  EXPECT_FALSE(validate_impact_path(path(QualityModel::AI, {"Effectiveness"}), tax));
}

TEST(ImpactPathValidation, EmptyPath) {
  const auto d = validate_impact_path(path(QualityModel::AI, {}), bundled());
  ASSERT_TRUE(d);
  EXPECT_EQ(d->code, ErrorCode::EmptyPath);
}

TEST(ImpactPathValidation, ReversedLayersMismatch) {
  // Accuracy is layer 2 in AI paths, so it cannot lead.
  const auto d = validate_impact_path(path(QualityModel::AI, {"Accuracy", "Trustworthiness"}), bundled());
  ASSERT_TRUE(d);
  EXPECT_EQ(d->code, ErrorCode::LayerMismatch);
}

TEST(ImpactPathValidation, UnknownAndWrongModel) {
  const auto tax = bundled();
  auto d = validate_impact_path(path(QualityModel::AI, {"Nonsense"}), tax);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->code, ErrorCode::UnknownCharacteristic);
  d = validate_impact_path(path(QualityModel::AI, {"Maintainability"}), tax);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->code, ErrorCode::ModelMismatch);
  d = validate_impact_path(path(QualityModel::AIP, {"Trustworthiness"}), tax);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->code, ErrorCode::ModelMismatch);
}

TEST(ImpactPathValidation, TooDeep) {
  const auto d = validate_impact_path(
      path(QualityModel::AI, {"Trustworthiness", "Accuracy", "Robustness", "Integrity"}), bundled());
  ASSERT_TRUE(d);
  EXPECT_EQ(d->code, ErrorCode::LayerMismatch);
}

TEST(ImpactPathText, RenderParse) {
  const auto p = path(QualityModel::AI, {"Trustworthiness", "Accuracy"});
  EXPECT_EQ(render_impact_path(p), "AI:Trustworthiness>Accuracy");
  EXPECT_EQ(parse_impact_path("AI:Trustworthiness>Accuracy"), p);
  EXPECT_EQ(parse_impact_path(" AIP : Accuracy "), path(QualityModel::AIP, {"Accuracy"}));
  EXPECT_FALSE(parse_impact_path("Accuracy"));
  EXPECT_FALSE(parse_impact_path("XY:Accuracy"));
}

TEST(Severity, Ranks) {
  EXPECT_EQ(severity_rank(Severity::Catastrophic), 5);
  EXPECT_EQ(severity_rank(Severity::High), 3);
  EXPECT_EQ(severity_rank(Severity::Low), 1);
  EXPECT_TRUE(Severity::Catastrophic > Severity::Critical);
  for (int r = 1; r <= 5; ++r) EXPECT_EQ(severity_rank(*severity_from_rank(r)), r);
  EXPECT_FALSE(severity_from_rank(0));
  EXPECT_FALSE(severity_from_rank(6));
}

TEST(Severity, Parse) {
  EXPECT_EQ(parse_severity("catastrophic"), Severity::Catastrophic);
  EXPECT_EQ(parse_severity("HIGH"), Severity::High);
  EXPECT_FALSE(parse_severity("severe"));
}

TEST(AiAttribute, ParseVariants) {
  EXPECT_EQ(parse_ai_attribute("Not Related"), AIAttribute::NotRelated);
  EXPECT_EQ(parse_ai_attribute("not_related"), AIAttribute::NotRelated);
  EXPECT_EQ(parse_ai_attribute("learning"), AIAttribute::Learning);
  EXPECT_FALSE(parse_ai_attribute("Inference"));
  for (auto a : kAiCategories) EXPECT_FALSE(describe(a).empty());
}

TEST(OdcDefectType, CloudExtensions) {
  EXPECT_TRUE(is_cloud_extension(OdcDefectType::Isolation));
  EXPECT_TRUE(is_cloud_extension(OdcDefectType::IaaSPaaS));
  EXPECT_FALSE(is_cloud_extension(OdcDefectType::Algorithm));
  EXPECT_EQ(parse_odc_defect_type("algorithm"), OdcDefectType::Algorithm);
}
