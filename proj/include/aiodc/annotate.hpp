#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aiodc/classify.hpp"

namespace aiodc {

enum class DefectStatus { Pending, Labeled, Disputed, Resolved };

std::string_view to_string(DefectStatus s);

// Attribute two annotators are compared on. Combined compares the
// (AI, severity) tuple.
enum class AgreementAttribute { AI, Severity, Combined };

std::string_view to_string(AgreementAttribute a);
std::optional<AgreementAttribute> parse_agreement_attribute(std::string_view s);

// Two primary annotators label every defect blind; any further enrolled
// annotators may label too but never cause disputes. Mutations must be
// serialized by the caller; const access is safe between mutations.
class AnnotationSession {
 public:
  // Throws TooFewAnnotators / DuplicateDefectId. The first two annotators
  // are the primaries.
  AnnotationSession(std::string project, std::vector<std::string> defects,
                    std::vector<std::string> annotators);

  const std::string& project() const { return project_; }
  const std::vector<std::string>& defects() const { return defects_; }
  const std::vector<std::string>& annotators() const { return annotators_; }
  const std::string& primary_a() const { return annotators_[0]; }
  const std::string& primary_b() const { return annotators_[1]; }

  bool has_defect(std::string_view id) const { return index_.count(std::string(id)) > 0; }
  bool has_annotator(std::string_view a) const;

  // Stores (or overwrites) `annotator`'s label for label.defect_id and
  // returns the recomputed status. Labels freeze once a defect is resolved;
  // an identical resubmission is then a no-op.
  DefectStatus submit_label(std::string_view annotator, ClassificationLabel label);

  // Records the third-party verdict for a disputed defect. Resubmitting the
  // identical resolution is a no-op.
  void resolve_dispute(std::string_view defect_id, std::string_view resolver,
                       ClassificationLabel final_label);

  DefectStatus status(std::string_view defect_id) const;
  bool disputed_on(std::string_view defect_id, AgreementAttribute attribute) const;

  const ClassificationLabel* label(std::string_view defect_id, std::string_view annotator) const;
  const ClassificationLabel* resolution(std::string_view defect_id) const;

  std::size_t label_count() const;
  std::map<DefectStatus, std::size_t> status_counts() const;

 private:
  std::size_t require_defect(std::string_view id) const;

  std::string project_;
  std::vector<std::string> defects_;
  std::vector<std::string> annotators_;
  std::map<std::string, std::size_t, std::less<>> index_;
  // labels_[defect][annotator]
  std::vector<std::map<std::string, ClassificationLabel, std::less<>>> labels_;
  std::vector<std::optional<ClassificationLabel>> resolutions_;
};

AnnotationSession open_session(std::string project, std::vector<std::string> defects,
                               std::vector<std::string> annotators);

struct Dispute {
  std::string defect_id;
  ClassificationLabel label_a;
  ClassificationLabel label_b;
};

// Defects currently Disputed on `attribute`, sorted by defect id.
std::vector<Dispute> list_disputes(const AnnotationSession& session,
                                   AgreementAttribute attribute);

// Impact paths present in exactly one of the two primary labels.
std::vector<ImpactPath> impact_disagreement(const AnnotationSession& session,
                                            std::string_view defect_id);

struct AgreementResult {
  AgreementAttribute attribute = AgreementAttribute::AI;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
  double kappa = 0.0;
  std::size_t n = 0;
};

// Cohen's kappa over paired category labels. Throws NoOverlap for empty
// input and DegenerateMarginals when chance agreement is 1.
AgreementResult cohen_kappa(std::span<const std::string> rater_a,
                            std::span<const std::string> rater_b,
                            AgreementAttribute attribute = AgreementAttribute::AI);

// Kappa between the two primaries over defects both have labeled. For
// Severity only pairs where both gave a severity count.
AgreementResult cohen_kappa(const AnnotationSession& session, AgreementAttribute attribute);

class UnresolvedDisputesError : public Error {
 public:
  explicit UnresolvedDisputesError(std::vector<std::string> ids);
  const std::vector<std::string>& defect_ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// One final label per defect in session order: the agreed label
// (provenance Human; impacts are the union of both primaries' paths) or
// the resolution. Throws UnresolvedDisputes listing defects not ready.
std::vector<ClassificationLabel> consolidate(const AnnotationSession& session);

// Labels for defects that are Labeled or Resolved, as consolidate would
// produce them; never throws.
std::vector<ClassificationLabel> consolidatable_labels(const AnnotationSession& session);

}  // namespace aiodc
