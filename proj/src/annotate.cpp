#include "aiodc/annotate.hpp"

#include <algorithm>
#include <set>

#include "aiodc/text.hpp"

namespace aiodc {

namespace {

std::string category_of(const ClassificationLabel& l, AgreementAttribute attribute) {
  const std::string sev = l.severity ? std::string(to_string(*l.severity)) : "-";
  switch (attribute) {
    case AgreementAttribute::AI: return std::string(to_string(l.ai));
    case AgreementAttribute::Severity: return sev;
    case AgreementAttribute::Combined: return std::string(to_string(l.ai)) + "/" + sev;
  }
  return {};
}

// Agreed label: first primary's verdict with the union of both impact sets.
ClassificationLabel agreed_label(const ClassificationLabel& a, const ClassificationLabel& b) {
  ClassificationLabel out = a;
  out.provenance = Provenance::Human;
  out.annotator.reset();
  for (const auto& p : b.impacts) {
    if (std::find(out.impacts.begin(), out.impacts.end(), p) == out.impacts.end()) {
      out.impacts.push_back(p);
    }
  }
  if (a.rationale && b.rationale && *a.rationale != *b.rationale) {
    out.rationale = *a.rationale + " | " + *b.rationale;
  } else if (!a.rationale) {
    out.rationale = b.rationale;
  }
  return out;
}

}  // namespace

std::string_view to_string(DefectStatus s) {
  switch (s) {
    case DefectStatus::Pending: return "Pending";
    case DefectStatus::Labeled: return "Labeled";
    case DefectStatus::Disputed: return "Disputed";
    case DefectStatus::Resolved: return "Resolved";
  }
  return "Pending";
}

std::string_view to_string(AgreementAttribute a) {
  switch (a) {
    case AgreementAttribute::AI: return "ai";
    case AgreementAttribute::Severity: return "severity";
    case AgreementAttribute::Combined: return "combined";
  }
  return "ai";
}

std::optional<AgreementAttribute> parse_agreement_attribute(std::string_view s) {
  const auto key = text::to_lower(text::trim(s));
  if (key == "ai") return AgreementAttribute::AI;
  if (key == "severity") return AgreementAttribute::Severity;
  if (key == "combined") return AgreementAttribute::Combined;
  return std::nullopt;
}

AnnotationSession::AnnotationSession(std::string project, std::vector<std::string> defects,
                                     std::vector<std::string> annotators)
    : project_(std::move(project)),
      defects_(std::move(defects)),
      annotators_(std::move(annotators)) {
  std::set<std::string> distinct(annotators_.begin(), annotators_.end());
  if (distinct.size() != annotators_.size()) {
    throw Error(ErrorCode::TooFewAnnotators, "annotator ids must be distinct");
  }
  if (annotators_.size() < 2) {
    throw Error(ErrorCode::TooFewAnnotators,
                "need at least 2 annotators, got " + std::to_string(annotators_.size()));
  }
  for (std::size_t i = 0; i < defects_.size(); ++i) {
    if (!index_.emplace(defects_[i], i).second) {
      throw Error(ErrorCode::DuplicateDefectId, defects_[i]);
    }
  }
  labels_.resize(defects_.size());
  resolutions_.resize(defects_.size());
}

bool AnnotationSession::has_annotator(std::string_view a) const {
  return std::find(annotators_.begin(), annotators_.end(), a) != annotators_.end();
}

std::size_t AnnotationSession::require_defect(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownDefect, std::string(id));
  return it->second;
}

DefectStatus AnnotationSession::submit_label(std::string_view annotator,
                                             ClassificationLabel label) {
  if (!has_annotator(annotator)) throw Error(ErrorCode::UnknownAnnotator, std::string(annotator));
  const auto idx = require_defect(label.defect_id);
  label.annotator = std::string(annotator);
  label.provenance = Provenance::Human;

  auto& slot = labels_[idx];
  if (resolutions_[idx]) {
    const auto it = slot.find(annotator);
    if (it != slot.end() && it->second == label) return DefectStatus::Resolved;
    throw Error(ErrorCode::LabelsFrozen, label.defect_id + " is already resolved");
  }
  slot.insert_or_assign(std::string(annotator), std::move(label));
  return status(defects_[idx]);
}

void AnnotationSession::resolve_dispute(std::string_view defect_id, std::string_view resolver,
                                        ClassificationLabel final_label) {
  const auto idx = require_defect(defect_id);
  final_label.defect_id = std::string(defect_id);
  final_label.annotator = std::string(resolver);
  final_label.provenance = Provenance::Resolved;
  if (resolver == primary_a() || resolver == primary_b()) {
    throw Error(ErrorCode::ResolverIsParty, std::string(resolver));
  }
  if (resolutions_[idx]) {
    if (*resolutions_[idx] == final_label) return;
    throw Error(ErrorCode::NotDisputed, std::string(defect_id) + " is already resolved");
  }
  if (status(defect_id) != DefectStatus::Disputed) {
    throw Error(ErrorCode::NotDisputed, std::string(defect_id));
  }
  resolutions_[idx] = std::move(final_label);
}

bool AnnotationSession::disputed_on(std::string_view defect_id,
                                    AgreementAttribute attribute) const {
  const auto idx = require_defect(defect_id);
  const auto& slot = labels_[idx];
  const auto a = slot.find(primary_a());
  const auto b = slot.find(primary_b());
  if (a == slot.end() || b == slot.end()) return false;
  return category_of(a->second, attribute) != category_of(b->second, attribute);
}

DefectStatus AnnotationSession::status(std::string_view defect_id) const {
  const auto idx = require_defect(defect_id);
  if (resolutions_[idx]) return DefectStatus::Resolved;
  const auto& slot = labels_[idx];
  if (!slot.count(primary_a()) || !slot.count(primary_b())) return DefectStatus::Pending;
  if (disputed_on(defect_id, AgreementAttribute::AI) ||
      disputed_on(defect_id, AgreementAttribute::Severity)) {
    return DefectStatus::Disputed;
  }
  return DefectStatus::Labeled;
}

const ClassificationLabel* AnnotationSession::label(std::string_view defect_id,
                                                    std::string_view annotator) const {
  const auto it = index_.find(defect_id);
  if (it == index_.end()) return nullptr;
  const auto& slot = labels_[it->second];
  const auto l = slot.find(annotator);
  return l == slot.end() ? nullptr : &l->second;
}

const ClassificationLabel* AnnotationSession::resolution(std::string_view defect_id) const {
  const auto it = index_.find(defect_id);
  if (it == index_.end() || !resolutions_[it->second]) return nullptr;
  return &*resolutions_[it->second];
}

std::size_t AnnotationSession::label_count() const {
  std::size_t n = 0;
  for (const auto& slot : labels_) n += slot.size();
  return n;
}

std::map<DefectStatus, std::size_t> AnnotationSession::status_counts() const {
  std::map<DefectStatus, std::size_t> counts{{DefectStatus::Pending, 0},
                                             {DefectStatus::Labeled, 0},
                                             {DefectStatus::Disputed, 0},
                                             {DefectStatus::Resolved, 0}};
  for (const auto& id : defects_) ++counts[status(id)];
  return counts;
}

AnnotationSession open_session(std::string project, std::vector<std::string> defects,
                               std::vector<std::string> annotators) {
  return AnnotationSession(std::move(project), std::move(defects), std::move(annotators));
}

std::vector<Dispute> list_disputes(const AnnotationSession& session,
                                   AgreementAttribute attribute) {
  std::vector<Dispute> out;
  for (const auto& id : session.defects()) {
    if (session.status(id) != DefectStatus::Disputed) continue;
    if (!session.disputed_on(id, attribute)) continue;
    out.push_back({id, *session.label(id, session.primary_a()),
                   *session.label(id, session.primary_b())});
  }
  std::sort(out.begin(), out.end(),
            [](const Dispute& x, const Dispute& y) { return x.defect_id < y.defect_id; });
  return out;
}

std::vector<ImpactPath> impact_disagreement(const AnnotationSession& session,
                                            std::string_view defect_id) {
  const auto* a = session.label(defect_id, session.primary_a());
  const auto* b = session.label(defect_id, session.primary_b());
  if (!a || !b) return {};
  std::set<ImpactPath> sa(a->impacts.begin(), a->impacts.end());
  std::set<ImpactPath> sb(b->impacts.begin(), b->impacts.end());
  std::vector<ImpactPath> out;
  std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                std::back_inserter(out));
  return out;
}

AgreementResult cohen_kappa(std::span<const std::string> rater_a,
                            std::span<const std::string> rater_b,
                            AgreementAttribute attribute) {
  if (rater_a.size() != rater_b.size()) {
    throw Error(ErrorCode::ParseError, "rating vectors differ in length");
  }
  AgreementResult r;
  r.attribute = attribute;
  r.n = rater_a.size();
  if (r.n == 0) throw Error(ErrorCode::NoOverlap, "no doubly-labeled defects");

  std::map<std::string_view, std::size_t> marg_a, marg_b;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < r.n; ++i) {
    ++marg_a[rater_a[i]];
    ++marg_b[rater_b[i]];
    if (rater_a[i] == rater_b[i]) ++agree;
  }
  const double n = static_cast<double>(r.n);
  r.observed = static_cast<double>(agree) / n;
  double pe = 0.0;
  for (const auto& [cat, count] : marg_a) {
    const auto it = marg_b.find(cat);
    if (it != marg_b.end()) {
      pe += (static_cast<double>(count) / n) * (static_cast<double>(it->second) / n);
    }
  }
  r.expected = pe;
  if (pe >= 1.0 - 1e-12) {
    throw Error(ErrorCode::DegenerateMarginals, "chance agreement is 1; kappa undefined");
  }
  r.kappa = (r.observed - pe) / (1.0 - pe);
  return r;
}

AgreementResult cohen_kappa(const AnnotationSession& session, AgreementAttribute attribute) {
  std::vector<std::string> a, b;
  for (const auto& id : session.defects()) {
    const auto* la = session.label(id, session.primary_a());
    const auto* lb = session.label(id, session.primary_b());
    if (!la || !lb) continue;
    if (attribute == AgreementAttribute::Severity && (!la->severity || !lb->severity)) continue;
    a.push_back(category_of(*la, attribute));
    b.push_back(category_of(*lb, attribute));
  }
  return cohen_kappa(a, b, attribute);
}

std::vector<ClassificationLabel> consolidatable_labels(const AnnotationSession& session) {
  std::vector<ClassificationLabel> out;
  for (const auto& id : session.defects()) {
    switch (session.status(id)) {
      case DefectStatus::Resolved: out.push_back(*session.resolution(id)); break;
      case DefectStatus::Labeled:
        out.push_back(agreed_label(*session.label(id, session.primary_a()),
                                   *session.label(id, session.primary_b())));
        break;
      default: break;
    }
  }
  return out;
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

}  // namespace

UnresolvedDisputesError::UnresolvedDisputesError(std::vector<std::string> ids)
    : Error(ErrorCode::UnresolvedDisputes, join_ids(ids)), ids_(std::move(ids)) {}

std::vector<ClassificationLabel> consolidate(const AnnotationSession& session) {
  std::vector<std::string> blocked;
  for (const auto& id : session.defects()) {
    const auto s = session.status(id);
    if (s == DefectStatus::Pending || s == DefectStatus::Disputed) blocked.push_back(id);
  }
  if (!blocked.empty()) throw UnresolvedDisputesError(std::move(blocked));
  return consolidatable_labels(session);
}

}  // namespace aiodc
