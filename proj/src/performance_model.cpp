#include "vtt/performance_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vtt {

double encode_answer(double prob, int gt) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("answer probability outside [0, 1]: " +
                                std::to_string(prob));
  }
  if (gt != 0 && gt != 1) {
    throw std::invalid_argument("ground truth must be 0 or 1");
  }
  return (prob + static_cast<double>(gt)) / 2.0;
}

int bin_index(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::invalid_argument("encoded answer outside [0, 1]: " + std::to_string(a));
  }
  const int idx = static_cast<int>(std::llround(a / kBinWidth));
  return idx < 0 ? 0 : (idx >= kBinCount ? kBinCount - 1 : idx);
}

double bin_center(int index) { return static_cast<double>(index) * kBinWidth; }

Outcome classify_outcome(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::invalid_argument("encoded answer outside [0, 1]");
  }
  if (a < 0.25) return Outcome::TN;
  if (a <= 0.5) return Outcome::FP;
  if (a < 0.75) return Outcome::FN;
  return Outcome::TP;
}

const char* outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::TN: return "TN";
    case Outcome::FP: return "FP";
    case Outcome::FN: return "FN";
    case Outcome::TP: return "TP";
  }
  return "??";
}

std::optional<Outcome> outcome_from_name(std::string_view name) {
  if (name == "TN") return Outcome::TN;
  if (name == "FP") return Outcome::FP;
  if (name == "FN") return Outcome::FN;
  if (name == "TP") return Outcome::TP;
  return std::nullopt;
}

ConfusionCounts confusion_counts(std::span<const AnswerRecord> records) {
  ConfusionCounts counts;
  for (const auto& rec : records) {
    switch (classify_outcome(bin_center(bin_index(rec.a)))) {
      case Outcome::TN: ++counts.tn; break;
      case Outcome::FP: ++counts.fp; break;
      case Outcome::FN: ++counts.fn; break;
      case Outcome::TP: ++counts.tp; break;
    }
  }
  return counts;
}

ConceptModel::ConceptModel(int concept_id, ModelConfig config)
    : concept_id_(concept_id), config_(config) {
  config_.kernel.validate();
}

AnswerRecord ConceptModel::record(const Question& q, double prob, int step) {
  if (q.concept_id != concept_id_) {
    throw std::invalid_argument("question concept " + std::to_string(q.concept_id) +
                                " recorded against model for concept " +
                                std::to_string(concept_id_));
  }
  AnswerRecord rec;
  rec.question = q;
  rec.prob = prob;
  rec.a = encode_answer(prob, q.gt);
  rec.step = step;

  ++bins_[static_cast<std::size_t>(bin_index(rec.a))];
  ++total_;
  cached_curve_.reset();
  cached_split_.reset();
  return rec;
}

std::vector<gp::Observation> ConceptModel::observations() const {
  std::vector<gp::Observation> obs;
  for (int i = 0; i < kBinCount; ++i) {
    const std::uint64_t count = bins_[static_cast<std::size_t>(i)];
    if (count == 0) continue;
    double value = static_cast<double>(count);
    if (config_.frequency_mode) value /= static_cast<double>(total_);
    obs.push_back({bin_center(i), value});
  }
  return obs;
}

const gp::PosteriorCurve& ConceptModel::curve() const {
  if (!cached_curve_) {
    const auto obs = observations();
    cached_curve_ = gp::posterior(obs, answer_grid(), config_.kernel);
  }
  return *cached_curve_;
}

const gp::UncertaintySplit& ConceptModel::split() const {
  if (!cached_split_) {
    cached_split_ = gp::band_integrals(curve(), config_.band_mode);
  }
  return *cached_split_;
}

ConfusionCounts ConceptModel::region_counts() const {
  ConfusionCounts counts;
  for (int i = 0; i < kBinCount; ++i) {
    const std::uint64_t c = bins_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    switch (classify_outcome(bin_center(i))) {
      case Outcome::TN: counts.tn += c; break;
      case Outcome::FP: counts.fp += c; break;
      case Outcome::FN: counts.fn += c; break;
      case Outcome::TP: counts.tp += c; break;
    }
  }
  return counts;
}

const std::vector<double>& ConceptModel::answer_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g(kBinCount);
    for (int i = 0; i < kBinCount; ++i) g[static_cast<std::size_t>(i)] = bin_center(i);
    return g;
  }();
  return grid;
}

}  // namespace vtt
