#ifndef VTT_PERFORMANCE_MODEL_HPP
#define VTT_PERFORMANCE_MODEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vtt/gp.hpp"
#include "vtt/question.hpp"

namespace vtt {

// Answer axis resolution: bins of width 0.01, centers at 0.00 .. 1.00.
inline constexpr double kBinWidth = 0.01;
inline constexpr int kBinCount = 101;

// a = (prob + gt) / 2. Answers to negative questions land in [0, 0.5],
// answers to positive ones in [0.5, 1].
double encode_answer(double prob, int gt);

// Nearest bin center, clamped to [0, 100]. a must be in [0, 1].
int bin_index(double a);
double bin_center(int index);

// The four subregions of the answer axis. Boundary convention: a prediction
// counts as "Yes" iff prob >= 0.5, which puts a = 0.25 and a = 0.5 in FP
// and a = 0.75 in TP.
enum class Outcome { TN, FP, FN, TP };
Outcome classify_outcome(double a);
const char* outcome_name(Outcome outcome);
std::optional<Outcome> outcome_from_name(std::string_view name);

// One asked question with the MuE's reply, as kept in the session history.
struct AnswerRecord {
  Question question;
  double prob = 0.0;  // MuE output f(q)
  double a = 0.0;     // encoded answer
  int step = 0;       // 1-based ordinal within the session
};

struct ConfusionCounts {
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tp = 0;

  std::uint64_t total() const { return tn + fp + fn + tp; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Tallies outcomes over a history. Records are classified by their bin
// center, not the raw a, so the tally always equals the subregion-wise
// bin-count sums of the concept models built from the same history.
ConfusionCounts confusion_counts(std::span<const AnswerRecord> records);

// Knobs shared by every concept model in a session.
struct ModelConfig {
  gp::KernelParams kernel;
  gp::BandMode band_mode = gp::BandMode::two_std;
  // When set, observation values are count / total answers for the concept
  // instead of raw counts.
  bool frequency_mode = false;
};

// Per-concept observation ledger: binned answer counts plus lazily cached
// GP posterior and band integrals. Single writer per concept; distinct
// concepts may be updated concurrently.
class ConceptModel {
 public:
  explicit ConceptModel(int concept_id, ModelConfig config = {});

  int concept_id() const { return concept_id_; }
  const ModelConfig& config() const { return config_; }

  // Bins the encoded answer, bumps its count and invalidates the caches.
  // Throws std::invalid_argument on concept mismatch or prob outside [0,1].
  AnswerRecord record(const Question& q, double prob, int step);

  std::uint64_t total_answers() const { return total_; }
  const std::array<std::uint64_t, kBinCount>& bin_counts() const { return bins_; }

  // Occupied bins only, in grid order.
  std::vector<gp::Observation> observations() const;

  // Posterior / band integrals over the 101-point grid, cached until the
  // next record(). Lazy fill; share a warm snapshot across threads only.
  const gp::PosteriorCurve& curve() const;
  const gp::UncertaintySplit& split() const;

  // Subregion-wise bin-count sums (bins bucketed by their center's class).
  ConfusionCounts region_counts() const;

  static const std::vector<double>& answer_grid();

 private:
  int concept_id_;
  ModelConfig config_;
  std::array<std::uint64_t, kBinCount> bins_{};
  std::uint64_t total_ = 0;
  mutable std::optional<gp::PosteriorCurve> cached_curve_;
  mutable std::optional<gp::UncertaintySplit> cached_split_;
};

}  // namespace vtt

#endif  // VTT_PERFORMANCE_MODEL_HPP
