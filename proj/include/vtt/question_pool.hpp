#ifndef VTT_QUESTION_POOL_HPP
#define VTT_QUESTION_POOL_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vtt/gp.hpp"
#include "vtt/question.hpp"

namespace vtt {

// A labeled validation pool: N_S samples, N_C binary concepts, one ground
// truth bit per (sample, concept) pair.
struct Dataset {
  std::vector<std::string> sample_names;
  std::vector<std::string> concept_names;
  std::vector<std::uint8_t> labels;  // row-major [sample][concept]

  int n_samples() const { return static_cast<int>(sample_names.size()); }
  int n_concepts() const { return static_cast<int>(concept_names.size()); }

  int label(int sample, int concept_id) const {
    return labels[static_cast<std::size_t>(sample) * concept_names.size() +
                  static_cast<std::size_t>(concept_id)];
  }

  // Number of positive labels for one concept.
  std::uint64_t positives(int concept_id) const;
};

// CSV with header "sample_id,<concept>,..." and {0,1} cells. Malformed
// input (non-binary cell, short row, duplicate sample id) raises
// csv::FormatError naming the offending line.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

struct SyntheticDatasetSpec {
  int n_samples = 0;
  int n_concepts = 0;
  // Per-concept probability of a positive label; empty means 0.5 for all.
  std::vector<double> prevalence;
  std::uint64_t seed = 0;
};

Dataset generate_dataset(const SyntheticDatasetSpec& spec);

// The remaining questions of a session, bucketed by (concept, gt) so that
// candidate lookup is O(1). Starts as the full cross product D x C and
// shrinks by exactly one per asked question.
class QuestionPool {
 public:
  explicit QuestionPool(const Dataset& dataset);

  std::size_t remaining() const { return remaining_; }
  bool empty() const { return remaining_ == 0; }
  int n_concepts() const { return static_cast<int>(buckets_.size()); }

  const std::vector<Question>& bucket(int concept_id, int gt) const {
    return buckets_[static_cast<std::size_t>(concept_id)][static_cast<std::size_t>(gt)];
  }

  // Throws std::invalid_argument if the question is not in the pool.
  void remove(const Question& q);

  // Snapshot of every remaining question; for tests and brute-force checks.
  std::vector<Question> all_remaining() const;

 private:
  std::vector<std::array<std::vector<Question>, 2>> buckets_;
  std::size_t remaining_ = 0;
};

// The questions eligible under the uncertainty rule: take the concepts
// whose max(u_neg, u_pos) is maximal (ties within 1e-12 all included) and
// keep the remaining questions whose gt matches the dominating side (0 when
// the negative half dominates, 1 otherwise; an exact tie counts as 0).
//
// Fallback chain when that bucket group is empty: the same concepts' other
// gt, then the next concepts by descending max(u_neg, u_pos). An empty
// result means the pool is exhausted.
std::vector<Question> candidate_set(const QuestionPool& pool,
                                    std::span<const gp::UncertaintySplit> splits);

}  // namespace vtt

#endif  // VTT_QUESTION_POOL_HPP
