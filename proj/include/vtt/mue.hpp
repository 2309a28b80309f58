#ifndef VTT_MUE_HPP
#define VTT_MUE_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vtt/question.hpp"
#include "vtt/question_pool.hpp"
#include "vtt/rng.hpp"

namespace vtt {

// Raised when an answer source misbehaves (bad reply, timeout, missing
// entry). Sessions abort on it and flag their log incomplete.
class AdapterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The method under evaluation: maps a question to its Yes-probability.
class MuE {
 public:
  virtual ~MuE() = default;
  virtual double answer(const Question& q) = 0;
};

// Concept with the largest number of positive labels; ties break to the
// lowest concept index.
int most_common_concept(const Dataset& dataset);

// How a synthetic oracle turns its internal correct/incorrect coin into a
// continuous probability on the matching half of [0, 1].
//   uniform_half: uniform over (0.5, 1] for Yes, [0, 0.5) for No.
//   fixed:        always `value` for Yes and 1 - value for No; value in
//                 (0.5, 1], so fixed(1.0) reproduces hard 1/0 answers.
//   beta_folded:  x ~ Beta(alpha, beta) folded onto the half, larger x
//                 meaning higher confidence.
enum class ConfidenceKind { uniform_half, fixed, beta_folded };

struct ConfidenceDistribution {
  ConfidenceKind kind = ConfidenceKind::uniform_half;
  double value = 1.0;  // fixed only
  double alpha = 2.0;  // beta_folded only
  double beta = 2.0;

  void validate() const;
};

// A fully understood oracle: per-concept accuracy plus a confidence draw.
struct SyntheticMuESpec {
  std::vector<double> accuracy_by_concept;  // each in (0, 1]
  ConfidenceDistribution confidence;
  std::uint64_t seed = 0;

  void validate() const;

  // Same accuracy for every concept.
  static SyntheticMuESpec uniform(double accuracy, int n_concepts,
                                  std::uint64_t seed);
  // `common_accuracy` on the most common concept, `other_accuracy` elsewhere.
  static SyntheticMuESpec biased(const Dataset& dataset, double common_accuracy,
                                 double other_accuracy, std::uint64_t seed);
};

// One synthetic reply: decide correctness with the concept's accuracy, then
// draw a probability from the half consistent with (correctness, gt).
double synthetic_answer(const SyntheticMuESpec& spec, const Question& q, Rng& rng);

class SyntheticMuE : public MuE {
 public:
  explicit SyntheticMuE(SyntheticMuESpec spec);
  double answer(const Question& q) override;
  const SyntheticMuESpec& spec() const { return spec_; }

 private:
  SyntheticMuESpec spec_;
  Rng rng_;
};

// Pre-scored answers keyed by (sample id, concept id) names; the adapter
// for external classifiers whose outputs were computed offline.
struct ProbabilityMatrix {
  std::vector<std::string> sample_names;
  std::vector<std::string> concept_names;
  std::vector<double> prob;  // row-major [sample][concept]
};

// Same CSV layout as a dataset, with decimals in [0, 1] for cells.
ProbabilityMatrix load_probability_matrix(const std::filesystem::path& path);

// Deterministic lookup; a missing pair raises AdapterError naming it.
double matrix_answer(const ProbabilityMatrix& matrix, const std::string& sample_name,
                     const std::string& concept_name);

class MatrixMuE : public MuE {
 public:
  MatrixMuE(ProbabilityMatrix matrix, const Dataset& dataset);
  double answer(const Question& q) override;

 private:
  ProbabilityMatrix matrix_;
  const Dataset& dataset_;
  std::unordered_map<std::string, std::size_t> sample_index_;
  std::unordered_map<std::string, std::size_t> concept_index_;
};

// Line-protocol bridge to a child process: one request
// "sample_id,concept_id\n" per question, one decimal reply per line.
// Requests are serialized (one in flight). Timeouts, malformed replies and
// out-of-range values raise AdapterError.
class SubprocessMuE : public MuE {
 public:
  SubprocessMuE(const std::string& command, const Dataset& dataset,
                std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~SubprocessMuE() override;

  SubprocessMuE(const SubprocessMuE&) = delete;
  SubprocessMuE& operator=(const SubprocessMuE&) = delete;

  double answer(const Question& q) override;

 private:
  std::string read_reply_line();

  const Dataset& dataset_;
  std::chrono::milliseconds timeout_;
  std::mutex io_mutex_;
  std::string buffer_;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

}  // namespace vtt

#endif  // VTT_MUE_HPP
