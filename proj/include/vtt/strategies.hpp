#ifndef VTT_STRATEGIES_HPP
#define VTT_STRATEGIES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vtt/mue.hpp"
#include "vtt/performance_model.hpp"
#include "vtt/question_pool.hpp"
#include "vtt/rng.hpp"

namespace vtt {

// The four questioning strategies. `combined` stacks the unpredictability
// filter on top of the uncertainty candidates.
enum class StrategyKind { random, unpredictability, uncertainty, combined };

const char* strategy_name(StrategyKind kind);
std::optional<StrategyKind> strategy_from_name(std::string_view name);
inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::random, StrategyKind::unpredictability,
    StrategyKind::uncertainty, StrategyKind::combined};

struct SessionConfig {
  StrategyKind strategy = StrategyKind::uncertainty;
  // Question budget; unset means ask until the pool is exhausted.
  std::optional<std::size_t> max_questions;
  // Stop once total uncertainty drops to this level.
  std::optional<double> uncertainty_stop;
  double epsilon = 0.15;  // unpredictability window half-width, in (0, 0.5)
  gp::KernelParams kernel;
  gp::BandMode band_mode = gp::BandMode::two_std;
  bool frequency_mode = false;
  std::uint64_t seed = 0;

  void validate() const;
  ModelConfig model_config() const { return {kernel, band_mode, frequency_mode}; }
};

// Laplace-smoothed Yes-frequency of history answers sharing the question's
// (concept, gt): (n_yes + 1) / (n + 2), where Yes means prob >= 0.5. An
// empty history gives 0.5 for everything.
double predictability(const Question& q, std::span<const AnswerRecord> history);

// Incremental form of the same estimate, so the session loop does not
// rescan its history per step.
class PredictabilityTable {
 public:
  explicit PredictabilityTable(int n_concepts);
  void observe(const AnswerRecord& record);
  double yes_probability(int concept_id, int gt) const;

 private:
  struct Counts {
    std::uint64_t yes = 0;
    std::uint64_t n = 0;
  };
  std::vector<std::array<Counts, 2>> counts_;
};

// Draws the next question. Returns nullopt when the pool is exhausted.
//   random:           uniform over the remaining pool.
//   unpredictability: uniform over remaining q with |p_yes - 0.5| < epsilon;
//                     if none qualify, over the q minimizing |p_yes - 0.5|.
//   uncertainty:      uniform over candidate_set.
//   combined:         uniform over candidate_set members passing the
//                     unpredictability filter; whole candidate set if none.
std::optional<Question> select_question(StrategyKind strategy,
                                        const QuestionPool& pool,
                                        const PredictabilityTable& table,
                                        std::span<const gp::UncertaintySplit> splits,
                                        double epsilon, Rng& rng);

// History-scanning overload matching the free predictability estimator.
std::optional<Question> select_question(StrategyKind strategy,
                                        const QuestionPool& pool,
                                        std::span<const AnswerRecord> history,
                                        std::span<const gp::UncertaintySplit> splits,
                                        double epsilon, Rng& rng);

// Per-concept uncertainty after one step, plus the session total.
struct StepUncertainty {
  double total = 0.0;
  std::vector<gp::UncertaintySplit> per_concept;
};

struct SessionLog {
  SessionConfig config;
  std::vector<AnswerRecord> records;       // the history H, in asked order
  std::vector<StepUncertainty> trace;      // one entry per record
  std::vector<ConceptModel> models;        // final per-concept state
  bool incomplete = false;                 // MuE adapter failed mid-session
  std::string abort_reason;

  double final_uncertainty() const;
};

// The session loop: select, ask, record, refresh the answered concept's
// posterior, remove the question. Stops on the uncertainty threshold first,
// then the question budget, then pool exhaustion. An adapter failure aborts
// with the partial log flagged incomplete.
SessionLog run_session(const SessionConfig& config, const Dataset& dataset,
                       MuE& mue);

}  // namespace vtt

#endif  // VTT_STRATEGIES_HPP
