#include "vtt/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtt {

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::random: return "random";
    case StrategyKind::unpredictability: return "unpredictability";
    case StrategyKind::uncertainty: return "uncertainty";
    case StrategyKind::combined: return "combined";
  }
  return "??";
}

std::optional<StrategyKind> strategy_from_name(std::string_view name) {
  for (StrategyKind kind : kAllStrategies) {
    if (name == strategy_name(kind)) return kind;
  }
  return std::nullopt;
}

void SessionConfig::validate() const {
  if (max_questions && *max_questions < 1) {
    throw std::invalid_argument("question budget must be at least 1");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  }
  kernel.validate();
}

double predictability(const Question& q, std::span<const AnswerRecord> history) {
  std::uint64_t yes = 0;
  std::uint64_t n = 0;
  for (const auto& rec : history) {
    if (rec.question.concept_id != q.concept_id || rec.question.gt != q.gt) continue;
    ++n;
    if (rec.prob >= 0.5) ++yes;
  }
  return static_cast<double>(yes + 1) / static_cast<double>(n + 2);
}

PredictabilityTable::PredictabilityTable(int n_concepts)
    : counts_(static_cast<std::size_t>(n_concepts)) {}

void PredictabilityTable::observe(const AnswerRecord& record) {
  auto& c = counts_[static_cast<std::size_t>(record.question.concept_id)]
                   [static_cast<std::size_t>(record.question.gt)];
  ++c.n;
  if (record.prob >= 0.5) ++c.yes;
}

double PredictabilityTable::yes_probability(int concept_id, int gt) const {
  const auto& c = counts_[static_cast<std::size_t>(concept_id)][static_cast<std::size_t>(gt)];
  return static_cast<double>(c.yes + 1) / static_cast<double>(c.n + 2);
}

namespace {

// Uniform draw over the concatenation of buckets, without materializing it.
std::optional<Question> draw_from_buckets(
    const QuestionPool& pool, std::span<const std::pair<int, int>> buckets, Rng& rng) {
  std::size_t total = 0;
  for (const auto& [c, gt] : buckets) total += pool.bucket(c, gt).size();
  if (total == 0) return std::nullopt;
  std::size_t r = rng.index(total);
  for (const auto& [c, gt] : buckets) {
    const auto& bucket = pool.bucket(c, gt);
    if (r < bucket.size()) return bucket[r];
    r -= bucket.size();
  }
  return std::nullopt;  // unreachable
}

std::optional<Question> draw_unpredictable(const QuestionPool& pool,
                                           const PredictabilityTable& table,
                                           double epsilon, Rng& rng) {
  // The estimate is constant per (concept, gt), so the question-level
  // filter reduces to a bucket-level one.
  std::vector<std::pair<int, int>> window;
  std::vector<std::pair<int, int>> closest;
  double best = 2.0;
  for (int c = 0; c < pool.n_concepts(); ++c) {
    for (int gt = 0; gt < 2; ++gt) {
      if (pool.bucket(c, gt).empty()) continue;
      const double distance = std::abs(table.yes_probability(c, gt) - 0.5);
      if (distance < epsilon) window.emplace_back(c, gt);
      if (distance < best - 1e-12) {
        best = distance;
        closest.clear();
        closest.emplace_back(c, gt);
      } else if (distance <= best + 1e-12) {
        closest.emplace_back(c, gt);
      }
    }
  }
  if (!window.empty()) return draw_from_buckets(pool, window, rng);
  return draw_from_buckets(pool, closest, rng);
}

}  // namespace

std::optional<Question> select_question(StrategyKind strategy,
                                        const QuestionPool& pool,
                                        const PredictabilityTable& table,
                                        std::span<const gp::UncertaintySplit> splits,
                                        double epsilon, Rng& rng) {
  if (pool.empty()) return std::nullopt;

  switch (strategy) {
    case StrategyKind::random: {
      std::vector<std::pair<int, int>> all;
      all.reserve(static_cast<std::size_t>(pool.n_concepts()) * 2);
      for (int c = 0; c < pool.n_concepts(); ++c) {
        all.emplace_back(c, 0);
        all.emplace_back(c, 1);
      }
      return draw_from_buckets(pool, all, rng);
    }
    case StrategyKind::unpredictability:
      return draw_unpredictable(pool, table, epsilon, rng);
    case StrategyKind::uncertainty: {
      const auto candidates = candidate_set(pool, splits);
      if (candidates.empty()) return std::nullopt;
      return candidates[rng.index(candidates.size())];
    }
    case StrategyKind::combined: {
      const auto candidates = candidate_set(pool, splits);
      if (candidates.empty()) return std::nullopt;
      std::vector<Question> filtered;
      for (const auto& q : candidates) {
        if (std::abs(table.yes_probability(q.concept_id, q.gt) - 0.5) < epsilon) {
          filtered.push_back(q);
        }
      }
      const auto& source = filtered.empty() ? candidates : filtered;
      return source[rng.index(source.size())];
    }
  }
  throw std::invalid_argument("unknown strategy");
}

std::optional<Question> select_question(StrategyKind strategy,
                                        const QuestionPool& pool,
                                        std::span<const AnswerRecord> history,
                                        std::span<const gp::UncertaintySplit> splits,
                                        double epsilon, Rng& rng) {
  PredictabilityTable table(pool.n_concepts());
  for (const auto& rec : history) table.observe(rec);
  return select_question(strategy, pool, table, splits, epsilon, rng);
}

double SessionLog::final_uncertainty() const {
  if (!trace.empty()) return trace.back().total;
  // No questions asked: every concept still sits at its prior.
  double total = 0.0;
  for (const auto& model : models) total += model.split().total();
  return total;
}

SessionLog run_session(const SessionConfig& config, const Dataset& dataset, MuE& mue) {
  config.validate();
  const int n_concepts = dataset.n_concepts();

  SessionLog log;
  log.config = config;

  QuestionPool pool(dataset);
  const std::size_t budget = config.max_questions
                                 ? std::min(*config.max_questions, pool.remaining())
                                 : pool.remaining();

  std::vector<ConceptModel> models;
  models.reserve(static_cast<std::size_t>(n_concepts));
  for (int c = 0; c < n_concepts; ++c) models.emplace_back(c, config.model_config());

  // All concepts start at the same prior band; compute it once.
  std::vector<gp::UncertaintySplit> splits(static_cast<std::size_t>(n_concepts),
                                           models.front().split());
  double u_total = 0.0;
  for (const auto& s : splits) u_total += s.total();

  PredictabilityTable table(n_concepts);
  Rng rng(config.seed);
  log.records.reserve(budget);
  log.trace.reserve(budget);

  while (log.records.size() < budget) {
    const auto next = select_question(config.strategy, pool, table, splits,
                                      config.epsilon, rng);
    if (!next) break;  // pool exhausted

    double prob;
    try {
      prob = mue.answer(*next);
      if (!(prob >= 0.0 && prob <= 1.0)) {
        throw AdapterError("MuE answer outside [0, 1]: " + std::to_string(prob));
      }
    } catch (const std::exception& e) {
      log.incomplete = true;
      log.abort_reason = e.what();
      break;
    }

    auto& model = models[static_cast<std::size_t>(next->concept_id)];
    const AnswerRecord rec =
        model.record(*next, prob, static_cast<int>(log.records.size()) + 1);

    // Concepts are independent: only the answered one is refreshed.
    const auto& split = model.split();
    u_total += split.total() - splits[static_cast<std::size_t>(next->concept_id)].total();
    splits[static_cast<std::size_t>(next->concept_id)] = split;

    table.observe(rec);
    log.records.push_back(rec);
    log.trace.push_back({u_total, splits});
    pool.remove(*next);

    if (config.uncertainty_stop && u_total <= *config.uncertainty_stop) break;
  }

  log.models = std::move(models);
  return log;
}

}  // namespace vtt
