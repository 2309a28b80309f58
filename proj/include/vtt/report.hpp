#ifndef VTT_REPORT_HPP
#define VTT_REPORT_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vtt/mue.hpp"
#include "vtt/strategies.hpp"

namespace vtt {

// Answer source for a run or experiment, resolved per session.
struct MatrixMueConfig {
  std::filesystem::path path;
};
struct SubprocessMueConfig {
  std::string command;
  std::chrono::milliseconds timeout = std::chrono::seconds(10);
};
using MueConfig = std::variant<SyntheticMuESpec, MatrixMueConfig, SubprocessMueConfig>;

// Builds the adapter for one session. Synthetic oracles get their stream
// reseeded from `session_seed` so concurrent sessions never share state;
// matrix and subprocess sources ignore the seed.
std::unique_ptr<MuE> make_mue(const MueConfig& config, const Dataset& dataset,
                              std::uint64_t session_seed);

// Session log rows: step,sample_id,concept_id,gt,prob,a,outcome,u_total_after.
void write_session_csv(std::ostream& out, const SessionLog& log, const Dataset& dataset);
void write_session_csv(const std::filesystem::path& path, const SessionLog& log,
                       const Dataset& dataset);

// One parsed session CSV row; names are kept verbatim.
struct SessionRow {
  int step = 0;
  std::string sample_name;
  std::string concept_name;
  int gt = 0;
  double prob = 0.0;
  double a = 0.0;
  Outcome outcome = Outcome::TN;
  double u_total_after = 0.0;
};

std::vector<SessionRow> read_session_csv(const std::filesystem::path& path);

// Rebuilds per-concept models from logged rows. `concept_names` fixes the
// concept universe (and order); pass the dataset's names to recover models
// for concepts that were never asked.
std::vector<ConceptModel> replay_models(std::span<const SessionRow> rows,
                                        std::span<const std::string> concept_names,
                                        const ModelConfig& config);

// GP curve file: a,mean,lower,upper,count with lower/upper = mean -/+ 2 std.
void emit_gp_curve(const ConceptModel& model, const std::filesystem::path& csv_path);
// Same data as a small self-contained SVG (band, mean line, observations).
void emit_gp_curve_svg(const ConceptModel& model, const std::filesystem::path& svg_path,
                       const std::string& title);

// Per-concept roll-up after a session: questions asked, band areas and
// confusion counts. Columns:
// concept_id,questions,u_neg,u_pos,tn,fp,fn,tp.
void emit_concept_comparison(std::span<const ConceptModel> models,
                             std::span<const std::string> concept_names,
                             const std::filesystem::path& path);

struct ExperimentSpec {
  std::variant<std::filesystem::path, SyntheticDatasetSpec> dataset;
  MueConfig mue;
  std::vector<StrategyKind> strategies = {kAllStrategies[0], kAllStrategies[1],
                                          kAllStrategies[2], kAllStrategies[3]};
  int repeats = 10;
  // Question counts at which uncertainty is sampled; empty means every 10
  // questions plus the final step.
  std::vector<std::size_t> checkpoints;
  SessionConfig session;  // template; strategy and seed are set per session
  std::filesystem::path out_dir;

  void validate() const;
};

// Aggregate row: mean and sample-std of total uncertainty over repeats at
// one checkpoint, plus the same averaged per concept.
struct AggregateRow {
  StrategyKind strategy;
  std::size_t checkpoint = 0;
  double mean_u_total = 0.0;
  double std_u_total = 0.0;
  double mean_u_per_concept = 0.0;
  double std_u_per_concept = 0.0;
};

struct ExperimentReport {
  std::vector<std::filesystem::path> session_files;
  std::filesystem::path aggregate_file;
  std::vector<AggregateRow> aggregate;
};

// Runs strategies x repeats sessions (fanned out across threads), writes one
// CSV per session plus the aggregate uncertainty table. Per-session seeds
// derive from (spec.session.seed, strategy index, repeat), so results do not
// depend on scheduling.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Checkpoint list for a given session length under the default rule.
std::vector<std::size_t> default_checkpoints(std::size_t total_questions);

}  // namespace vtt

#endif  // VTT_REPORT_HPP
