// Command-line front end: single sessions, repeated experiments, synthetic
// pool generation and session replay.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vtt/csv.hpp"
#include "vtt/report.hpp"
#include "vtt/strategies.hpp"

namespace fs = std::filesystem;
using namespace vtt;

namespace {

struct SessionFlags {
  std::string strategy = "uncertainty";
  std::size_t max_questions = 0;  // 0 = ask everything
  double uncertainty_stop = -1.0;
  double epsilon = 0.15;
  double length_scale = 0.1;
  double signal_variance = 1.0;
  double noise_variance = 0.025;
  std::string band_mode = "std";
  bool frequency_mode = false;
  std::uint64_t seed = 0;
};

void add_session_flags(CLI::App* cmd, SessionFlags& flags, bool with_strategy) {
  if (with_strategy) {
    cmd->add_option("--strategy", flags.strategy,
                    "random | unpredictability | uncertainty | combined")
        ->capture_default_str();
  }
  cmd->add_option("--max-questions", flags.max_questions,
                  "question budget; 0 asks the whole pool")
      ->capture_default_str();
  cmd->add_option("--uncertainty-stop", flags.uncertainty_stop,
                  "stop once total uncertainty drops to this level");
  cmd->add_option("--epsilon", flags.epsilon, "unpredictability window half-width")
      ->capture_default_str();
  cmd->add_option("--length-scale", flags.length_scale, "kernel length scale")
      ->capture_default_str();
  cmd->add_option("--signal-variance", flags.signal_variance, "kernel signal variance")
      ->capture_default_str();
  cmd->add_option("--noise-variance", flags.noise_variance, "kernel noise variance")
      ->capture_default_str();
  cmd->add_option("--band-mode", flags.band_mode,
                  "band integrand: std (2-sigma band) or variance")
      ->capture_default_str();
  cmd->add_flag("--frequency-mode", flags.frequency_mode,
                "feed bin frequencies instead of counts to the GP");
  cmd->add_option("--seed", flags.seed, "session RNG seed")->capture_default_str();
}

SessionConfig to_config(const SessionFlags& flags) {
  SessionConfig config;
  const auto strategy = strategy_from_name(flags.strategy);
  if (!strategy) {
    throw CLI::ValidationError("--strategy", "unknown strategy '" + flags.strategy + "'");
  }
  config.strategy = *strategy;
  if (flags.max_questions > 0) config.max_questions = flags.max_questions;
  if (flags.uncertainty_stop >= 0.0) config.uncertainty_stop = flags.uncertainty_stop;
  config.epsilon = flags.epsilon;
  config.kernel = {flags.length_scale, flags.signal_variance, flags.noise_variance};
  if (flags.band_mode == "std") {
    config.band_mode = gp::BandMode::two_std;
  } else if (flags.band_mode == "variance") {
    config.band_mode = gp::BandMode::raw_variance;
  } else {
    throw CLI::ValidationError("--band-mode", "expected 'std' or 'variance'");
  }
  config.frequency_mode = flags.frequency_mode;
  config.seed = flags.seed;
  return config;
}

struct MueFlags {
  std::string spec = "unbiased";
  std::string confidence = "uniform";
  std::uint64_t mue_seed = 0;
  int timeout_ms = 10000;
};

void add_mue_flags(CLI::App* cmd, MueFlags& flags) {
  cmd->add_option("--mue", flags.spec,
                  "unbiased | biased | neg-biased | accuracy:<v> | matrix:<csv> | "
                  "subprocess:<command>")
      ->capture_default_str();
  cmd->add_option("--confidence", flags.confidence,
                  "synthetic confidence draw: uniform | fixed:<v> | beta:<a>,<b>")
      ->capture_default_str();
  cmd->add_option("--mue-seed", flags.mue_seed, "base seed for synthetic oracles")
      ->capture_default_str();
  cmd->add_option("--timeout-ms", flags.timeout_ms, "subprocess reply timeout")
      ->capture_default_str();
}

ConfidenceDistribution parse_confidence(const std::string& text) {
  ConfidenceDistribution dist;
  if (text == "uniform") {
    dist.kind = ConfidenceKind::uniform_half;
    return dist;
  }
  if (text.rfind("fixed:", 0) == 0) {
    dist.kind = ConfidenceKind::fixed;
    dist.value = csv::parse_double(text.substr(6));
    return dist;
  }
  if (text.rfind("beta:", 0) == 0) {
    const auto body = text.substr(5);
    const auto comma = body.find(',');
    if (comma == std::string::npos) {
      throw CLI::ValidationError("--confidence", "beta needs two parameters: beta:<a>,<b>");
    }
    dist.kind = ConfidenceKind::beta_folded;
    dist.alpha = csv::parse_double(body.substr(0, comma));
    dist.beta = csv::parse_double(body.substr(comma + 1));
    return dist;
  }
  throw CLI::ValidationError("--confidence", "unknown confidence '" + text + "'");
}

MueConfig parse_mue(const MueFlags& flags, const Dataset& dataset) {
  if (flags.spec.rfind("matrix:", 0) == 0) {
    return MatrixMueConfig{fs::path(flags.spec.substr(7))};
  }
  if (flags.spec.rfind("subprocess:", 0) == 0) {
    return SubprocessMueConfig{flags.spec.substr(11),
                               std::chrono::milliseconds(flags.timeout_ms)};
  }
  SyntheticMuESpec spec;
  if (flags.spec == "unbiased") {
    spec = SyntheticMuESpec::uniform(0.7, dataset.n_concepts(), flags.mue_seed);
  } else if (flags.spec == "biased") {
    spec = SyntheticMuESpec::biased(dataset, 0.9, 0.5, flags.mue_seed);
  } else if (flags.spec == "neg-biased") {
    spec = SyntheticMuESpec::biased(dataset, 0.5, 0.9, flags.mue_seed);
  } else if (flags.spec.rfind("accuracy:", 0) == 0) {
    spec = SyntheticMuESpec::uniform(csv::parse_double(flags.spec.substr(9)),
                                     dataset.n_concepts(), flags.mue_seed);
  } else {
    throw CLI::ValidationError("--mue", "unknown MuE spec '" + flags.spec + "'");
  }
  spec.confidence = parse_confidence(flags.confidence);
  spec.validate();
  return spec;
}

std::vector<double> parse_prevalence(const std::string& text) {
  std::vector<double> values;
  if (text.empty()) return values;
  for (const auto& cell : csv::split_row(text)) values.push_back(csv::parse_double(cell));
  return values;
}

void emit_model_reports(const std::vector<ConceptModel>& models,
                        std::span<const std::string> concept_names, const fs::path& out_dir,
                        bool curves, bool with_svg) {
  emit_concept_comparison(models, concept_names, out_dir / "concept_summary.csv");
  if (!curves && !with_svg) return;
  for (std::size_t c = 0; c < models.size(); ++c) {
    const auto& name = concept_names[c];
    if (curves) emit_gp_curve(models[c], out_dir / ("curve_" + name + ".csv"));
    if (with_svg) {
      emit_gp_curve_svg(models[c], out_dir / ("curve_" + name + ".svg"), name);
    }
  }
}

int cmd_run(const std::string& dataset_path, const SessionFlags& session_flags,
            const MueFlags& mue_flags, const fs::path& out_dir, bool curves,
            bool with_svg) {
  const auto dataset = load_dataset(dataset_path);
  const auto config = to_config(session_flags);
  const auto mue_config = parse_mue(mue_flags, dataset);

  fs::create_directories(out_dir);
  const auto mue = make_mue(mue_config, dataset, config.seed);
  const auto log = run_session(config, dataset, *mue);

  write_session_csv(out_dir / "session.csv", log, dataset);
  emit_model_reports(log.models, dataset.concept_names, out_dir, curves, with_svg);

  std::printf("%zu questions asked, final uncertainty %s\n", log.records.size(),
              csv::format_double(log.final_uncertainty()).c_str());
  std::printf("session log: %s\n", (out_dir / "session.csv").string().c_str());
  if (log.incomplete) {
    std::fprintf(stderr, "session incomplete: %s\n", log.abort_reason.c_str());
    return 1;
  }
  return 0;
}

int cmd_experiment(const std::string& dataset_path, const SyntheticDatasetSpec& synth,
                   const SessionFlags& session_flags, const MueFlags& mue_flags,
                   const std::string& strategies_text, int repeats,
                   const std::string& checkpoints_text, const fs::path& out_dir) {
  ExperimentSpec spec;
  Dataset dataset;
  if (!dataset_path.empty()) {
    spec.dataset = fs::path(dataset_path);
    dataset = load_dataset(dataset_path);
  } else {
    if (synth.n_samples < 1 || synth.n_concepts < 1) {
      throw CLI::ValidationError(
          "--dataset", "provide --dataset or --n-samples/--n-concepts for a synthetic pool");
    }
    spec.dataset = synth;
    dataset = generate_dataset(synth);
  }
  spec.mue = parse_mue(mue_flags, dataset);
  spec.session = to_config(session_flags);
  spec.repeats = repeats;
  spec.out_dir = out_dir;

  if (!strategies_text.empty()) {
    spec.strategies.clear();
    for (const auto& name : csv::split_row(strategies_text)) {
      const auto strategy = strategy_from_name(name);
      if (!strategy) {
        throw CLI::ValidationError("--strategies", "unknown strategy '" + name + "'");
      }
      spec.strategies.push_back(*strategy);
    }
  }
  if (!checkpoints_text.empty()) {
    for (const auto& cell : csv::split_row(checkpoints_text)) {
      spec.checkpoints.push_back(static_cast<std::size_t>(csv::parse_double(cell)));
    }
  }

  const auto report = run_experiment(spec);
  std::printf("%zu session logs written to %s\n", report.session_files.size(),
              out_dir.string().c_str());
  std::printf("aggregate uncertainty: %s\n", report.aggregate_file.string().c_str());
  return 0;
}

int cmd_gen_dataset(const SyntheticDatasetSpec& spec, const fs::path& out_file) {
  const auto dataset = generate_dataset(spec);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  save_dataset(dataset, out_file);
  std::printf("%d samples x %d concepts -> %s (%zu questions)\n", dataset.n_samples(),
              dataset.n_concepts(), out_file.string().c_str(),
              static_cast<std::size_t>(dataset.n_samples()) *
                  static_cast<std::size_t>(dataset.n_concepts()));
  return 0;
}

int cmd_replay(const std::string& session_path, const std::string& dataset_path,
               const SessionFlags& session_flags, const fs::path& out_dir, bool curves,
               bool with_svg) {
  const auto rows = read_session_csv(session_path);
  const auto config = to_config(session_flags);

  std::vector<std::string> concept_names;
  if (!dataset_path.empty()) {
    concept_names = load_dataset(dataset_path).concept_names;
  } else {
    for (const auto& row : rows) {
      if (std::find(concept_names.begin(), concept_names.end(), row.concept_name) ==
          concept_names.end()) {
        concept_names.push_back(row.concept_name);
      }
    }
  }

  const auto models = replay_models(rows, concept_names, config.model_config());
  fs::create_directories(out_dir);
  emit_model_reports(models, concept_names, out_dir, curves, with_svg);

  double total = 0.0;
  for (const auto& model : models) total += model.split().total();
  std::printf("replayed %zu answers over %zu concepts, uncertainty %s\n", rows.size(),
              concept_names.size(), csv::format_double(total).c_str());
  if (!rows.empty()) {
    const double logged = rows.back().u_total_after;
    std::printf("logged final uncertainty %s (|diff| %s)\n",
                csv::format_double(logged).c_str(),
                csv::format_double(std::abs(logged - total)).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept-centric evaluation harness for multi-label classifiers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override it");

  // run
  auto* run = app.add_subcommand("run", "run a single questioning session");
  std::string run_dataset;
  SessionFlags run_session_flags;
  MueFlags run_mue_flags;
  std::string run_out = "out";
  bool run_curves = false;
  bool run_svg = false;
  run->add_option("--dataset", run_dataset, "labeled pool CSV")->required();
  add_session_flags(run, run_session_flags, true);
  add_mue_flags(run, run_mue_flags);
  run->add_option("--out", run_out, "output directory")->capture_default_str();
  run->add_flag("--curves", run_curves, "emit per-concept GP curve CSVs");
  run->add_flag("--svg", run_svg, "also render curves as SVG");

  // experiment
  auto* experiment = app.add_subcommand("experiment",
                                        "repeat sessions across strategies and seeds");
  std::string exp_dataset;
  SyntheticDatasetSpec exp_synth;
  std::string exp_prevalence;
  SessionFlags exp_session_flags;
  MueFlags exp_mue_flags;
  std::string exp_strategies;
  std::string exp_checkpoints;
  int exp_repeats = 10;
  std::string exp_out = "experiment_out";
  experiment->add_option("--dataset", exp_dataset, "labeled pool CSV");
  experiment->add_option("--n-samples", exp_synth.n_samples, "synthetic pool samples");
  experiment->add_option("--n-concepts", exp_synth.n_concepts, "synthetic pool concepts");
  experiment->add_option("--prevalence", exp_prevalence,
                         "comma-separated per-concept positive rates");
  experiment->add_option("--dataset-seed", exp_synth.seed, "synthetic pool seed")
      ->capture_default_str();
  add_session_flags(experiment, exp_session_flags, false);
  experiment->get_option("--seed")->required();  // repeats derive from it
  add_mue_flags(experiment, exp_mue_flags);
  experiment->add_option("--strategies", exp_strategies,
                         "comma-separated subset; default all four");
  experiment->add_option("--repeats", exp_repeats, "sessions per strategy")
      ->capture_default_str();
  experiment->add_option("--checkpoints", exp_checkpoints,
                         "comma-separated question counts; default every 10 + final");
  experiment->add_option("--out", exp_out, "output directory")->capture_default_str();

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "write a synthetic labeled pool");
  SyntheticDatasetSpec gen_spec;
  std::string gen_prevalence;
  std::string gen_out = "dataset.csv";
  gen->add_option("--n-samples", gen_spec.n_samples, "sample count")->required();
  gen->add_option("--n-concepts", gen_spec.n_concepts, "concept count")->required();
  gen->add_option("--prevalence", gen_prevalence,
                  "comma-separated per-concept positive rates; default 0.5");
  gen->add_option("--seed", gen_spec.seed, "label RNG seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output CSV path")->capture_default_str();

  // replay
  auto* replay = app.add_subcommand("replay", "rebuild the model from a session CSV");
  std::string replay_session;
  std::string replay_dataset;
  SessionFlags replay_flags;
  std::string replay_out = "replay_out";
  bool replay_curves = true;
  bool replay_svg = false;
  replay->add_option("--session", replay_session, "session CSV to replay")->required();
  replay->add_option("--dataset", replay_dataset,
                     "optional pool CSV fixing the concept universe");
  add_session_flags(replay, replay_flags, false);
  replay->add_option("--out", replay_out, "output directory")->capture_default_str();
  replay->add_flag("--curves,!--no-curves", replay_curves, "emit per-concept curves");
  replay->add_flag("--svg", replay_svg, "also render curves as SVG");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_dataset, run_session_flags, run_mue_flags, run_out, run_curves,
                     run_svg);
    }
    if (experiment->parsed()) {
      exp_synth.prevalence = parse_prevalence(exp_prevalence);
      return cmd_experiment(exp_dataset, exp_synth, exp_session_flags, exp_mue_flags,
                            exp_strategies, exp_repeats, exp_checkpoints, exp_out);
    }
    if (gen->parsed()) {
      gen_spec.prevalence = parse_prevalence(gen_prevalence);
      return cmd_gen_dataset(gen_spec, gen_out);
    }
    if (replay->parsed()) {
      return cmd_replay(replay_session, replay_dataset, replay_flags, replay_out,
                        replay_curves, replay_svg);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
