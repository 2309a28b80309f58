#include "vtt/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vtt/csv.hpp"
#include "vtt/svg.hpp"

namespace vtt {

std::unique_ptr<MuE> make_mue(const MueConfig& config, const Dataset& dataset,
                              std::uint64_t session_seed) {
  if (const auto* synthetic = std::get_if<SyntheticMuESpec>(&config)) {
    SyntheticMuESpec spec = *synthetic;
    spec.seed = derive_seed(spec.seed, session_seed, 0x6d7565ULL);  // "mue"
    return std::make_unique<SyntheticMuE>(std::move(spec));
  }
  if (const auto* matrix = std::get_if<MatrixMueConfig>(&config)) {
    return std::make_unique<MatrixMuE>(load_probability_matrix(matrix->path), dataset);
  }
  const auto& sub = std::get<SubprocessMueConfig>(config);
  return std::make_unique<SubprocessMuE>(sub.command, dataset, sub.timeout);
}

void write_session_csv(std::ostream& out, const SessionLog& log, const Dataset& dataset) {
  out << "step,sample_id,concept_id,gt,prob,a,outcome,u_total_after\n";
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& rec = log.records[i];
    const Outcome outcome = classify_outcome(bin_center(bin_index(rec.a)));
    out << rec.step << ','
        << dataset.sample_names[static_cast<std::size_t>(rec.question.sample)] << ','
        << dataset.concept_names[static_cast<std::size_t>(rec.question.concept_id)] << ','
        << rec.question.gt << ',' << csv::format_double(rec.prob) << ','
        << csv::format_double(rec.a) << ',' << outcome_name(outcome) << ','
        << csv::format_double(log.trace[i].total) << '\n';
  }
}

void write_session_csv(const std::filesystem::path& path, const SessionLog& log,
                       const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_session_csv(out, log, dataset);
}

std::vector<SessionRow> read_session_csv(const std::filesystem::path& path) {
  const auto rows = csv::read_rows(path);
  if (rows.empty()) {
    throw csv::FormatError("session file is empty", 1);
  }
  const std::vector<std::string> expected = {"step", "sample_id", "concept_id", "gt",
                                             "prob", "a",         "outcome",    "u_total_after"};
  const auto& [header_line, header] = rows.front();
  if (header != expected) {
    throw csv::FormatError("unexpected session header", header_line);
  }
  std::vector<SessionRow> parsed;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    if (cells.size() != expected.size()) {
      throw csv::FormatError("expected 8 cells", line_no);
    }
    try {
      SessionRow row;
      row.step = static_cast<int>(csv::parse_double(cells[0]));
      row.sample_name = cells[1];
      row.concept_name = cells[2];
      row.gt = static_cast<int>(csv::parse_double(cells[3]));
      row.prob = csv::parse_double(cells[4]);
      row.a = csv::parse_double(cells[5]);
      const auto outcome = outcome_from_name(cells[6]);
      if (!outcome) {
        throw std::invalid_argument("unknown outcome '" + cells[6] + "'");
      }
      row.outcome = *outcome;
      row.u_total_after = csv::parse_double(cells[7]);
      parsed.push_back(std::move(row));
    } catch (const std::invalid_argument& e) {
      throw csv::FormatError(e.what(), line_no);
    }
  }
  return parsed;
}

std::vector<ConceptModel> replay_models(std::span<const SessionRow> rows,
                                        std::span<const std::string> concept_names,
                                        const ModelConfig& config) {
  std::vector<ConceptModel> models;
  models.reserve(concept_names.size());
  for (std::size_t c = 0; c < concept_names.size(); ++c) {
    models.emplace_back(static_cast<int>(c), config);
  }
  for (const auto& row : rows) {
    const auto it = std::find(concept_names.begin(), concept_names.end(), row.concept_name);
    if (it == concept_names.end()) {
      throw std::invalid_argument("session row names unknown concept '" +
                                  row.concept_name + "'");
    }
    const int c = static_cast<int>(it - concept_names.begin());
    models[static_cast<std::size_t>(c)].record(Question{0, c, row.gt}, row.prob, row.step);
  }
  return models;
}

void emit_gp_curve(const ConceptModel& model, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) {
    throw std::runtime_error("cannot write " + csv_path.string());
  }
  const auto& curve = model.curve();
  const auto& counts = model.bin_counts();
  out << "a,mean,lower,upper,count\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double std_dev = std::sqrt(curve.variance[i]);
    out << csv::format_double(curve.grid[i]) << ',' << csv::format_double(curve.mean[i])
        << ',' << csv::format_double(curve.mean[i] - 2.0 * std_dev) << ','
        << csv::format_double(curve.mean[i] + 2.0 * std_dev) << ',' << counts[i] << '\n';
  }
}

void emit_gp_curve_svg(const ConceptModel& model, const std::filesystem::path& svg_path,
                       const std::string& title) {
  const auto& curve = model.curve();
  svg::BandPlot plot;
  plot.title = title;
  plot.x = curve.grid;
  plot.mean = curve.mean;
  plot.lower.resize(curve.grid.size());
  plot.upper.resize(curve.grid.size());
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double std_dev = std::sqrt(curve.variance[i]);
    plot.lower[i] = curve.mean[i] - 2.0 * std_dev;
    plot.upper[i] = curve.mean[i] + 2.0 * std_dev;
  }
  for (const auto& obs : model.observations()) {
    plot.points.push_back({obs.location, obs.value});
  }
  svg::write_band_plot(plot, svg_path);
}

void emit_concept_comparison(std::span<const ConceptModel> models,
                             std::span<const std::string> concept_names,
                             const std::filesystem::path& path) {
  if (models.size() != concept_names.size()) {
    throw std::invalid_argument("one concept name per model required");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "concept_id,questions,u_neg,u_pos,tn,fp,fn,tp\n";
  for (std::size_t c = 0; c < models.size(); ++c) {
    const auto& split = models[c].split();
    const auto counts = models[c].region_counts();
    out << concept_names[c] << ',' << models[c].total_answers() << ','
        << csv::format_double(split.neg) << ',' << csv::format_double(split.pos) << ','
        << counts.tn << ',' << counts.fp << ',' << counts.fn << ',' << counts.tp << '\n';
  }
}

void ExperimentSpec::validate() const {
  if (repeats < 1) {
    throw std::invalid_argument("repeats must be at least 1");
  }
  if (strategies.empty()) {
    throw std::invalid_argument("experiment needs at least one strategy");
  }
  session.validate();
  for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i) {
    if (checkpoints[i] >= checkpoints[i + 1]) {
      throw std::invalid_argument("checkpoints must be strictly increasing");
    }
  }
  if (!checkpoints.empty() && checkpoints.front() < 1) {
    throw std::invalid_argument("checkpoints start at question 1");
  }
}

std::vector<std::size_t> default_checkpoints(std::size_t total_questions) {
  std::vector<std::size_t> points;
  for (std::size_t k = 10; k < total_questions; k += 10) points.push_back(k);
  if (total_questions >= 1) points.push_back(total_questions);
  return points;
}

namespace {

double u_total_at(const SessionLog& log, std::size_t checkpoint) {
  if (log.trace.empty() || checkpoint == 0) return log.final_uncertainty();
  const std::size_t idx = std::min(checkpoint, log.trace.size()) - 1;
  return log.trace[idx].total;
}

struct MeanStd {
  double mean = 0.0;
  double std_dev = 0.0;
};

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  Dataset dataset;
  if (const auto* path = std::get_if<std::filesystem::path>(&spec.dataset)) {
    dataset = load_dataset(*path);
  } else {
    dataset = generate_dataset(std::get<SyntheticDatasetSpec>(spec.dataset));
  }

  std::filesystem::create_directories(spec.out_dir);
  {
    std::ofstream probe(spec.out_dir / ".write_probe");
    if (!probe) {
      throw std::runtime_error("output directory is not writable: " +
                               spec.out_dir.string());
    }
  }
  std::filesystem::remove(spec.out_dir / ".write_probe");

  const std::size_t pool_size = static_cast<std::size_t>(dataset.n_samples()) *
                                static_cast<std::size_t>(dataset.n_concepts());
  const std::size_t session_len =
      spec.session.max_questions ? std::min(*spec.session.max_questions, pool_size)
                                 : pool_size;
  const std::vector<std::size_t> checkpoints =
      spec.checkpoints.empty() ? default_checkpoints(session_len) : spec.checkpoints;

  // A shared subprocess child serializes its replies internally; synthetic
  // and matrix adapters are built per session.
  std::unique_ptr<MuE> shared;
  if (std::holds_alternative<SubprocessMueConfig>(spec.mue)) {
    shared = make_mue(spec.mue, dataset, 0);
  }

  struct Job {
    std::size_t strategy_index;
    int repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < spec.strategies.size(); ++s) {
    for (int r = 0; r < spec.repeats; ++r) jobs.push_back({s, r});
  }

  std::vector<SessionLog> logs(jobs.size());
  std::vector<std::filesystem::path> files(jobs.size());
  std::vector<std::string> failures(jobs.size());

  const std::ptrdiff_t n_jobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < n_jobs; ++j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    const StrategyKind strategy = spec.strategies[job.strategy_index];
    SessionConfig config = spec.session;
    config.strategy = strategy;
    config.seed = derive_seed(spec.session.seed, static_cast<std::uint64_t>(strategy),
                              static_cast<std::uint64_t>(job.repeat));
    try {
      std::unique_ptr<MuE> own;
      MuE* mue = shared.get();
      if (!mue) {
        own = make_mue(spec.mue, dataset, config.seed);
        mue = own.get();
      }
      SessionLog log = run_session(config, dataset, *mue);
      if (log.incomplete) {
        failures[static_cast<std::size_t>(j)] =
            std::string(strategy_name(strategy)) + " repeat " +
            std::to_string(job.repeat + 1) + ": " + log.abort_reason;
      }
      const auto file = spec.out_dir / ("session_" + std::string(strategy_name(strategy)) +
                                        "_" + std::to_string(job.repeat + 1) + ".csv");
      write_session_csv(file, log, dataset);
      files[static_cast<std::size_t>(j)] = file;
      logs[static_cast<std::size_t>(j)] = std::move(log);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(j)] = std::string(strategy_name(strategy)) +
                                              " repeat " + std::to_string(job.repeat + 1) +
                                              ": " + e.what();
    }
  }

  for (const auto& failure : failures) {
    if (!failure.empty()) {
      throw AdapterError("experiment session failed: " + failure);
    }
  }

  ExperimentReport report;
  report.session_files = std::move(files);

  const double n_concepts = static_cast<double>(dataset.n_concepts());
  for (std::size_t s = 0; s < spec.strategies.size(); ++s) {
    for (std::size_t checkpoint : checkpoints) {
      std::vector<double> totals;
      totals.reserve(static_cast<std::size_t>(spec.repeats));
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].strategy_index != s) continue;
        totals.push_back(u_total_at(logs[j], checkpoint));
      }
      const MeanStd stats = mean_std(totals);
      AggregateRow row;
      row.strategy = spec.strategies[s];
      row.checkpoint = checkpoint;
      row.mean_u_total = stats.mean;
      row.std_u_total = stats.std_dev;
      row.mean_u_per_concept = stats.mean / n_concepts;
      row.std_u_per_concept = stats.std_dev / n_concepts;
      report.aggregate.push_back(row);
    }
  }

  report.aggregate_file = spec.out_dir / "aggregate_uncertainty.csv";
  std::ofstream out(report.aggregate_file);
  if (!out) {
    throw std::runtime_error("cannot write " + report.aggregate_file.string());
  }
  out << "strategy,checkpoint,mean_u_total,std_u_total,mean_u_per_concept,"
         "std_u_per_concept\n";
  for (const auto& row : report.aggregate) {
    out << strategy_name(row.strategy) << ',' << row.checkpoint << ','
        << csv::format_double(row.mean_u_total) << ','
        << csv::format_double(row.std_u_total) << ','
        << csv::format_double(row.mean_u_per_concept) << ','
        << csv::format_double(row.std_u_per_concept) << '\n';
  }
  return report;
}

}  // namespace vtt
