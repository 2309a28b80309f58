#include <doctest.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "vtt/csv.hpp"
#include "vtt/report.hpp"

using namespace vtt;
using vtt_test::TempDir;
using vtt_test::near;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SessionLog run_small_session(const Dataset& ds, StrategyKind kind, std::uint64_t seed,
                             std::optional<std::size_t> budget = {}) {
  SessionConfig config;
  config.strategy = kind;
  config.max_questions = budget;
  config.seed = seed;
  SyntheticMuE mue(SyntheticMuESpec::uniform(0.7, ds.n_concepts(), seed + 1));
  return run_session(config, ds, mue);
}

Dataset demo_dataset() {
  SyntheticDatasetSpec spec;
  spec.n_samples = 15;
  spec.n_concepts = 3;
  spec.prevalence = {0.2, 0.5, 0.7};
  spec.seed = 77;
  return generate_dataset(spec);
}

}  // namespace

TEST_CASE("session csv round-trips through the reader") {
  TempDir dir;
  const auto ds = demo_dataset();
  const auto log = run_small_session(ds, StrategyKind::uncertainty, 5, 25);
  const auto path = dir.file("session.csv");
  write_session_csv(path, log, ds);

  const auto rows = read_session_csv(path);
  REQUIRE(rows.size() == log.records.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& rec = log.records[i];
    CHECK(rows[i].step == rec.step);
    CHECK(rows[i].gt == rec.question.gt);
    CHECK(near(rows[i].prob, rec.prob, 1e-12));
    CHECK(near(rows[i].a, rec.a, 1e-12));
    CHECK(near(rows[i].u_total_after, log.trace[i].total, 1e-9));
    CHECK(rows[i].sample_name ==
          ds.sample_names[static_cast<std::size_t>(rec.question.sample)]);
  }
}

TEST_CASE("replayed models match the session's final state") {
  TempDir dir;
  const auto ds = demo_dataset();
  const auto log = run_small_session(ds, StrategyKind::combined, 6, 30);
  const auto path = dir.file("session.csv");
  write_session_csv(path, log, ds);

  const auto rows = read_session_csv(path);
  const auto models = replay_models(rows, ds.concept_names, log.config.model_config());
  REQUIRE(models.size() == log.models.size());
  for (std::size_t c = 0; c < models.size(); ++c) {
    CHECK(models[c].bin_counts() == log.models[c].bin_counts());
    CHECK(models[c].split().total() == log.models[c].split().total());
  }
}

TEST_CASE("gp curve emission") {
  TempDir dir;

  SUBCASE("empty model is the prior band") {
    ConceptModel model(0);
    const auto path = dir.file("curve.csv");
    emit_gp_curve(model, path);
    const auto rows = csv::read_rows(path);
    REQUIRE(rows.size() == 102);  // header + 101 grid rows
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& cells = rows[r].second;
      REQUIRE(cells.size() == 5);
      CHECK(csv::parse_double(cells[1]) == 0.0);   // mean
      CHECK(csv::parse_double(cells[2]) == -2.0);  // lower
      CHECK(csv::parse_double(cells[3]) == 2.0);   // upper
      CHECK(cells[4] == "0");
    }
  }

  SUBCASE("single answer shows up as one counted bin") {
    ConceptModel model(0);
    model.record(Question{0, 0, 1}, 0.9, 1);  // a = 0.95
    const auto path = dir.file("curve.csv");
    emit_gp_curve(model, path);
    const auto rows = csv::read_rows(path);
    int nonzero = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& cells = rows[r].second;
      if (cells[4] != "0") {
        ++nonzero;
        CHECK(near(csv::parse_double(cells[0]), 0.95, 1e-12));
        CHECK(cells[4] == "1");
      }
    }
    CHECK(nonzero == 1);
  }

  SUBCASE("band area recomputed from the file matches band_integrals") {
    ConceptModel model(0);
    Rng rng(55);
    for (int i = 0; i < 40; ++i) {
      model.record(Question{i, 0, static_cast<int>(rng.index(2))}, rng.uniform01(), i + 1);
    }
    const auto path = dir.file("curve.csv");
    emit_gp_curve(model, path);
    const auto rows = csv::read_rows(path);
    double area = 0.0;
    double prev_a = 0.0, prev_width = 0.0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& cells = rows[r].second;
      const double a = csv::parse_double(cells[0]);
      const double width = csv::parse_double(cells[3]) - csv::parse_double(cells[2]);
      if (r > 1) area += (a - prev_a) * 0.5 * (width + prev_width);
      prev_a = a;
      prev_width = width;
    }
    CHECK(near(area, model.split().total(), 1e-6));
  }
}

TEST_CASE("gp curve svg is written and self-contained") {
  TempDir dir;
  ConceptModel model(0);
  model.record(Question{0, 0, 1}, 0.8, 1);
  model.record(Question{1, 0, 0}, 0.3, 2);
  const auto path = dir.file("curve.svg");
  emit_gp_curve_svg(model, path, "demo");
  const auto content = slurp(path);
  CHECK(content.find("<svg") != std::string::npos);
  CHECK(content.find("polyline") != std::string::npos);
  CHECK(content.find("circle") != std::string::npos);
  CHECK(content.find("</svg>") != std::string::npos);
}

TEST_CASE("concept comparison table") {
  TempDir dir;
  const auto ds = demo_dataset();

  SUBCASE("zero-question session reports priors") {
    std::vector<ConceptModel> models;
    for (int c = 0; c < ds.n_concepts(); ++c) models.emplace_back(c);
    const auto path = dir.file("summary.csv");
    emit_concept_comparison(models, ds.concept_names, path);
    const auto rows = csv::read_rows(path);
    REQUIRE(rows.size() == 4);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& cells = rows[r].second;
      CHECK(cells[1] == "0");
      CHECK(csv::parse_double(cells[2]) == 2.0);
      CHECK(csv::parse_double(cells[3]) == 2.0);
      CHECK(cells[4] == "0");
      CHECK(cells[7] == "0");
    }
  }

  SUBCASE("question counts sum to the session length") {
    const auto log = run_small_session(ds, StrategyKind::random, 7, 33);
    const auto path = dir.file("summary.csv");
    emit_concept_comparison(log.models, ds.concept_names, path);
    const auto rows = csv::read_rows(path);
    std::uint64_t total = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      total += static_cast<std::uint64_t>(csv::parse_double(rows[r].second[1]));
    }
    CHECK(total == 33);
  }
}

TEST_CASE("default checkpoints are every ten plus the final step") {
  CHECK(default_checkpoints(45) ==
        std::vector<std::size_t>{10, 20, 30, 40, 45});
  CHECK(default_checkpoints(20) == std::vector<std::size_t>{10, 20});
  CHECK(default_checkpoints(7) == std::vector<std::size_t>{7});
}

TEST_CASE("experiment writes one csv per session plus the aggregate") {
  TempDir dir;
  ExperimentSpec spec;
  SyntheticDatasetSpec dspec;
  dspec.n_samples = 12;
  dspec.n_concepts = 2;
  dspec.prevalence = {0.3, 0.6};
  dspec.seed = 19;
  spec.dataset = dspec;
  spec.mue = SyntheticMuESpec::uniform(0.7, 2, 0);
  spec.repeats = 3;
  spec.session.max_questions = 18;
  spec.session.seed = 1234;
  spec.out_dir = dir.file("out");

  const auto report = run_experiment(spec);
  CHECK(report.session_files.size() == 4 * 3);
  for (const auto& file : report.session_files) {
    CHECK(std::filesystem::exists(file));
  }
  CHECK(std::filesystem::exists(report.aggregate_file));
  // 4 strategies x (10 and 18) checkpoints
  CHECK(report.aggregate.size() == 4 * 2);

  SUBCASE("aggregate means match recomputation from the session files") {
    for (const auto& row : report.aggregate) {
      double sum = 0.0;
      int found = 0;
      for (int r = 1; r <= spec.repeats; ++r) {
        const auto path = spec.out_dir / ("session_" +
                                          std::string(strategy_name(row.strategy)) + "_" +
                                          std::to_string(r) + ".csv");
        const auto rows = read_session_csv(path);
        REQUIRE(rows.size() >= row.checkpoint);
        sum += rows[row.checkpoint - 1].u_total_after;
        ++found;
      }
      CHECK(found == spec.repeats);
      CHECK(near(sum / spec.repeats, row.mean_u_total, 1e-9));
    }
  }

  SUBCASE("aggregate uncertainty is non-increasing along checkpoints") {
    for (std::size_t i = 1; i < report.aggregate.size(); ++i) {
      if (report.aggregate[i].strategy != report.aggregate[i - 1].strategy) continue;
      CHECK(report.aggregate[i].mean_u_total <=
            report.aggregate[i - 1].mean_u_total + 1e-9);
    }
  }

  SUBCASE("re-running the spec reproduces byte-identical files") {
    ExperimentSpec again = spec;
    again.out_dir = dir.file("out2");
    const auto second = run_experiment(again);
    REQUIRE(second.session_files.size() == report.session_files.size());
    for (std::size_t i = 0; i < report.session_files.size(); ++i) {
      CHECK(slurp(report.session_files[i]) == slurp(second.session_files[i]));
    }
    CHECK(slurp(report.aggregate_file) == slurp(second.aggregate_file));
  }
}

TEST_CASE("experiment surfaces adapter failures as errors") {
  TempDir dir;
  ExperimentSpec spec;
  SyntheticDatasetSpec dspec;
  dspec.n_samples = 4;
  dspec.n_concepts = 2;
  dspec.seed = 3;
  spec.dataset = dspec;
  spec.mue = SubprocessMueConfig{"while IFS= read -r l; do echo nope; done",
                                 std::chrono::seconds(2)};
  spec.repeats = 1;
  spec.strategies = {StrategyKind::random};
  spec.session.max_questions = 4;
  spec.session.seed = 9;
  spec.out_dir = dir.file("out");
  CHECK_THROWS_AS(run_experiment(spec), AdapterError);
}
