#include <doctest.h>

#include <chrono>
#include <cmath>

#include "test_util.hpp"
#include "vtt/csv.hpp"
#include "vtt/mue.hpp"
#include "vtt/performance_model.hpp"

using namespace vtt;
using namespace std::chrono_literals;
using vtt_test::TempDir;
using vtt_test::near;
using vtt_test::write_file;

namespace {

Dataset tiny_dataset() {
  Dataset ds;
  ds.sample_names = {"s1", "s2"};
  ds.concept_names = {"a", "b"};
  ds.labels = {1, 0, 0, 1};
  return ds;
}

}  // namespace

TEST_CASE("most common concept") {
  Dataset ds;
  ds.concept_names = {"a", "b"};
  ds.sample_names = {"s1", "s2", "s3", "s4", "s5", "s6", "s7"};
  ds.labels = {1, 0, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 0};  // a: 5, b: 2
  CHECK(most_common_concept(ds) == 0);

  // Tie breaks to the lowest index.
  Dataset tie;
  tie.concept_names = {"a", "b"};
  tie.sample_names = {"s1", "s2", "s3"};
  tie.labels = {1, 1, 1, 1, 1, 1};
  CHECK(most_common_concept(tie) == 0);

  // Skewed prevalence: recount per concept directly.
  SyntheticDatasetSpec spec;
  spec.n_samples = 60;
  spec.n_concepts = 11;
  spec.prevalence = {0.1, 0.2, 0.9, 0.3, 0.1, 0.2, 0.4, 0.1, 0.05, 0.3, 0.2};
  spec.seed = 12;
  const auto skewed = generate_dataset(spec);
  int expected = 0;
  std::uint64_t best = 0;
  for (int c = 0; c < skewed.n_concepts(); ++c) {
    std::uint64_t count = 0;
    for (int s = 0; s < skewed.n_samples(); ++s) {
      count += static_cast<std::uint64_t>(skewed.label(s, c));
    }
    if (count > best) {
      best = count;
      expected = c;
    }
  }
  CHECK(most_common_concept(skewed) == expected);
}

TEST_CASE("synthetic answers stay on the consistent half") {
  // Perfect accuracy forces the Yes half for positive questions.
  auto spec = SyntheticMuESpec::uniform(1.0, 1, 7);
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double p = synthetic_answer(spec, Question{i, 0, 1}, rng);
    CHECK(p > 0.5);
    CHECK(p <= 1.0);
    const double n = synthetic_answer(spec, Question{i, 0, 0}, rng);
    CHECK(n < 0.5);
    CHECK(n >= 0.0);
  }
}

TEST_CASE("synthetic accuracy is recovered empirically") {
  const int n = 10000;

  SUBCASE("coin-flip oracle") {
    auto spec = SyntheticMuESpec::uniform(0.5, 1, 99);
    Rng rng(99);
    int correct = 0;
    for (int i = 0; i < n; ++i) {
      const int gt = i % 2;
      const double p = synthetic_answer(spec, Question{i, 0, gt}, rng);
      correct += (p >= 0.5) == (gt == 1) ? 1 : 0;
    }
    CHECK(near(static_cast<double>(correct) / n, 0.5, 0.02));
  }

  SUBCASE("biased oracle: 0.9 on the common concept, 0.5 elsewhere") {
    SyntheticDatasetSpec dspec;
    dspec.n_samples = 50;
    dspec.n_concepts = 3;
    dspec.prevalence = {0.2, 0.8, 0.3};
    dspec.seed = 4;
    const auto ds = generate_dataset(dspec);
    const auto spec = SyntheticMuESpec::biased(ds, 0.9, 0.5, 321);
    const int common = most_common_concept(ds);
    CHECK(common == 1);

    Rng rng(321);
    for (int c = 0; c < 3; ++c) {
      int correct = 0;
      for (int i = 0; i < n; ++i) {
        const int gt = i % 2;
        const double p = synthetic_answer(spec, Question{i, c, gt}, rng);
        correct += (p >= 0.5) == (gt == 1) ? 1 : 0;
      }
      const double rate = static_cast<double>(correct) / n;
      CHECK(near(rate, c == common ? 0.9 : 0.5, 0.01));
    }
  }
}

TEST_CASE("synthetic draws are reproducible and range-safe") {
  auto spec = SyntheticMuESpec::uniform(0.7, 2, 5);

  SyntheticMuE first(spec);
  SyntheticMuE second(spec);
  for (int i = 0; i < 100; ++i) {
    const Question q{i, i % 2, i % 2};
    CHECK(first.answer(q) == second.answer(q));
  }

  spec.confidence.kind = ConfidenceKind::beta_folded;
  spec.confidence.alpha = 2.0;
  spec.confidence.beta = 5.0;
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const int gt = i % 2;
    const double p = synthetic_answer(spec, Question{i, 0, gt}, rng);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    // side must match the internally drawn correctness bit: verify only
    // the reachable halves
    if (gt == 1) {
      CHECK(p != 0.5);
    }
  }

  spec.confidence.kind = ConfidenceKind::fixed;
  spec.confidence.value = 1.0;
  Rng hard_rng(9);
  for (int i = 0; i < 50; ++i) {
    const double p = synthetic_answer(spec, Question{i, 0, 1}, hard_rng);
    CHECK((p == 0.0 || p == 1.0));
  }

  spec.confidence.value = 0.4;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.confidence.value = 0.8;
  spec.accuracy_by_concept = {0.0, 0.5};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("unknown concept is rejected") {
  const auto spec = SyntheticMuESpec::uniform(0.7, 2, 1);
  Rng rng(1);
  CHECK_THROWS_AS(synthetic_answer(spec, Question{0, 5, 1}, rng), std::invalid_argument);
}

TEST_CASE("matrix answers") {
  TempDir dir;
  const auto ds = tiny_dataset();

  SUBCASE("stored probabilities come back verbatim") {
    const auto path = write_file(dir, "m.csv",
                                 "sample_id,a,b\n"
                                 "s1,0.73,0.2\n"
                                 "s2,0.5,0.9\n");
    const auto matrix = load_probability_matrix(path);
    CHECK(matrix_answer(matrix, "s1", "a") == 0.73);
    MatrixMuE mue(matrix, ds);
    CHECK(mue.answer(Question{0, 0, 1}) == 0.73);
    CHECK(mue.answer(Question{1, 1, 1}) == 0.9);
    // pure lookup: same answer on repeat
    CHECK(mue.answer(Question{0, 0, 1}) == 0.73);
  }

  SUBCASE("missing pair names the culprit") {
    const auto path = write_file(dir, "m.csv",
                                 "sample_id,a,b\n"
                                 "s1,0.73,0.2\n");
    const auto matrix = load_probability_matrix(path);
    CHECK_THROWS_WITH_AS(matrix_answer(matrix, "s2", "b"),
                         "probability matrix has no entry for (s2, b)", AdapterError);
    MatrixMuE mue(matrix, ds);
    CHECK_THROWS_AS(mue.answer(Question{1, 1, 1}), AdapterError);
  }

  SUBCASE("out-of-range cells are rejected at load") {
    const auto path = write_file(dir, "m.csv",
                                 "sample_id,a,b\n"
                                 "s1,1.7,0.2\n");
    CHECK_THROWS_AS(load_probability_matrix(path), csv::FormatError);
  }
}

TEST_CASE("subprocess line protocol") {
  const auto ds = tiny_dataset();

  SUBCASE("well-behaved child") {
    SubprocessMuE mue("while IFS= read -r line; do echo 0.42; done", ds, 5s);
    CHECK(mue.answer(Question{0, 0, 1}) == 0.42);
    CHECK(mue.answer(Question{1, 1, 0}) == 0.42);
  }

  SUBCASE("child echoes per-question values") {
    // reply depends on the request line, proving request framing works
    SubprocessMuE mue(
        "while IFS=, read -r s c; do if [ \"$s\" = s1 ]; then echo 0.9; "
        "else echo 0.1; fi; done",
        ds, 5s);
    CHECK(mue.answer(Question{0, 0, 1}) == 0.9);
    CHECK(mue.answer(Question{1, 0, 0}) == 0.1);
  }

  SUBCASE("out-of-range reply") {
    SubprocessMuE mue("while IFS= read -r line; do echo 1.7; done", ds, 5s);
    CHECK_THROWS_AS(mue.answer(Question{0, 0, 1}), AdapterError);
  }

  SUBCASE("malformed reply") {
    SubprocessMuE mue("while IFS= read -r line; do echo not-a-number; done", ds, 5s);
    CHECK_THROWS_AS(mue.answer(Question{0, 0, 1}), AdapterError);
  }

  SUBCASE("timeout") {
    SubprocessMuE mue("sleep 30", ds, 200ms);
    CHECK_THROWS_AS(mue.answer(Question{0, 0, 1}), AdapterError);
  }

  SUBCASE("child exits early") {
    SubprocessMuE mue("true", ds, 2s);
    CHECK_THROWS_AS(mue.answer(Question{0, 0, 1}), AdapterError);
  }
}
