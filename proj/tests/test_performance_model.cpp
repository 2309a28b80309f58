#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "test_util.hpp"
#include "vtt/performance_model.hpp"
#include "vtt/rng.hpp"

using namespace vtt;
using vtt_test::near;

TEST_CASE("answer encoding") {
  CHECK(encode_answer(0.8, 1) == 0.9);
  CHECK(encode_answer(0.0, 0) == 0.0);
  CHECK(encode_answer(0.5, 0) == 0.25);
  CHECK_THROWS_AS(encode_answer(1.2, 0), std::invalid_argument);
  CHECK_THROWS_AS(encode_answer(-0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(encode_answer(0.5, 2), std::invalid_argument);

  // gt splits the support: negatives land in [0, 0.5], positives in [0.5, 1].
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double prob = rng.uniform01();
    const double a0 = encode_answer(prob, 0);
    const double a1 = encode_answer(prob, 1);
    CHECK(a0 >= 0.0);
    CHECK(a0 <= 0.5);
    CHECK(a1 >= 0.5);
    CHECK(a1 <= 1.0);
  }
}

TEST_CASE("bin index rounds to the nearest center") {
  CHECK(bin_index(0.0) == 0);
  CHECK(bin_index(0.254) == 25);
  CHECK(bin_index(1.0) == 100);
  CHECK(bin_index(0.005) == 1);  // ties round up
  CHECK(bin_center(25) == 0.25);
  CHECK_THROWS_AS(bin_index(1.01), std::invalid_argument);
  CHECK_THROWS_AS(bin_index(-0.001), std::invalid_argument);
}

TEST_CASE("outcome classification") {
  CHECK(classify_outcome(0.9) == Outcome::TP);
  CHECK(classify_outcome(0.1) == Outcome::TN);
  CHECK(classify_outcome(0.25) == Outcome::FP);  // prob 0.5 counts as Yes
  CHECK(classify_outcome(0.5) == Outcome::FP);
  CHECK(classify_outcome(0.55) == Outcome::FN);
  CHECK(classify_outcome(0.75) == Outcome::TP);
  CHECK(outcome_from_name("FN") == Outcome::FN);
  CHECK(!outcome_from_name("XX"));
}

TEST_CASE("recording answers fills bins") {
  ConceptModel model(0);
  const Question q{3, 0, 1};
  const auto rec = model.record(q, 0.9, 1);
  CHECK(near(rec.a, 0.95, 1e-15));
  CHECK(model.bin_counts()[95] == 1);
  CHECK(model.total_answers() == 1);

  model.record(q, 0.9, 2);
  CHECK(model.bin_counts()[95] == 2);
  for (int i = 0; i < kBinCount; ++i) {
    if (i != 95) CHECK(model.bin_counts()[static_cast<std::size_t>(i)] == 0);
  }

  CHECK_THROWS_AS(model.record(Question{3, 1, 1}, 0.9, 3), std::invalid_argument);
}

TEST_CASE("frequency mode normalizes observation values") {
  ConceptModel model(0, {{}, gp::BandMode::two_std, true});
  model.record(Question{0, 0, 1}, 0.9, 1);
  auto obs = model.observations();
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].value == 1.0);

  model.record(Question{1, 0, 1}, 0.9, 2);
  model.record(Question{2, 0, 0}, 0.1, 3);
  obs = model.observations();
  REQUIRE(obs.size() == 2);
  CHECK(near(obs[0].value, 1.0 / 3.0, 1e-15));  // bin 5
  CHECK(near(obs[1].value, 2.0 / 3.0, 1e-15));  // bin 95
}

TEST_CASE("confusion tallies") {
  CHECK(confusion_counts({}) == ConfusionCounts{});

  std::vector<AnswerRecord> records(3);
  records[0].a = 0.9;
  records[1].a = 0.1;
  records[2].a = 0.6;
  const auto counts = confusion_counts(records);
  CHECK(counts == ConfusionCounts{1, 0, 1, 1});

  std::vector<AnswerRecord> shuffled = {records[2], records[0], records[1]};
  CHECK(confusion_counts(shuffled) == counts);
}

TEST_CASE("record tallies equal subregion bin sums") {
  Rng rng(17);
  ConceptModel model(0);
  std::vector<AnswerRecord> history;
  for (int step = 1; step <= 300; ++step) {
    const int gt = rng.bernoulli(0.4) ? 1 : 0;
    history.push_back(model.record(Question{step, 0, gt}, rng.uniform01(), step));
  }
  CHECK(confusion_counts(history) == model.region_counts());
  CHECK(model.region_counts().total() == model.total_answers());
}

TEST_CASE("bin counts are order-independent") {
  Rng rng(23);
  std::vector<std::pair<double, int>> answers;
  for (int i = 0; i < 100; ++i) {
    answers.emplace_back(rng.uniform01(), rng.bernoulli(0.5) ? 1 : 0);
  }
  ConceptModel forward(0);
  for (std::size_t i = 0; i < answers.size(); ++i) {
    forward.record(Question{static_cast<int>(i), 0, answers[i].second},
                   answers[i].first, static_cast<int>(i) + 1);
  }
  ConceptModel backward(0);
  int step = 1;
  for (auto it = answers.rbegin(); it != answers.rend(); ++it, ++step) {
    backward.record(Question{step, 0, it->second}, it->first, step);
  }
  CHECK(forward.bin_counts() == backward.bin_counts());
}

TEST_CASE("model caches update on record") {
  ConceptModel model(0);
  CHECK(model.split().total() == 4.0);  // prior band
  model.record(Question{0, 0, 1}, 0.9, 1);
  CHECK(model.split().total() < 4.0);
  const auto& curve = model.curve();
  CHECK(curve.mean[95] > 0.0);
}
