#include "vtt/question_pool.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "vtt/csv.hpp"
#include "vtt/rng.hpp"

namespace vtt {

std::uint64_t Dataset::positives(int concept_id) const {
  std::uint64_t count = 0;
  for (int s = 0; s < n_samples(); ++s) count += static_cast<std::uint64_t>(label(s, concept_id));
  return count;
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto rows = csv::read_rows(path);
  if (rows.empty()) {
    throw csv::FormatError("dataset file is empty", 1);
  }

  const auto& [header_line, header] = rows.front();
  if (header.size() < 2 || header[0] != "sample_id") {
    throw csv::FormatError("header must be 'sample_id,<concept>,...'", header_line);
  }
  Dataset ds;
  ds.concept_names.assign(header.begin() + 1, header.end());
  {
    std::set<std::string> unique(ds.concept_names.begin(), ds.concept_names.end());
    if (unique.size() != ds.concept_names.size()) {
      throw csv::FormatError("duplicate concept name in header", header_line);
    }
  }

  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    if (cells.size() != header.size()) {
      throw csv::FormatError("expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()),
                             line_no);
    }
    if (cells[0].empty()) {
      throw csv::FormatError("empty sample id", line_no);
    }
    if (!seen.insert(cells[0]).second) {
      throw csv::FormatError("duplicate sample id '" + cells[0] + "'", line_no);
    }
    ds.sample_names.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c] == "0") {
        ds.labels.push_back(0);
      } else if (cells[c] == "1") {
        ds.labels.push_back(1);
      } else {
        throw csv::FormatError("label cell must be 0 or 1, found '" + cells[c] + "'",
                               line_no);
      }
    }
  }
  if (ds.sample_names.empty()) {
    throw csv::FormatError("dataset has no sample rows", header_line);
  }
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "sample_id";
  for (const auto& c : dataset.concept_names) out << ',' << c;
  out << '\n';
  for (int s = 0; s < dataset.n_samples(); ++s) {
    out << dataset.sample_names[static_cast<std::size_t>(s)];
    for (int c = 0; c < dataset.n_concepts(); ++c) out << ',' << dataset.label(s, c);
    out << '\n';
  }
}

Dataset generate_dataset(const SyntheticDatasetSpec& spec) {
  if (spec.n_samples < 1 || spec.n_concepts < 1) {
    throw std::invalid_argument("synthetic dataset needs at least 1 sample and 1 concept");
  }
  std::vector<double> prevalence = spec.prevalence;
  if (prevalence.empty()) {
    prevalence.assign(static_cast<std::size_t>(spec.n_concepts), 0.5);
  }
  if (prevalence.size() != static_cast<std::size_t>(spec.n_concepts)) {
    throw std::invalid_argument("prevalence list must have one entry per concept");
  }
  for (double p : prevalence) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("prevalence values must lie in [0, 1]");
    }
  }

  Dataset ds;
  const int width = spec.n_samples >= 1000 ? 4 : 3;
  ds.sample_names.reserve(static_cast<std::size_t>(spec.n_samples));
  for (int s = 0; s < spec.n_samples; ++s) {
    std::string id = std::to_string(s + 1);
    while (static_cast<int>(id.size()) < width) id.insert(id.begin(), '0');
    ds.sample_names.push_back("s" + id);
  }
  for (int c = 0; c < spec.n_concepts; ++c) {
    ds.concept_names.push_back("c" + std::to_string(c + 1));
  }
  Rng rng(derive_seed(spec.seed, 0x64617461736574ULL));  // "dataset" salt
  ds.labels.reserve(static_cast<std::size_t>(spec.n_samples) *
                    static_cast<std::size_t>(spec.n_concepts));
  for (int s = 0; s < spec.n_samples; ++s) {
    for (int c = 0; c < spec.n_concepts; ++c) {
      ds.labels.push_back(rng.bernoulli(prevalence[static_cast<std::size_t>(c)]) ? 1 : 0);
    }
  }
  return ds;
}

QuestionPool::QuestionPool(const Dataset& dataset) {
  buckets_.resize(static_cast<std::size_t>(dataset.n_concepts()));
  for (int c = 0; c < dataset.n_concepts(); ++c) {
    for (int s = 0; s < dataset.n_samples(); ++s) {
      const int gt = dataset.label(s, c);
      buckets_[static_cast<std::size_t>(c)][static_cast<std::size_t>(gt)].push_back(
          Question{s, c, gt});
    }
  }
  remaining_ = static_cast<std::size_t>(dataset.n_samples()) *
               static_cast<std::size_t>(dataset.n_concepts());
}

void QuestionPool::remove(const Question& q) {
  if (q.concept_id < 0 || q.concept_id >= n_concepts() || (q.gt != 0 && q.gt != 1)) {
    throw std::invalid_argument("question outside this pool");
  }
  auto& bucket = buckets_[static_cast<std::size_t>(q.concept_id)][static_cast<std::size_t>(q.gt)];
  const auto it = std::find(bucket.begin(), bucket.end(), q);
  if (it == bucket.end()) {
    throw std::invalid_argument("question already removed from the pool");
  }
  *it = bucket.back();
  bucket.pop_back();
  --remaining_;
}

std::vector<Question> QuestionPool::all_remaining() const {
  std::vector<Question> all;
  all.reserve(remaining_);
  for (const auto& by_gt : buckets_) {
    for (const auto& bucket : by_gt) {
      all.insert(all.end(), bucket.begin(), bucket.end());
    }
  }
  return all;
}

std::vector<Question> candidate_set(const QuestionPool& pool,
                                    std::span<const gp::UncertaintySplit> splits) {
  const int n_concepts = pool.n_concepts();
  if (splits.size() != static_cast<std::size_t>(n_concepts)) {
    throw std::invalid_argument("need one uncertainty split per concept");
  }
  if (pool.empty()) return {};

  std::vector<int> order(static_cast<std::size_t>(n_concepts));
  for (int c = 0; c < n_concepts; ++c) order[static_cast<std::size_t>(c)] = c;
  auto peak = [&](int c) {
    const auto& s = splits[static_cast<std::size_t>(c)];
    return std::max(s.neg, s.pos);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return peak(a) > peak(b); });

  constexpr double kTieTolerance = 1e-12;
  std::vector<Question> candidates;
  std::size_t tier_start = 0;
  while (tier_start < order.size()) {
    // One tier: every concept whose peak ties the current maximum.
    const double tier_peak = peak(order[tier_start]);
    std::size_t tier_end = tier_start + 1;
    while (tier_end < order.size() &&
           tier_peak - peak(order[tier_end]) <= kTieTolerance) {
      ++tier_end;
    }
    // Preferred side first (gt = 0 when the negative half dominates or
    // ties, 1 otherwise), then the opposite side, then the next tier.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = tier_start; i < tier_end; ++i) {
        const int c = order[i];
        const auto& s = splits[static_cast<std::size_t>(c)];
        const int preferred = s.neg >= s.pos ? 0 : 1;
        const int gt = pass == 0 ? preferred : 1 - preferred;
        const auto& bucket = pool.bucket(c, gt);
        candidates.insert(candidates.end(), bucket.begin(), bucket.end());
      }
      if (!candidates.empty()) return candidates;
    }
    tier_start = tier_end;
  }
  return candidates;
}

}  // namespace vtt
