#include "vtt/mue.hpp"

#include <cmath>
#include <stdexcept>

#include "vtt/csv.hpp"

namespace vtt {

int most_common_concept(const Dataset& dataset) {
  if (dataset.n_concepts() < 1) {
    throw std::invalid_argument("dataset has no concepts");
  }
  int best = 0;
  std::uint64_t best_count = dataset.positives(0);
  for (int c = 1; c < dataset.n_concepts(); ++c) {
    const std::uint64_t count = dataset.positives(c);
    if (count > best_count) {
      best = c;
      best_count = count;
    }
  }
  return best;
}

void ConfidenceDistribution::validate() const {
  switch (kind) {
    case ConfidenceKind::uniform_half:
      return;
    case ConfidenceKind::fixed:
      if (!(value > 0.5 && value <= 1.0)) {
        throw std::invalid_argument("fixed confidence must lie in (0.5, 1]");
      }
      return;
    case ConfidenceKind::beta_folded:
      if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("beta confidence parameters must be positive");
      }
      return;
  }
  throw std::invalid_argument("unknown confidence distribution");
}

void SyntheticMuESpec::validate() const {
  if (accuracy_by_concept.empty()) {
    throw std::invalid_argument("synthetic MuE needs at least one concept accuracy");
  }
  for (double acc : accuracy_by_concept) {
    if (!(acc > 0.0 && acc <= 1.0)) {
      throw std::invalid_argument("accuracy must lie in (0, 1]");
    }
  }
  confidence.validate();
}

SyntheticMuESpec SyntheticMuESpec::uniform(double accuracy, int n_concepts,
                                           std::uint64_t seed) {
  SyntheticMuESpec spec;
  spec.accuracy_by_concept.assign(static_cast<std::size_t>(n_concepts), accuracy);
  spec.seed = seed;
  spec.validate();
  return spec;
}

SyntheticMuESpec SyntheticMuESpec::biased(const Dataset& dataset, double common_accuracy,
                                          double other_accuracy, std::uint64_t seed) {
  SyntheticMuESpec spec;
  spec.accuracy_by_concept.assign(static_cast<std::size_t>(dataset.n_concepts()),
                                  other_accuracy);
  spec.accuracy_by_concept[static_cast<std::size_t>(most_common_concept(dataset))] =
      common_accuracy;
  spec.seed = seed;
  spec.validate();
  return spec;
}

namespace {

// Confidence for the "Yes" half (0.5, 1]; the "No" half mirrors it.
double draw_yes_confidence(const ConfidenceDistribution& dist, Rng& rng) {
  switch (dist.kind) {
    case ConfidenceKind::uniform_half:
      return 1.0 - rng.uniform01() / 2.0;  // (0.5, 1]
    case ConfidenceKind::fixed:
      return dist.value;
    case ConfidenceKind::beta_folded: {
      const double x = rng.beta(dist.alpha, dist.beta);
      double p = 0.5 + x / 2.0;
      if (p <= 0.5) p = std::nextafter(0.5, 1.0);  // keep off the boundary
      return p > 1.0 ? 1.0 : p;
    }
  }
  throw std::invalid_argument("unknown confidence distribution");
}

}  // namespace

double synthetic_answer(const SyntheticMuESpec& spec, const Question& q, Rng& rng) {
  if (q.concept_id < 0 ||
      static_cast<std::size_t>(q.concept_id) >= spec.accuracy_by_concept.size()) {
    throw std::invalid_argument("synthetic MuE has no accuracy for concept " +
                                std::to_string(q.concept_id));
  }
  const double accuracy = spec.accuracy_by_concept[static_cast<std::size_t>(q.concept_id)];
  const bool correct = rng.bernoulli(accuracy);
  const bool yes_side = (q.gt == 1) == correct;
  const double confidence = draw_yes_confidence(spec.confidence, rng);
  return yes_side ? confidence : 1.0 - confidence;
}

SyntheticMuE::SyntheticMuE(SyntheticMuESpec spec)
    : spec_(std::move(spec)), rng_(spec_.seed) {
  spec_.validate();
}

double SyntheticMuE::answer(const Question& q) {
  return synthetic_answer(spec_, q, rng_);
}

ProbabilityMatrix load_probability_matrix(const std::filesystem::path& path) {
  const auto rows = csv::read_rows(path);
  if (rows.empty()) {
    throw csv::FormatError("probability matrix file is empty", 1);
  }
  const auto& [header_line, header] = rows.front();
  if (header.size() < 2 || header[0] != "sample_id") {
    throw csv::FormatError("header must be 'sample_id,<concept>,...'", header_line);
  }
  ProbabilityMatrix matrix;
  matrix.concept_names.assign(header.begin() + 1, header.end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    if (cells.size() != header.size()) {
      throw csv::FormatError("expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()),
                             line_no);
    }
    matrix.sample_names.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double p;
      try {
        p = csv::parse_double(cells[c]);
      } catch (const std::invalid_argument&) {
        throw csv::FormatError("probability cell is not a number: '" + cells[c] + "'",
                               line_no);
      }
      if (!(p >= 0.0 && p <= 1.0)) {
        throw csv::FormatError("probability outside [0, 1]: " + cells[c], line_no);
      }
      matrix.prob.push_back(p);
    }
  }
  return matrix;
}

double matrix_answer(const ProbabilityMatrix& matrix, const std::string& sample_name,
                     const std::string& concept_name) {
  for (std::size_t s = 0; s < matrix.sample_names.size(); ++s) {
    if (matrix.sample_names[s] != sample_name) continue;
    for (std::size_t c = 0; c < matrix.concept_names.size(); ++c) {
      if (matrix.concept_names[c] == concept_name) {
        return matrix.prob[s * matrix.concept_names.size() + c];
      }
    }
    break;
  }
  throw AdapterError("probability matrix has no entry for (" + sample_name + ", " +
                     concept_name + ")");
}

MatrixMuE::MatrixMuE(ProbabilityMatrix matrix, const Dataset& dataset)
    : matrix_(std::move(matrix)), dataset_(dataset) {
  for (std::size_t s = 0; s < matrix_.sample_names.size(); ++s) {
    sample_index_.emplace(matrix_.sample_names[s], s);
  }
  for (std::size_t c = 0; c < matrix_.concept_names.size(); ++c) {
    concept_index_.emplace(matrix_.concept_names[c], c);
  }
}

double MatrixMuE::answer(const Question& q) {
  const auto& sample_name = dataset_.sample_names[static_cast<std::size_t>(q.sample)];
  const auto& concept_name =
      dataset_.concept_names[static_cast<std::size_t>(q.concept_id)];
  const auto s = sample_index_.find(sample_name);
  const auto c = concept_index_.find(concept_name);
  if (s == sample_index_.end() || c == concept_index_.end()) {
    throw AdapterError("probability matrix has no entry for (" + sample_name + ", " +
                       concept_name + ")");
  }
  return matrix_.prob[s->second * matrix_.concept_names.size() + c->second];
}

}  // namespace vtt
