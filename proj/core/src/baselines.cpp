#include "vfsl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace vfsl {

std::string_view to_string(AssignmentKind kind) noexcept {
  return kind == AssignmentKind::OneToOne ? "flm" : "blm";
}

CentroidModel fit_centroids(const EmbeddingMatrix& features, const ShotSet& shots) {
  if (!features.normalized) {
    throw Error(ErrorCode::NotNormalized, "centroid features must be L2-normalized");
  }
  if (shots.indices.size() != shots.labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "shot indices and labels differ in length");
  }
  shots.labels.require_all_classes_present();

  const std::size_t classes = shots.labels.num_classes;
  const std::size_t dim = features.cols();
  MatrixD sums(classes, dim);
  for (std::size_t j = 0; j < shots.indices.size(); ++j) {
    const std::size_t idx = shots.indices[j];
    if (idx >= features.rows()) {
      throw Error(ErrorCode::InvalidArgument, "shot index " + std::to_string(idx) + " out of range");
    }
    const auto row = features.matrix.row(idx);
    auto acc = sums.row(shots.labels.labels[j]);
    for (std::size_t d = 0; d < dim; ++d) acc[d] += row[d];
  }

  CentroidModel model;
  model.centroids.matrix = DenseMatrix(classes, dim);
  for (std::size_t c = 0; c < classes; ++c) {
    const auto acc = sums.row(c);
    double sq = 0.0;
    for (double v : acc) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) {
      throw Error(ErrorCode::ZeroNormRow,
                  "class " + std::to_string(c) + " shots average to the zero vector");
    }
    auto out = model.centroids.matrix.row(c);
    for (std::size_t d = 0; d < dim; ++d) out[d] = static_cast<float>(acc[d] / norm);
  }
  model.centroids.normalized = true;
  return model;
}

ScoreMatrix score(const CentroidModel& model, const EmbeddingMatrix& test_features) {
  const auto sims = similarity_matrix(test_features, model.centroids);
  return ScoreMatrix{cast<double>(sims.matrix)};
}

std::vector<std::size_t> zero_shot_predictions(const SimilarityMatrix& sims) {
  std::vector<std::size_t> out(sims.rows(), 0);
  for (std::size_t i = 0; i < sims.rows(); ++i) {
    const auto row = sims.matrix.row(i);
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k] > row[best]) best = k;
    }
    out[i] = best;
  }
  return out;
}

std::vector<std::vector<std::size_t>> prediction_frequencies(const SimilarityMatrix& sims,
                                                             const LabelVector& labels) {
  if (sims.rows() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(sims.rows()) + " similarity rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  labels.validate();
  std::vector<std::vector<std::size_t>> counts(labels.num_classes,
                                               std::vector<std::size_t>(sims.cols(), 0));
  const auto predicted = zero_shot_predictions(sims);
  for (std::size_t j = 0; j < predicted.size(); ++j) ++counts[labels.labels[j]][predicted[j]];
  return counts;
}

AssignmentModel one_to_one_from_mapping(std::vector<std::size_t> mapping, std::size_t prompts) {
  AssignmentModel model;
  model.kind = AssignmentKind::OneToOne;
  model.weights = MatrixD(prompts, mapping.size());
  std::vector<bool> used(prompts, false);
  for (std::size_t c = 0; c < mapping.size(); ++c) {
    if (mapping[c] >= prompts || used[mapping[c]]) {
      throw Error(ErrorCode::InvalidArgument, "one-to-one mapping must be injective into prompts");
    }
    used[mapping[c]] = true;
    model.weights(mapping[c], c) = 1.0;
  }
  model.mapping = std::move(mapping);
  return model;
}

AssignmentModel fit_flm(const SimilarityMatrix& train_sims, const LabelVector& labels) {
  labels.require_all_classes_present();
  const std::size_t classes = labels.num_classes;
  const std::size_t prompts = train_sims.cols();
  if (prompts < classes) {
    throw Error(ErrorCode::InsufficientPrompts,
                "one-to-one mapping needs K >= C, got K = " + std::to_string(prompts) +
                    ", C = " + std::to_string(classes));
  }
  const auto counts = prediction_frequencies(train_sims, labels);

  // Visiting (count desc, class asc, prompt asc) and taking every pair whose
  // class and prompt are both still free reproduces the step-wise greedy rule.
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> order;
  order.reserve(classes * prompts);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t k = 0; k < prompts; ++k) order.emplace_back(counts[c][k], c, k);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  std::vector<std::size_t> mapping(classes, 0);
  std::vector<bool> class_done(classes, false);
  std::vector<bool> prompt_used(prompts, false);
  std::size_t assigned = 0;
  for (const auto& [count, c, k] : order) {
    if (assigned == classes) break;
    if (class_done[c] || prompt_used[k]) continue;
    mapping[c] = k;
    class_done[c] = true;
    prompt_used[k] = true;
    ++assigned;
  }
  return one_to_one_from_mapping(std::move(mapping), prompts);
}

AssignmentModel fit_blm(const SimilarityMatrix& train_sims, const LabelVector& labels,
                        double smoothing) {
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
    throw Error(ErrorCode::InvalidArgument, "smoothing must be a finite non-negative number");
  }
  labels.require_all_classes_present();
  const std::size_t classes = labels.num_classes;
  const std::size_t prompts = train_sims.cols();
  const auto counts = prediction_frequencies(train_sims, labels);

  AssignmentModel model;
  model.kind = AssignmentKind::Bayesian;
  model.smoothing = smoothing;
  model.weights = MatrixD(prompts, classes);
  for (std::size_t k = 0; k < prompts; ++k) {
    std::size_t row_total = 0;
    for (std::size_t c = 0; c < classes; ++c) row_total += counts[c][k];
    const double denom = static_cast<double>(row_total) + smoothing * static_cast<double>(classes);
    if (denom == 0.0) continue;
    for (std::size_t c = 0; c < classes; ++c) {
      model.weights(k, c) = (static_cast<double>(counts[c][k]) + smoothing) / denom;
    }
  }
  return model;
}

ScoreMatrix score(const AssignmentModel& model, const SimilarityMatrix& test_sims) {
  if (test_sims.cols() != model.num_prompts()) {
    throw Error(ErrorCode::DimensionMismatch,
                "test similarities have " + std::to_string(test_sims.cols()) +
                    " prompt columns but the mapping expects " +
                    std::to_string(model.num_prompts()));
  }
  ScoreMatrix out{MatrixD(test_sims.rows(), model.num_classes())};
  if (model.kind == AssignmentKind::OneToOne) {
    for (std::size_t i = 0; i < test_sims.rows(); ++i) {
      for (std::size_t c = 0; c < model.mapping.size(); ++c) {
        out.matrix(i, c) = test_sims.matrix(i, model.mapping[c]);
      }
    }
    return out;
  }
  MappingModel as_linear;
  as_linear.weights = model.weights;
  as_linear.num_classes = model.num_classes();
  return vfsl::score(as_linear, test_sims);
}

}  // namespace vfsl
