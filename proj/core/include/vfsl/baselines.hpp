#pragma once

#include <string_view>
#include <vector>

#include "vfsl/matrix.hpp"
#include "vfsl/sim_mapper.hpp"
#include "vfsl/similarity.hpp"

namespace vfsl {

/// Nearest-class-mean classifier in embedding space.
struct CentroidModel {
  /// C x d, one unit-norm row per class.
  EmbeddingMatrix centroids;

  std::size_t num_classes() const noexcept { return centroids.rows(); }
};

enum class AssignmentKind { OneToOne, Bayesian };

std::string_view to_string(AssignmentKind kind) noexcept;

/// Label mapping from prompt scores to classes.
///
/// Both kinds are expressed as a K x C weight matrix applied to similarity
/// rows. For OneToOne the matrix is the indicator of `mapping` (column c has
/// a single 1 at row mapping[c]); for Bayesian it holds the conditional
/// weights.
struct AssignmentModel {
  AssignmentKind kind = AssignmentKind::OneToOne;
  /// OneToOne only: mapping[c] is the prompt assigned to class c.
  std::vector<std::size_t> mapping;
  MatrixD weights;
  double smoothing = 0.0;

  std::size_t num_prompts() const noexcept { return weights.rows(); }
  std::size_t num_classes() const noexcept { return weights.cols(); }
};

/// Centroid c is the L2-normalized mean of the shot features labelled c.
CentroidModel fit_centroids(const EmbeddingMatrix& features, const ShotSet& shots);

/// Class scores for (normalized) test features: cosine to each centroid.
ScoreMatrix score(const CentroidModel& model, const EmbeddingMatrix& test_features);

/// Zero-shot prompt prediction per row (argmax over prompts, lowest index wins).
std::vector<std::size_t> zero_shot_predictions(const SimilarityMatrix& sims);

/// C x K table of how often shots of class c are zero-shot predicted as prompt k.
std::vector<std::vector<std::size_t>> prediction_frequencies(const SimilarityMatrix& sims,
                                                             const LabelVector& labels);

/// Frequency label mapping: greedy injective class-to-prompt assignment by
/// descending prediction frequency. Ties go to the lower class index, then
/// the lower prompt index. Throws InsufficientPrompts when K < C.
AssignmentModel fit_flm(const SimilarityMatrix& train_sims, const LabelVector& labels);

/// Count-based Bayesian label mapping with Laplace smoothing:
/// weight(k, c) = (n(k,c) + s) / (n(k,.) + s C). Rows with no predictions and
/// s = 0 get all-zero weights.
AssignmentModel fit_blm(const SimilarityMatrix& train_sims, const LabelVector& labels,
                        double smoothing = 1.0);

/// Test scores = test_sims x weights.
ScoreMatrix score(const AssignmentModel& model, const SimilarityMatrix& test_sims);

/// Builds a OneToOne model from an explicit mapping over K prompts.
AssignmentModel one_to_one_from_mapping(std::vector<std::size_t> mapping, std::size_t prompts);

}  // namespace vfsl
