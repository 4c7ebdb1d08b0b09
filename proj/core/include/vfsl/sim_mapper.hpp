#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfsl/matrix.hpp"
#include "vfsl/similarity.hpp"

namespace vfsl {

struct SolverConfig {
  /// Ridge weight on ||W||_F^2. Must be >= 0.
  double lambda = 1.0;
  /// With lambda == 0 and a singular normal matrix, the solver retries once
  /// with jitter * trace(L^T L) / K added to the diagonal.
  double jitter = 1e-8;
};

/// Learned similarity-to-class mapping W (K prompts x C classes).
struct MappingModel {
  MatrixD weights;
  double lambda = 0.0;
  /// Diagonal boost actually applied when recovering from a singular system.
  double jitter_applied = 0.0;
  std::optional<std::vector<std::string>> prompt_names;
  std::size_t num_classes = 0;

  std::size_t num_prompts() const noexcept { return weights.rows(); }
};

/// Per-item class scores (rows = items, cols = classes).
struct ScoreMatrix {
  MatrixD matrix;
};

/// N x C indicator matrix with a 1 at (j, labels[j]).
MatrixD one_hot(const LabelVector& labels);

/// Ridge solution W = (L^T L + lambda I_K)^{-1} L^T Y for the similarity
/// rows L of the shots and their one-hot labels Y.
///
/// The K x K normal matrix is accumulated in double from row blocks of L and
/// factored with a Cholesky decomposition. Throws SingularSystem when the
/// system cannot be factored (only reachable with lambda == 0, or when the
/// jittered retry also fails).
MappingModel fit(const SimilarityMatrix& train_sims, const LabelVector& labels,
                 const SolverConfig& config = {});

/// s_{i,c} = sum_k w_{k,c} l_{i,k}.
ScoreMatrix score(const MappingModel& model, const SimilarityMatrix& test_sims);

/// Row-wise argmax; ties go to the lowest class index.
LabelVector predict(const ScoreMatrix& scores);

/// Fraction of positions where predicted and truth agree.
double top1_accuracy(const LabelVector& predicted, const LabelVector& truth);

}  // namespace vfsl
