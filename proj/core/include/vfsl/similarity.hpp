#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfsl/matrix.hpp"

namespace vfsl {

/// N x K matrix of dot products between unit image features (rows) and
/// unit prompt embeddings (columns).
struct SimilarityMatrix {
  DenseMatrix matrix;
  std::optional<std::vector<std::string>> image_names;
  std::optional<std::vector<std::string>> prompt_names;

  std::size_t rows() const noexcept { return matrix.rows(); }
  std::size_t cols() const noexcept { return matrix.cols(); }
};

/// Scales every row to unit L2 norm. Throws ZeroNormRow for rows with norm
/// below 1e-12.
EmbeddingMatrix l2_normalize(const EmbeddingMatrix& m);

/// Entry (i, k) = <images_i, prompts_k>, accumulated in double. Both inputs
/// must carry the normalized flag; nothing is rescaled here.
SimilarityMatrix similarity_matrix(const EmbeddingMatrix& images, const EmbeddingMatrix& prompts);

/// Wraps a stored similarity matrix (e.g. a VFEB file whose rows are images).
SimilarityMatrix as_similarity(const EmbeddingMatrix& m);
/// Rows of the similarity matrix as an (unnormalized) embedding matrix, for storage.
EmbeddingMatrix to_embedding(const SimilarityMatrix& s);

SimilarityMatrix select_rows(const SimilarityMatrix& s, std::span<const std::size_t> indices);

}  // namespace vfsl
