#include "vfsl/similarity.hpp"

#include <cmath>

#include <Eigen/Core>

namespace vfsl {
namespace {

using RowMajorF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kMinNorm = 1e-12;
constexpr std::size_t kRowBlock = 256;

}  // namespace

EmbeddingMatrix l2_normalize(const EmbeddingMatrix& m) {
  if (m.matrix.empty()) throw Error(ErrorCode::EmptyMatrix, "cannot normalize an empty matrix");
  require_finite(m.matrix);
  EmbeddingMatrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = m.matrix.row(r);
    double sq = 0.0;
    for (float v : src) sq += static_cast<double>(v) * v;
    const double norm = std::sqrt(sq);
    if (norm < kMinNorm) {
      throw Error(ErrorCode::ZeroNormRow, "row " + std::to_string(r) + " has zero norm");
    }
    auto dst = out.matrix.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) {
      dst[c] = static_cast<float>(static_cast<double>(src[c]) / norm);
    }
  }
  out.normalized = true;
  return out;
}

SimilarityMatrix similarity_matrix(const EmbeddingMatrix& images, const EmbeddingMatrix& prompts) {
  if (images.cols() != prompts.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "image dimension " + std::to_string(images.cols()) +
                    " differs from prompt dimension " + std::to_string(prompts.cols()));
  }
  if (!images.normalized || !prompts.normalized) {
    throw Error(ErrorCode::NotNormalized,
                std::string(!images.normalized ? "images" : "prompts") +
                    " are not flagged as L2-normalized; run normalize first");
  }
  if (images.matrix.empty() || prompts.matrix.empty()) {
    throw Error(ErrorCode::EmptyMatrix, "similarity inputs must be non-empty");
  }

  const auto n = static_cast<Eigen::Index>(images.rows());
  const auto k = static_cast<Eigen::Index>(prompts.rows());
  const auto d = static_cast<Eigen::Index>(images.cols());
  const RowMajorD prompts_d =
      Eigen::Map<const RowMajorF>(prompts.matrix.data(), k, d).cast<double>();

  SimilarityMatrix out;
  out.matrix = DenseMatrix(images.rows(), prompts.rows());
  Eigen::Map<const RowMajorF> image_map(images.matrix.data(), n, d);
  Eigen::Map<RowMajorF> out_map(out.matrix.data(), n, k);
  for (Eigen::Index start = 0; start < n; start += kRowBlock) {
    const auto rows = std::min<Eigen::Index>(kRowBlock, n - start);
    const RowMajorD block = image_map.middleRows(start, rows).cast<double>();
    const RowMajorD sims = block * prompts_d.transpose();
    out_map.middleRows(start, rows) = sims.cast<float>();
  }
  out.image_names = images.names;
  out.prompt_names = prompts.names;
  return out;
}

SimilarityMatrix as_similarity(const EmbeddingMatrix& m) {
  if (m.matrix.empty()) throw Error(ErrorCode::EmptyMatrix, "similarity matrix is empty");
  require_finite(m.matrix);
  SimilarityMatrix s;
  s.matrix = m.matrix;
  s.image_names = m.names;
  return s;
}

EmbeddingMatrix to_embedding(const SimilarityMatrix& s) {
  EmbeddingMatrix m;
  m.matrix = s.matrix;
  m.names = s.image_names;
  return m;
}

SimilarityMatrix select_rows(const SimilarityMatrix& s, std::span<const std::size_t> indices) {
  SimilarityMatrix out;
  out.matrix = select_rows(s.matrix, indices);
  out.prompt_names = s.prompt_names;
  if (s.image_names) {
    std::vector<std::string> names;
    for (std::size_t i : indices) names.push_back((*s.image_names)[i]);
    out.image_names = std::move(names);
  }
  return out;
}

}  // namespace vfsl
