#include "vfsl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace vfsl {

template <typename T>
Matrix<T> select_rows(const Matrix<T>& m, std::span<const std::size_t> indices) {
  Matrix<T> out(indices.size(), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= m.rows()) {
      throw Error(ErrorCode::InvalidArgument,
                  "row index " + std::to_string(indices[i]) + " out of range");
    }
    const auto src = m.row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

template Matrix<float> select_rows(const Matrix<float>&, std::span<const std::size_t>);
template Matrix<double> select_rows(const Matrix<double>&, std::span<const std::size_t>);

template <typename T>
void require_finite(const Matrix<T>& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) {
      throw Error(ErrorCode::NonFiniteEntry,
                  "non-finite entry at row " + std::to_string(i / m.cols()) + ", column " +
                      std::to_string(i % m.cols()));
    }
  }
}

template void require_finite(const Matrix<float>&);
template void require_finite(const Matrix<double>&);

void EmbeddingMatrix::validate(double norm_tolerance) const {
  if (matrix.empty()) {
    throw Error(ErrorCode::EmptyMatrix, "embedding matrix has zero rows or columns");
  }
  require_finite(matrix);
  if (names && names->size() != matrix.rows()) {
    throw Error(ErrorCode::NameCountMismatch,
                std::to_string(names->size()) + " names for " + std::to_string(matrix.rows()) +
                    " rows");
  }
  if (normalized) {
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      double sq = 0.0;
      for (float v : matrix.row(r)) sq += static_cast<double>(v) * v;
      if (std::abs(std::sqrt(sq) - 1.0) > norm_tolerance) {
        throw Error(ErrorCode::NotNormalized,
                    "row " + std::to_string(r) + " is flagged normalized but has norm " +
                        std::to_string(std::sqrt(sq)));
      }
    }
  }
}

EmbeddingMatrix select_rows(const EmbeddingMatrix& m, std::span<const std::size_t> indices) {
  EmbeddingMatrix out;
  out.matrix = select_rows(m.matrix, indices);
  out.normalized = m.normalized;
  if (m.names) {
    std::vector<std::string> names;
    names.reserve(indices.size());
    for (std::size_t i : indices) names.push_back((*m.names)[i]);
    out.names = std::move(names);
  }
  return out;
}

void LabelVector::validate() const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw Error(ErrorCode::InvalidLabel,
                  "label " + std::to_string(labels[i]) + " at position " + std::to_string(i) +
                      " is not below num_classes " + std::to_string(num_classes));
    }
  }
}

std::vector<std::size_t> LabelVector::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (auto label : labels) {
    if (label < num_classes) ++counts[label];
  }
  return counts;
}

void LabelVector::require_all_classes_present() const {
  validate();
  if (num_classes == 0) {
    throw Error(ErrorCode::EmptyClass, "label vector declares zero classes");
  }
  const auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::EmptyClass, "class " + std::to_string(c) + " has no examples");
    }
  }
}

LabelVector LabelVector::from_labels(std::vector<std::uint32_t> labels) {
  LabelVector out;
  out.num_classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1u;
  out.labels = std::move(labels);
  return out;
}

LabelVector select_labels(const LabelVector& labels, std::span<const std::size_t> indices) {
  LabelVector out;
  out.num_classes = labels.num_classes;
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= labels.size()) {
      throw Error(ErrorCode::InvalidArgument, "label index out of range");
    }
    out.labels.push_back(labels.labels[i]);
  }
  return out;
}

void ShotSet::validate() const {
  if (indices.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "shot indices and labels differ in length");
  }
  labels.validate();
  std::unordered_set<std::size_t> seen;
  for (std::size_t i : indices) {
    if (!seen.insert(i).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate shot index " + std::to_string(i));
    }
  }
  for (std::size_t count : labels.class_counts()) {
    if (count != shots_per_class) {
      throw Error(ErrorCode::InvalidArgument, "shot set is not balanced");
    }
  }
}

}  // namespace vfsl
