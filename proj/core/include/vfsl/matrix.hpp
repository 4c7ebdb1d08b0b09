#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfsl/error.hpp"

namespace vfsl {

/// Dense row-major matrix with contiguous storage.
///
/// `Matrix<float>` is the on-disk precision for embeddings and similarity
/// scores; `Matrix<double>` holds solver outputs (weights, scores).
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "matrix data length does not equal rows * cols");
    }
  }

  /// Builds a matrix from nested rows; all rows must have equal length.
  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    std::vector<T> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) {
        throw Error(ErrorCode::RaggedRows, "rows have differing lengths");
      }
      data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<const T> values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using DenseMatrix = Matrix<float>;
using MatrixD = Matrix<double>;

/// Returns the matrix restricted to the listed rows, in the listed order.
template <typename T>
Matrix<T> select_rows(const Matrix<T>& m, std::span<const std::size_t> indices);

template <typename To, typename From>
Matrix<To> cast(const Matrix<From>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) out.data()[i] = static_cast<To>(m.data()[i]);
  return out;
}

/// Throws NonFiniteEntry when any entry is NaN or infinite.
template <typename T>
void require_finite(const Matrix<T>& m);

/// Rows of item vectors (image features or prompt embeddings).
struct EmbeddingMatrix {
  DenseMatrix matrix;
  std::optional<std::vector<std::string>> names;
  bool normalized = false;

  std::size_t rows() const noexcept { return matrix.rows(); }
  std::size_t cols() const noexcept { return matrix.cols(); }

  /// Checks shape, finiteness, name count and (when flagged) unit row norms
  /// within `norm_tolerance`.
  void validate(double norm_tolerance = 1e-3) const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

EmbeddingMatrix select_rows(const EmbeddingMatrix& m, std::span<const std::size_t> indices);

/// Class indices in [0, num_classes).
struct LabelVector {
  std::vector<std::uint32_t> labels;
  std::size_t num_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }

  /// Throws InvalidLabel if any label is out of range.
  void validate() const;
  /// Throws EmptyClass if some class in [0, num_classes) has no entry.
  void require_all_classes_present() const;
  std::vector<std::size_t> class_counts() const;

  /// Infers num_classes as max label + 1.
  static LabelVector from_labels(std::vector<std::uint32_t> labels);

  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

LabelVector select_labels(const LabelVector& labels, std::span<const std::size_t> indices);

/// Balanced few-shot support set: indices into an item matrix plus labels.
struct ShotSet {
  std::vector<std::size_t> indices;
  LabelVector labels;
  std::size_t shots_per_class = 0;

  void validate() const;

  friend bool operator==(const ShotSet&, const ShotSet&) = default;
};

}  // namespace vfsl
