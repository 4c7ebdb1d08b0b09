#include "vfsl/sim_mapper.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace vfsl {
namespace {

using RowMajorF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr Eigen::Index kRowBlock = 512;

Eigen::Map<const RowMajorF> view(const DenseMatrix& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

// Lower triangle of L^T L, accumulated in double one row block at a time so
// that only the K x K result is held in double precision.
void accumulate_gram(const DenseMatrix& l, Eigen::MatrixXd& gram) {
  const auto sims = view(l);
  const auto k = sims.cols();
  gram.setZero(k, k);
  for (Eigen::Index start = 0; start < sims.rows(); start += kRowBlock) {
    const auto rows = std::min(kRowBlock, sims.rows() - start);
    const Eigen::MatrixXd block = sims.middleRows(start, rows).cast<double>().transpose();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(block);
  }
}

// With lambda == 0 a factorization can "succeed" on a numerically singular
// matrix; treat a pivot spread beyond what double precision resolves as failure.
bool well_conditioned(const Eigen::MatrixXd& factor) {
  const auto diag = factor.diagonal().cwiseAbs();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  if (!(hi > 0.0) || !std::isfinite(hi)) return false;
  const double ratio = (lo / hi) * (lo / hi);
  return ratio > static_cast<double>(factor.rows()) * std::numeric_limits<double>::epsilon();
}

}  // namespace

MatrixD one_hot(const LabelVector& labels) {
  labels.validate();
  MatrixD y(labels.size(), labels.num_classes);
  for (std::size_t j = 0; j < labels.size(); ++j) y(j, labels.labels[j]) = 1.0;
  return y;
}

MappingModel fit(const SimilarityMatrix& train_sims, const LabelVector& labels,
                 const SolverConfig& config) {
  if (train_sims.rows() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(train_sims.rows()) + " similarity rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  if (train_sims.matrix.empty()) {
    throw Error(ErrorCode::EmptyMatrix, "training similarity matrix is empty");
  }
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be a finite non-negative number");
  }
  if (!(config.jitter >= 0.0) || !std::isfinite(config.jitter)) {
    throw Error(ErrorCode::InvalidArgument, "jitter must be a finite non-negative number");
  }
  labels.require_all_classes_present();
  require_finite(train_sims.matrix);

  const auto k = static_cast<Eigen::Index>(train_sims.cols());
  const auto c = static_cast<Eigen::Index>(labels.num_classes);
  const auto sims = view(train_sims.matrix);

  // L^T Y: column c sums the similarity rows of the shots labelled c.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k, c);
  for (Eigen::Index j = 0; j < sims.rows(); ++j) {
    rhs.col(labels.labels[static_cast<std::size_t>(j)]) += sims.row(j).cast<double>().transpose();
  }

  Eigen::MatrixXd gram;
  accumulate_gram(train_sims.matrix, gram);
  const double trace = gram.diagonal().sum();
  gram.diagonal().array() += config.lambda;

  double jitter_applied = 0.0;
  bool ok = false;
  {
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(gram);
    ok = llt.info() == Eigen::Success && (config.lambda > 0.0 || well_conditioned(gram));
    if (ok) llt.solveInPlace(rhs);
  }
  if (!ok && config.lambda == 0.0) {
    jitter_applied = config.jitter * trace / static_cast<double>(k);
    if (jitter_applied > 0.0 && std::isfinite(jitter_applied)) {
      accumulate_gram(train_sims.matrix, gram);
      gram.diagonal().array() += jitter_applied;
      Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(gram);
      ok = llt.info() == Eigen::Success && well_conditioned(gram);
      if (ok) llt.solveInPlace(rhs);
    }
  }
  if (!ok) {
    throw Error(ErrorCode::SingularSystem,
                "normal matrix L^T L + lambda I is not positive definite (lambda = " +
                    std::to_string(config.lambda) + ")");
  }

  MappingModel model;
  model.weights = MatrixD(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
  Eigen::Map<RowMajorD>(model.weights.data(), k, c) = rhs;
  for (double w : model.weights.values()) {
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::SingularSystem, "solution contains non-finite weights");
    }
  }
  model.lambda = config.lambda;
  model.jitter_applied = jitter_applied;
  model.prompt_names = train_sims.prompt_names;
  model.num_classes = labels.num_classes;
  return model;
}

ScoreMatrix score(const MappingModel& model, const SimilarityMatrix& test_sims) {
  if (test_sims.cols() != model.weights.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "test similarities have " + std::to_string(test_sims.cols()) +
                    " prompt columns but the model expects " +
                    std::to_string(model.weights.rows()));
  }
  const auto n = static_cast<Eigen::Index>(test_sims.rows());
  const auto k = static_cast<Eigen::Index>(model.weights.rows());
  const auto c = static_cast<Eigen::Index>(model.weights.cols());
  Eigen::Map<const RowMajorD> w(model.weights.data(), k, c);

  ScoreMatrix out{MatrixD(test_sims.rows(), model.weights.cols())};
  Eigen::Map<RowMajorD> scores(out.matrix.data(), n, c);
  const auto sims = view(test_sims.matrix);
  for (Eigen::Index start = 0; start < n; start += kRowBlock) {
    const auto rows = std::min(kRowBlock, n - start);
    scores.middleRows(start, rows).noalias() = sims.middleRows(start, rows).cast<double>() * w;
  }
  return out;
}

LabelVector predict(const ScoreMatrix& scores) {
  const auto& m = scores.matrix;
  if (m.empty()) throw Error(ErrorCode::EmptyMatrix, "cannot predict from an empty score matrix");
  LabelVector out;
  out.num_classes = m.cols();
  out.labels.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    out.labels[i] = static_cast<std::uint32_t>(best);
  }
  return out;
}

double top1_accuracy(const LabelVector& predicted, const LabelVector& truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and truth lengths differ");
  }
  if (truth.size() == 0) throw Error(ErrorCode::EmptyMatrix, "no items to score");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted.labels[i] == truth.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

}  // namespace vfsl
