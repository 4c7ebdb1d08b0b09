#include "vfsl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vfsl/baselines.hpp"
#include "vfsl/rng.hpp"
#include "vfsl/sim_mapper.hpp"
#include "vfsl/similarity.hpp"

namespace vfsl {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::SiM: return "sim";
    case Method::Centroids: return "centroids";
    case Method::OneToOne: return "flm";
    case Method::BLM: return "blm";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "sim") return Method::SiM;
  if (name == "centroids") return Method::Centroids;
  if (name == "flm" || name == "one-to-one") return Method::OneToOne;
  if (name == "blm") return Method::BLM;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

void TaskSpec::validate() const {
  if (shots_per_class == 0) throw Error(ErrorCode::InvalidArgument, "shots_per_class must be >= 1");
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed is required");
}

void SyntheticSpec::validate() const {
  if (num_classes == 0) throw Error(ErrorCode::InvalidArgument, "num_classes must be >= 1");
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "dim must be >= 2");
  if (prompts == 0) throw Error(ErrorCode::InvalidArgument, "prompts must be >= 1");
  if (shots + test_per_class == 0) {
    throw Error(ErrorCode::InvalidArgument, "each class needs at least one item");
  }
  if (!(cluster_spread > 0.0) || !std::isfinite(cluster_spread)) {
    throw Error(ErrorCode::InvalidArgument, "cluster_spread must be > 0");
  }
}

void EvalReport::finalize() {
  std::sort(per_seed.begin(), per_seed.end(),
            [](const SeedResult& a, const SeedResult& b) { return a.seed < b.seed; });
  if (per_seed.empty()) {
    mean = 0.0;
    std = 0.0;
    return;
  }
  double sum = 0.0;
  for (const auto& r : per_seed) sum += r.accuracy;
  mean = sum / static_cast<double>(per_seed.size());
  if (per_seed.size() < 2) {
    std = 0.0;
    return;
  }
  double sq = 0.0;
  for (const auto& r : per_seed) sq += (r.accuracy - mean) * (r.accuracy - mean);
  std = std::sqrt(sq / static_cast<double>(per_seed.size() - 1));
}

double round_accuracy(double accuracy) { return std::round(accuracy * 10000.0) / 10000.0; }

ShotSet sample_shots(const LabelVector& labels, std::size_t shots_per_class, std::uint64_t seed) {
  labels.validate();
  if (shots_per_class == 0) throw Error(ErrorCode::InvalidArgument, "shots_per_class must be >= 1");

  std::vector<std::vector<std::size_t>> pools(labels.num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) pools[labels.labels[i]].push_back(i);

  Rng rng(seed);
  ShotSet out;
  out.shots_per_class = shots_per_class;
  out.labels.num_classes = labels.num_classes;
  for (std::size_t c = 0; c < pools.size(); ++c) {
    auto& pool = pools[c];
    if (pool.size() < shots_per_class) {
      throw Error(ErrorCode::NotEnoughItems,
                  "class " + std::to_string(c) + " has " + std::to_string(pool.size()) +
                      " items but " + std::to_string(shots_per_class) + " shots were requested");
    }
    // Partial Fisher-Yates: the first shots_per_class slots become the draw.
    for (std::size_t i = 0; i < shots_per_class; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(shots_per_class));
    for (std::size_t i = 0; i < shots_per_class; ++i) {
      out.indices.push_back(pool[i]);
      out.labels.labels.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return out;
}

ShotSet sample_shots(const EmbeddingMatrix& features, const LabelVector& labels,
                     std::size_t shots_per_class, std::uint64_t seed) {
  if (features.rows() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  return sample_shots(labels, shots_per_class, seed);
}

std::vector<std::size_t> held_out_indices(std::size_t total, const ShotSet& shots) {
  std::vector<bool> taken(total, false);
  for (std::size_t i : shots.indices) {
    if (i < total) taken[i] = true;
  }
  std::vector<std::size_t> out;
  out.reserve(total - std::min(total, shots.indices.size()));
  for (std::size_t i = 0; i < total; ++i) {
    if (!taken[i]) out.push_back(i);
  }
  return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t d = spec.dim;

  auto random_unit = [&](std::span<float> out) {
    std::vector<double> v(d);
    double sq = 0.0;
    do {
      sq = 0.0;
      for (auto& x : v) {
        x = rng.gaussian();
        sq += x * x;
      }
    } while (sq < 1e-24);
    const double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < d; ++i) out[i] = static_cast<float>(v[i] / norm);
  };

  MatrixD means(spec.num_classes, d);
  {
    DenseMatrix tmp(spec.num_classes, d);
    for (std::size_t c = 0; c < spec.num_classes; ++c) random_unit(tmp.row(c));
    means = cast<double>(tmp);
  }

  const std::size_t per_class = spec.shots + spec.test_per_class;
  const double sigma = spec.cluster_spread / std::sqrt(static_cast<double>(d));
  SyntheticData data;
  data.features.matrix = DenseMatrix(spec.num_classes * per_class, d);
  data.labels.num_classes = spec.num_classes;
  std::vector<double> v(d);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    const auto mean = means.row(c);
    for (std::size_t i = 0; i < per_class; ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        v[j] = mean[j] + sigma * rng.gaussian();
        sq += v[j] * v[j];
      }
      const double norm = std::sqrt(sq);
      auto out = data.features.matrix.row(c * per_class + i);
      for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(v[j] / norm);
      data.labels.labels.push_back(static_cast<std::uint32_t>(c));
    }
  }
  data.features.normalized = true;

  data.prompts.matrix = DenseMatrix(spec.prompts, d);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < spec.prompts; ++k) {
    random_unit(data.prompts.matrix.row(k));
    names.push_back("prompt_" + std::to_string(k));
  }
  data.prompts.names = std::move(names);
  data.prompts.normalized = true;
  return data;
}

namespace {

struct EvalInputs {
  const EmbeddingMatrix& train_features;
  const LabelVector& train_labels;
  const SimilarityMatrix& train_sims;
  // Test set: either explicit or derived from the held-out items.
  const EmbeddingMatrix* test_features;
  const LabelVector* test_labels;
  const SimilarityMatrix* test_sims;
};

double evaluate_seed(const TaskSpec& task, const EvalInputs& in, std::uint64_t seed) {
  const auto shots = sample_shots(in.train_labels, task.shots_per_class, seed);

  EmbeddingMatrix held_features;
  LabelVector held_labels;
  SimilarityMatrix held_sims;
  const EmbeddingMatrix* test_features = in.test_features;
  const LabelVector* test_labels = in.test_labels;
  const SimilarityMatrix* test_sims = in.test_sims;
  if (test_labels == nullptr) {
    const auto rest = held_out_indices(in.train_labels.size(), shots);
    if (rest.empty()) {
      throw Error(ErrorCode::NotEnoughItems, "no held-out items remain after sampling shots");
    }
    held_labels = select_labels(in.train_labels, rest);
    test_labels = &held_labels;
    if (task.method == Method::Centroids) {
      held_features = select_rows(in.train_features, rest);
      test_features = &held_features;
    } else {
      held_sims = select_rows(in.train_sims, rest);
      test_sims = &held_sims;
    }
  }

  ScoreMatrix scores;
  switch (task.method) {
    case Method::Centroids: {
      const auto model = fit_centroids(in.train_features, shots);
      scores = score(model, *test_features);
      break;
    }
    case Method::SiM: {
      SolverConfig config;
      if (task.lambda) config.lambda = *task.lambda;
      const auto model = fit(select_rows(in.train_sims, shots.indices), shots.labels, config);
      scores = score(model, *test_sims);
      break;
    }
    case Method::OneToOne: {
      const auto model = fit_flm(select_rows(in.train_sims, shots.indices), shots.labels);
      scores = score(model, *test_sims);
      break;
    }
    case Method::BLM: {
      const auto model =
          fit_blm(select_rows(in.train_sims, shots.indices), shots.labels, task.smoothing);
      scores = score(model, *test_sims);
      break;
    }
  }
  return round_accuracy(top1_accuracy(predict(scores), *test_labels));
}

EvalReport run(const TaskSpec& task, const EvalInputs& in) {
  EvalReport report;
  report.dataset = task.dataset;
  report.method = task.method;
  report.shots = task.shots_per_class;
  auto seeds = task.seeds;
  std::sort(seeds.begin(), seeds.end());
  for (auto seed : seeds) report.per_seed.push_back({seed, evaluate_seed(task, in, seed)});
  report.finalize();
  return report;
}

void check_inputs(const EmbeddingMatrix& features, const LabelVector& labels,
                  const EmbeddingMatrix& prompts) {
  if (features.rows() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  if (features.cols() != prompts.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "features and prompts differ in dimension");
  }
  labels.require_all_classes_present();
}

}  // namespace

EvalReport evaluate(const TaskSpec& task, const EmbeddingMatrix& features,
                    const LabelVector& labels, const EmbeddingMatrix& prompts) {
  task.validate();
  check_inputs(features, labels, prompts);
  SimilarityMatrix sims;
  if (task.method != Method::Centroids) sims = similarity_matrix(features, prompts);
  return run(task, EvalInputs{features, labels, sims, nullptr, nullptr, nullptr});
}

EvalReport evaluate(const TaskSpec& task, const EmbeddingMatrix& features,
                    const LabelVector& labels, const EmbeddingMatrix& prompts,
                    const EmbeddingMatrix& test_features, const LabelVector& test_labels) {
  task.validate();
  check_inputs(features, labels, prompts);
  if (test_features.rows() != test_labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "test features and test labels differ in length");
  }
  if (test_features.cols() != features.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "test features differ in dimension");
  }
  test_labels.validate();
  if (test_labels.num_classes > labels.num_classes) {
    throw Error(ErrorCode::InvalidLabel, "test labels use classes absent from training");
  }
  SimilarityMatrix sims, test_sims;
  if (task.method != Method::Centroids) {
    sims = similarity_matrix(features, prompts);
    test_sims = similarity_matrix(test_features, prompts);
  }
  return run(task,
             EvalInputs{features, labels, sims, &test_features, &test_labels, &test_sims});
}

}  // namespace vfsl
