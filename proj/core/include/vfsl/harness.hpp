#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfsl/matrix.hpp"

namespace vfsl {

enum class Method { SiM, Centroids, OneToOne, BLM };

std::string_view to_string(Method method) noexcept;
/// Accepts "sim", "centroids", "flm" (alias "one-to-one") and "blm".
Method parse_method(std::string_view name);

struct TaskSpec {
  std::size_t shots_per_class = 16;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  Method method = Method::SiM;
  /// Ridge weight for SiM; defaults to SolverConfig's lambda.
  std::optional<double> lambda;
  /// Laplace smoothing for BLM.
  double smoothing = 1.0;
  std::string dataset = "dataset";

  void validate() const;
};

struct SeedResult {
  std::uint64_t seed = 0;
  /// Top-1 accuracy rounded to 4 decimal places.
  double accuracy = 0.0;

  friend bool operator==(const SeedResult&, const SeedResult&) = default;
};

struct EvalReport {
  std::string dataset;
  Method method = Method::SiM;
  std::size_t shots = 0;
  /// Sorted by seed.
  std::vector<SeedResult> per_seed;
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single seed.
  double std = 0.0;

  /// Sorts per_seed and recomputes mean/std.
  void finalize();
};

struct SyntheticSpec {
  std::size_t num_classes = 5;
  std::size_t dim = 64;
  std::size_t prompts = 50;
  std::size_t shots = 16;
  std::size_t test_per_class = 50;
  /// Approximate RMS angle (radians) between an item and its class mean:
  /// isotropic Gaussian noise with per-coordinate deviation spread / sqrt(dim).
  double cluster_spread = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  /// Class-major: shots + test_per_class consecutive rows per class.
  EmbeddingMatrix features;
  LabelVector labels;
  EmbeddingMatrix prompts;
};

double round_accuracy(double accuracy);

/// Balanced without-replacement draw of `shots_per_class` items per class.
/// The result lists classes in ascending order and, within a class, item
/// indices in ascending order. Throws NotEnoughItems when a class is short.
ShotSet sample_shots(const LabelVector& labels, std::size_t shots_per_class, std::uint64_t seed);
ShotSet sample_shots(const EmbeddingMatrix& features, const LabelVector& labels,
                     std::size_t shots_per_class, std::uint64_t seed);

/// Items not in the shot set, ascending.
std::vector<std::size_t> held_out_indices(std::size_t total, const ShotSet& shots);

SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Per seed: sample shots, fit the method on them and score every remaining item.
EvalReport evaluate(const TaskSpec& task, const EmbeddingMatrix& features,
                    const LabelVector& labels, const EmbeddingMatrix& prompts);

/// Same, but scores a separate test set instead of the held-out items.
EvalReport evaluate(const TaskSpec& task, const EmbeddingMatrix& features,
                    const LabelVector& labels, const EmbeddingMatrix& prompts,
                    const EmbeddingMatrix& test_features, const LabelVector& test_labels);

}  // namespace vfsl
