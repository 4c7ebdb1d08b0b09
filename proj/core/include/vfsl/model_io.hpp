#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "vfsl/baselines.hpp"
#include "vfsl/harness.hpp"
#include "vfsl/sim_mapper.hpp"

namespace vfsl {

/// Sidecar metadata stored next to a model's VFEB weights as `<prefix>.json`.
struct ModelMetadata {
  Method method = Method::SiM;
  std::size_t rows = 0;  // K prompts (or C centroids)
  std::size_t cols = 0;  // C classes (or d dims)
  std::size_t num_classes = 0;
  double lambda = 0.0;
  double jitter = 0.0;
  double smoothing = 0.0;
  /// ISO-8601 UTC; honours SOURCE_DATE_EPOCH for reproducible builds.
  std::string created;
  /// "fnv1a64:<hex>" of the prompt bank's VFEB encoding, or "unknown".
  std::string prompt_bank_digest = "unknown";
};

using AnyModel = std::variant<MappingModel, AssignmentModel, CentroidModel>;

struct StoredModel {
  ModelMetadata meta;
  AnyModel model;
};

std::filesystem::path weights_path(const std::filesystem::path& prefix);
std::filesystem::path metadata_path(const std::filesystem::path& prefix);

/// Weights go to VFEB as float32 (prompt names in the name block when known).
void save_model(const StoredModel& stored, const std::filesystem::path& prefix);
StoredModel load_model(const std::filesystem::path& prefix);

StoredModel make_stored(MappingModel model, std::string digest = "unknown");
StoredModel make_stored(AssignmentModel model, std::string digest = "unknown");
StoredModel make_stored(CentroidModel model, std::string digest = "unknown");

std::string metadata_to_json(const ModelMetadata& meta);
ModelMetadata metadata_from_json(std::string_view text);

std::string prompt_bank_digest(const EmbeddingMatrix& prompts);
std::string utc_timestamp();

/// Scores `input`: a similarity matrix for sim/flm/blm models, normalized
/// features for centroid models.
ScoreMatrix score_any(const StoredModel& stored, const EmbeddingMatrix& input);

}  // namespace vfsl
