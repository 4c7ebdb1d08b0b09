#include "vfsl/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#include <json.hpp>

#include "vfsl/vfeb.hpp"

namespace vfsl {
namespace {

constexpr int kMetadataVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

EmbeddingMatrix weights_to_embedding(const MatrixD& w,
                                     const std::optional<std::vector<std::string>>& names) {
  EmbeddingMatrix m;
  m.matrix = cast<float>(w);
  m.names = names;
  return m;
}

}  // namespace

std::filesystem::path weights_path(const std::filesystem::path& prefix) {
  auto p = prefix;
  p += ".vfeb";
  return p;
}

std::filesystem::path metadata_path(const std::filesystem::path& prefix) {
  auto p = prefix;
  p += ".json";
  return p;
}

std::string prompt_bank_digest(const EmbeddingMatrix& prompts) {
  const auto bytes = encode_vfeb(prompts);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return "fnv1a64:" + hex64(h);
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    long long value = 0;
    const auto* end = epoch + std::char_traits<char>::length(epoch);
    const auto [ptr, ec] = std::from_chars(epoch, end, value);
    if (ec == std::errc{} && ptr == end) now = static_cast<std::time_t>(value);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

StoredModel make_stored(MappingModel model, std::string digest) {
  ModelMetadata meta;
  meta.method = Method::SiM;
  meta.rows = model.weights.rows();
  meta.cols = model.weights.cols();
  meta.num_classes = model.num_classes;
  meta.lambda = model.lambda;
  meta.jitter = model.jitter_applied;
  meta.created = utc_timestamp();
  meta.prompt_bank_digest = std::move(digest);
  return {std::move(meta), std::move(model)};
}

StoredModel make_stored(AssignmentModel model, std::string digest) {
  ModelMetadata meta;
  meta.method = model.kind == AssignmentKind::OneToOne ? Method::OneToOne : Method::BLM;
  meta.rows = model.weights.rows();
  meta.cols = model.weights.cols();
  meta.num_classes = model.num_classes();
  meta.smoothing = model.smoothing;
  meta.created = utc_timestamp();
  meta.prompt_bank_digest = std::move(digest);
  return {std::move(meta), std::move(model)};
}

StoredModel make_stored(CentroidModel model, std::string digest) {
  ModelMetadata meta;
  meta.method = Method::Centroids;
  meta.rows = model.centroids.rows();
  meta.cols = model.centroids.cols();
  meta.num_classes = model.num_classes();
  meta.created = utc_timestamp();
  meta.prompt_bank_digest = std::move(digest);
  return {std::move(meta), std::move(model)};
}

std::string metadata_to_json(const ModelMetadata& meta) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kMetadataVersion;
  doc["method"] = std::string(to_string(meta.method));
  doc["rows"] = meta.rows;
  doc["cols"] = meta.cols;
  doc["num_classes"] = meta.num_classes;
  doc["lambda"] = meta.lambda;
  doc["jitter"] = meta.jitter;
  doc["smoothing"] = meta.smoothing;
  doc["created"] = meta.created;
  doc["prompt_bank_digest"] = meta.prompt_bank_digest;
  return doc.dump(2) + "\n";
}

ModelMetadata metadata_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format_version").get<int>() != kMetadataVersion) {
      throw Error(ErrorCode::BadMetadata, "unsupported model metadata version");
    }
    ModelMetadata meta;
    meta.method = parse_method(doc.at("method").get<std::string>());
    meta.rows = doc.at("rows").get<std::size_t>();
    meta.cols = doc.at("cols").get<std::size_t>();
    meta.num_classes = doc.at("num_classes").get<std::size_t>();
    meta.lambda = doc.value("lambda", 0.0);
    meta.jitter = doc.value("jitter", 0.0);
    meta.smoothing = doc.value("smoothing", 0.0);
    meta.created = doc.value("created", std::string{});
    meta.prompt_bank_digest = doc.value("prompt_bank_digest", std::string{"unknown"});
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadMetadata, std::string("invalid model metadata: ") + e.what());
  }
}

void save_model(const StoredModel& stored, const std::filesystem::path& prefix) {
  const EmbeddingMatrix weights = std::visit(
      [](const auto& model) -> EmbeddingMatrix {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, MappingModel>) {
          return weights_to_embedding(model.weights, model.prompt_names);
        } else if constexpr (std::is_same_v<T, AssignmentModel>) {
          return weights_to_embedding(model.weights, std::nullopt);
        } else {
          return model.centroids;
        }
      },
      stored.model);
  write_vfeb(weights, weights_path(prefix));
  write_file(metadata_path(prefix), metadata_to_json(stored.meta));
}

StoredModel load_model(const std::filesystem::path& prefix) {
  StoredModel stored;
  stored.meta = metadata_from_json(read_file(metadata_path(prefix)));
  auto weights = read_vfeb(weights_path(prefix));
  const auto& meta = stored.meta;
  if (weights.rows() != meta.rows || weights.cols() != meta.cols) {
    throw Error(ErrorCode::BadMetadata, "weights shape disagrees with model metadata");
  }

  switch (meta.method) {
    case Method::SiM: {
      MappingModel m;
      m.weights = cast<double>(weights.matrix);
      m.lambda = meta.lambda;
      m.jitter_applied = meta.jitter;
      m.prompt_names = std::move(weights.names);
      m.num_classes = meta.num_classes;
      stored.model = std::move(m);
      break;
    }
    case Method::OneToOne: {
      std::vector<std::size_t> mapping(weights.cols(), weights.rows());
      for (std::size_t k = 0; k < weights.rows(); ++k) {
        for (std::size_t c = 0; c < weights.cols(); ++c) {
          const float v = weights.matrix(k, c);
          if (v == 1.0f) {
            if (mapping[c] != weights.rows()) {
              throw Error(ErrorCode::BadMetadata, "one-to-one column has several prompts");
            }
            mapping[c] = k;
          } else if (v != 0.0f) {
            throw Error(ErrorCode::BadMetadata, "one-to-one weights must be 0/1 indicators");
          }
        }
      }
      for (auto k : mapping) {
        if (k == weights.rows()) throw Error(ErrorCode::BadMetadata, "class without a prompt");
      }
      stored.model = one_to_one_from_mapping(std::move(mapping), weights.rows());
      break;
    }
    case Method::BLM: {
      AssignmentModel m;
      m.kind = AssignmentKind::Bayesian;
      m.weights = cast<double>(weights.matrix);
      m.smoothing = meta.smoothing;
      stored.model = std::move(m);
      break;
    }
    case Method::Centroids: {
      if (!weights.normalized) {
        throw Error(ErrorCode::NotNormalized, "stored centroids are not flagged normalized");
      }
      stored.model = CentroidModel{std::move(weights)};
      break;
    }
  }
  return stored;
}

ScoreMatrix score_any(const StoredModel& stored, const EmbeddingMatrix& input) {
  return std::visit(
      [&](const auto& model) -> ScoreMatrix {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, CentroidModel>) {
          return score(model, input);
        } else {
          return score(model, as_similarity(input));
        }
      },
      stored.model);
}

}  // namespace vfsl
