#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "amr/tensor/layer_spec.hpp"
#include "amr/tensor/model.hpp"

namespace amr::zoo {

inline constexpr std::array<std::string_view, 9> kModelIds = {
    "CNN1", "CNN2", "CLDNN", "IC-AMCNet", "MCNet", "LSTM", "GRU", "MCLDNN", "CGDNet"};

inline constexpr std::string_view kConfigSchema = "amrbench.model/1";
inline constexpr std::size_t kNumClasses = 11;
inline const Shape kFrameShape = {2, 128};

struct TrainDefaults {
  std::size_t batch_size = 400;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 100;

  bool operator==(const TrainDefaults&) const = default;
};

struct Augmentation {
  std::size_t bilstm_units = 64;
  std::size_t gru_units = 64;

  bool operator==(const Augmentation&) const = default;
};

struct ModelConfig {
  std::string model_id;    // e.g. "MCLDNN" or "MCLDNN+BiLSTM+GRU"
  std::string base_model;  // one of kModelIds
  std::optional<Augmentation> augmented;
  std::size_t num_classes = kNumClasses;
  TrainDefaults train;
  NetworkSpec network;

  bool operator==(const ModelConfig&) const = default;
};

/// Published reference figures for one base architecture. The accuracies
/// are full-protocol targets (220k frames, GPU-scale training), kept for
/// comparison only.
struct PublishedFigures {
  std::size_t param_count;
  std::size_t stop_epoch;
  double test_accuracy;
  double augmented_accuracy;
};

/// Canonical form of a model id (case-insensitive, '-'/'_' ignored), or
/// nullopt when it names none of the nine architectures.
std::optional<std::string> canonical_model_id(std::string_view id);

/// Throws InvalidConfig for unknown ids.
ModelConfig builtin_config(std::string_view id);
PublishedFigures published_figures(std::string_view id);

/// Static count from layer hyperparameters; ShapeError on unresolvable shapes.
std::size_t param_count(const ModelConfig& cfg);

/// Checks topology, shapes and the classifier width.
void validate(const ModelConfig& cfg);

/// Inserts BiLSTM(sequences) -> GRU between the feature stack and the final
/// dense layer. A recurrent feature layer is switched to return its full
/// sequence; any other rank feature of width F is reshaped to (T, F / T)
/// with T the largest divisor of F not above 16. Training defaults are
/// inherited unchanged.
ModelConfig augment(const ModelConfig& base, std::size_t bilstm_units = 64, std::size_t gru_units = 64);

std::string save_config(const ModelConfig& cfg);
/// Throws ParseError with a location such as "layers[3].units".
ModelConfig load_config(std::string_view text);

/// FNV-1a of the canonical serialization.
std::uint64_t config_hash(const ModelConfig& cfg);

template <typename T>
Model<T> build(const ModelConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  return Model<T>(cfg.network, seed);
}

}  // namespace amr::zoo
