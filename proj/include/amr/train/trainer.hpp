#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amr/train/metrics.hpp"

namespace amr::train {

struct TrainConfig {
  std::size_t batch_size = 400;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 100;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  bool deterministic = true;  // fixed reduction order; see README
  /// Stop as soon as eval-mode accuracy on the training set reaches this
  /// value; the weights of that epoch are kept.
  std::optional<double> stop_at_train_accuracy;
  std::size_t eval_batch = 256;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  std::optional<double> train_accuracy;
  double seconds = 0.0;
};

struct History {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  std::string stop_reason;  // "max_epochs", "early_stopping", "train_accuracy"

  std::size_t stop_epoch() const noexcept { return epochs.empty() ? 0 : epochs.back().epoch; }
};

using EpochObserver = std::function<void(const EpochRecord&)>;

struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean cross-entropy and accuracy in eval mode.
LossAccuracy measure(const Model<float>& model, const DatasetView& frames, std::size_t batch = 256);

/// Adam on mini-batches with a per-epoch seeded shuffle, validation loss
/// after every epoch, early stopping after `patience` epochs without
/// improvement, and restoration of the best-validation-loss weights.
/// Throws TrainingDivergence (naming the epoch) on non-finite loss.
History fit(Model<float>& model, const DatasetView& train_set, const DatasetView& val_set, const TrainConfig& cfg,
            const EpochObserver& observer = {});

}  // namespace amr::train
