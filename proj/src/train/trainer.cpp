#include "amr/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "amr/common/error.hpp"
#include "amr/tensor/loss.hpp"
#include "amr/tensor/optimizer.hpp"

namespace amr::train {

LossAccuracy measure(const Model<float>& model, const DatasetView& frames, std::size_t batch) {
  if (frames.empty()) throw EmptyInput("measure: empty frame set");
  double loss = 0.0;
  std::size_t hits = 0;
  for (std::size_t b = 0; b < frames.size(); b += batch) {
    const std::size_t e = std::min(frames.size(), b + batch);
    const auto logits = model.predict(make_batch(frames, b, e));
    const auto labels = labels_of(frames, b, e);
    loss += cross_entropy(logits, std::span<const std::uint8_t>(labels)).loss * static_cast<double>(e - b);
    const auto preds = argmax_rows(logits);
    for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == labels[i];
  }
  const double n = static_cast<double>(frames.size());
  return {loss / n, static_cast<double>(hits) / n};
}

History fit(Model<float>& model, const DatasetView& train_set, const DatasetView& val_set, const TrainConfig& cfg,
            const EpochObserver& observer) {
  if (train_set.empty()) throw InvalidInput("train: empty training set");
  if (val_set.empty()) throw InvalidInput("train: empty validation set");
  if (cfg.batch_size == 0) throw InvalidInput("train: batch_size must be positive");
  if (cfg.max_epochs == 0 || cfg.patience == 0) throw InvalidInput("train: max_epochs and patience must be >= 1");

  Adam<float> adam(AdamConfig{cfg.learning_rate});
  Rng dropout_rng(derive_seed(cfg.seed, "dropout"));
  auto params = model.parameters();
  std::vector<std::vector<float>> best(params.size());
  auto keep_best = [&] {
    for (std::size_t k = 0; k < params.size(); ++k) best[k] = params[k].value->data;
  };

  History h;
  h.best_val_loss = INFINITY;
  std::size_t since_best = 0;
  bool keep_current = false;
  // Overfit checks validate on the training set itself; measure it once.
  const bool val_is_train = val_set.source() == train_set.source() && val_set.indices() == train_set.indices();
  std::vector<std::uint32_t> order(train_set.size());
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0u);
    Rng shuffle_rng(derive_seed(derive_seed(cfg.seed, "shuffle"), epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    dataset::Indices shuffled(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = train_set.indices()[order[i]];
    const DatasetView epoch_view(*train_set.source(), std::move(shuffled));

    double loss_sum = 0.0;
    for (std::size_t b = 0; b < epoch_view.size(); b += cfg.batch_size) {
      const std::size_t e = std::min(epoch_view.size(), b + cfg.batch_size);
      const auto logits = model.forward(make_batch(epoch_view, b, e), Mode::train, &dropout_rng);
      const auto labels = labels_of(epoch_view, b, e);
      auto loss = cross_entropy(logits, std::span<const std::uint8_t>(labels));
      if (!std::isfinite(loss.loss))
        throw TrainingDivergence("non-finite training loss at epoch " + std::to_string(epoch));
      loss_sum += loss.loss * static_cast<double>(e - b);
      model.zero_grad();
      model.backward(loss.grad);
      try {
        adam.step(model);
      } catch (const TrainingDivergence& err) {
        throw TrainingDivergence(std::string(err.what()) + " at epoch " + std::to_string(epoch));
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(epoch_view.size());
    const LossAccuracy val = measure(model, val_set, cfg.eval_batch);
    if (!std::isfinite(val.loss))
      throw TrainingDivergence("non-finite validation loss at epoch " + std::to_string(epoch));
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    if (cfg.stop_at_train_accuracy)
      rec.train_accuracy = val_is_train ? val.accuracy : measure(model, train_set, cfg.eval_batch).accuracy;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    h.epochs.push_back(rec);
    if (observer) observer(rec);

    if (val.loss < h.best_val_loss) {
      h.best_val_loss = val.loss;
      h.best_epoch = epoch;
      since_best = 0;
      keep_best();
    } else {
      ++since_best;
    }
    if (cfg.stop_at_train_accuracy && *rec.train_accuracy >= *cfg.stop_at_train_accuracy) {
      h.stop_reason = "train_accuracy";
      keep_current = true;
      break;
    }
    if (since_best >= cfg.patience) {
      h.stop_reason = "early_stopping";
      break;
    }
  }
  if (h.stop_reason.empty()) h.stop_reason = "max_epochs";
  if (!keep_current) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k].value->data = best[k];
    model.mark_updated();
  }
  return h;
}

}  // namespace amr::train
