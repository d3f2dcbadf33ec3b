#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "amr/dataset/dataset.hpp"
#include "amr/tensor/model.hpp"

namespace amr::train {

using dataset::DatasetView;
using sigsynth::Modulation;

inline constexpr std::size_t kClasses = sigsynth::kNumModulations;

/// matches / total. Throws InvalidInput on length mismatch or empty input.
double accuracy(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels);

/// Labels given as (N, C) one-hot rows; InvalidLabel for malformed rows.
double accuracy(std::span<const std::uint8_t> predictions, const Tensor<float>& one_hot);

struct EvalReport {
  double overall_accuracy = 0.0;
  std::map<int, double> per_snr;
  std::map<int, std::size_t> per_snr_count;
  std::map<Modulation, double> per_modulation;
  std::map<Modulation, std::size_t> per_modulation_count;
  std::array<std::array<std::uint64_t, kClasses>, kClasses> confusion{};  // [true][predicted]
  std::size_t n_test = 0;

  bool operator==(const EvalReport&) const = default;
};

/// Anything that maps frames to class indices.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<std::uint8_t> predict(const DatasetView& frames) = 0;
};

/// Eval-mode argmax over a model's logits, in chunks of `batch` frames.
class ModelClassifier : public Classifier {
 public:
  explicit ModelClassifier(const Model<float>& model, std::size_t batch = 256) : model_(model), batch_(batch) {}
  std::vector<std::uint8_t> predict(const DatasetView& frames) override;

 private:
  const Model<float>& model_;
  std::size_t batch_;
};

/// Builds a report from predictions; InvalidLabel for indices >= 11.
EvalReport make_report(const DatasetView& frames, std::span<const std::uint8_t> predictions);

EvalReport evaluate(Classifier& classifier, const DatasetView& test);
EvalReport evaluate(const Model<float>& model, const DatasetView& test);

/// (N, 2, 128) batch from frames [begin, end) of a view.
Tensor<float> make_batch(const DatasetView& frames, std::size_t begin, std::size_t end);
std::vector<std::uint8_t> labels_of(const DatasetView& frames, std::size_t begin, std::size_t end);

}  // namespace amr::train
