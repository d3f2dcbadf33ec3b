#include "amr/train/metrics.hpp"

#include <algorithm>

#include "amr/common/error.hpp"
#include "amr/tensor/loss.hpp"

namespace amr::train {

double accuracy(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels) {
  if (predictions.size() != labels.size())
    throw InvalidInput("accuracy: " + std::to_string(predictions.size()) + " predictions for " +
                       std::to_string(labels.size()) + " labels");
  if (labels.empty()) throw InvalidInput("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double accuracy(std::span<const std::uint8_t> predictions, const Tensor<float>& one_hot) {
  if (one_hot.shape.size() != 2) throw InvalidLabel("one-hot labels must be (N, C)");
  const std::size_t N = one_hot.shape[0], C = one_hot.shape[1];
  std::vector<std::uint8_t> labels(N);
  for (std::size_t n = 0; n < N; ++n) {
    std::size_t ones = 0;
    for (std::size_t c = 0; c < C; ++c) {
      const float v = one_hot[n * C + c];
      if (v == 1.0f) {
        ++ones;
        labels[n] = static_cast<std::uint8_t>(c);
      } else if (v != 0.0f) {
        ones = 2;
      }
    }
    if (ones != 1) throw InvalidLabel("row " + std::to_string(n) + " is not one-hot");
  }
  return accuracy(predictions, labels);
}

Tensor<float> make_batch(const DatasetView& frames, std::size_t begin, std::size_t end) {
  constexpr std::size_t S = 2 * sigsynth::kFrameLength;
  Tensor<float> x({end - begin, 2, sigsynth::kFrameLength});
  for (std::size_t i = begin; i < end; ++i) std::copy_n(frames[i].iq.data(), S, x.ptr() + (i - begin) * S);
  return x;
}

std::vector<std::uint8_t> labels_of(const DatasetView& frames, std::size_t begin, std::size_t end) {
  std::vector<std::uint8_t> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(static_cast<std::uint8_t>(frames[i].scheme));
  return out;
}

std::vector<std::uint8_t> ModelClassifier::predict(const DatasetView& frames) {
  std::vector<std::uint8_t> out;
  out.reserve(frames.size());
  for (std::size_t b = 0; b < frames.size(); b += batch_) {
    const std::size_t e = std::min(frames.size(), b + batch_);
    const auto p = argmax_rows(model_.predict(make_batch(frames, b, e)));
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

EvalReport make_report(const DatasetView& frames, std::span<const std::uint8_t> predictions) {
  if (frames.empty()) throw EmptyInput("evaluate: empty test set");
  if (predictions.size() != frames.size())
    throw InvalidInput("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                       std::to_string(frames.size()) + " frames");
  EvalReport r;
  r.n_test = frames.size();
  std::map<int, std::size_t> snr_hits;
  std::map<Modulation, std::size_t> mod_hits;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto truth = static_cast<std::size_t>(frames[i].scheme);
    const std::size_t pred = predictions[i];
    if (truth >= kClasses || pred >= kClasses)
      throw InvalidLabel("class index out of range at frame " + std::to_string(i));
    ++r.confusion[truth][pred];
    const bool ok = truth == pred;
    hits += ok;
    ++r.per_snr_count[frames[i].snr_db];
    snr_hits[frames[i].snr_db] += ok;
    ++r.per_modulation_count[frames[i].scheme];
    mod_hits[frames[i].scheme] += ok;
  }
  r.overall_accuracy = static_cast<double>(hits) / static_cast<double>(r.n_test);
  for (const auto& [snr, n] : r.per_snr_count)
    r.per_snr[snr] = static_cast<double>(snr_hits[snr]) / static_cast<double>(n);
  for (const auto& [m, n] : r.per_modulation_count)
    r.per_modulation[m] = static_cast<double>(mod_hits[m]) / static_cast<double>(n);
  return r;
}

EvalReport evaluate(Classifier& classifier, const DatasetView& test) {
  if (test.empty()) throw EmptyInput("evaluate: empty test set");
  const auto preds = classifier.predict(test);
  return make_report(test, preds);
}

EvalReport evaluate(const Model<float>& model, const DatasetView& test) {
  ModelClassifier c(model);
  return evaluate(c, test);
}

}  // namespace amr::train
