#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amr/sigsynth/frame.hpp"
#include "amr/sigsynth/modulation.hpp"

namespace amr::dataset {

using sigsynth::Modulation;

/// The twenty benchmark SNR levels, -20 dB to 18 dB in 2 dB steps.
inline constexpr std::array<int, 20> kBenchmarkSnrs = {-20, -18, -16, -14, -12, -10, -8,
                                                       -6,  -4,  -2,  0,   2,   4,   6,
                                                       8,   10,  12,  14,  16,  18};

struct LabeledFrame {
  sigsynth::FrameIQ iq{};
  Modulation scheme = Modulation::WBFM;
  std::int8_t snr_db = 0;
};

struct DatasetSpec {
  std::size_t frames_per_pair = 1000;
  std::vector<Modulation> schemes{sigsynth::kAllModulations.begin(), sigsynth::kAllModulations.end()};
  std::vector<int> snr_levels{kBenchmarkSnrs.begin(), kBenchmarkSnrs.end()};
  std::uint64_t seed = 0;
  sigsynth::SynthParams synth{};
  bool benchmark_mode = true;  // restricts snr_levels to the twenty benchmark levels
};

/// Immutable-after-construction frame corpus plus its generation metadata
/// (a JSON document).
struct Dataset {
  std::vector<LabeledFrame> frames;
  std::string metadata;

  std::size_t size() const noexcept { return frames.size(); }
  bool empty() const noexcept { return frames.empty(); }
  const LabeledFrame& operator[](std::size_t i) const { return frames[i]; }

  /// FNV-1a over the frame payload (labels and samples), hex encoded.
  std::string content_hash() const;
};

using Indices = std::vector<std::uint32_t>;

/// Ordered subset of a dataset. Does not own the frames.
class DatasetView {
 public:
  DatasetView() = default;
  DatasetView(const Dataset& ds, Indices indices) : ds_(&ds), indices_(std::move(indices)) {}

  static DatasetView all(const Dataset& ds);

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  const LabeledFrame& operator[](std::size_t i) const { return ds_->frames[indices_[i]]; }
  const Indices& indices() const noexcept { return indices_; }
  const Dataset* source() const noexcept { return ds_; }

 private:
  const Dataset* ds_ = nullptr;
  Indices indices_;
};

Dataset generate_dataset(const DatasetSpec& spec);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct SplitIndices {
  Indices train;
  Indices val;
  Indices test;
};

/// Largest-remainder apportionment of n items; ties go to the earlier part.
/// Throws InvalidRatio unless the ratios are non-negative and sum to 1.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios);

/// Stratified per (scheme, snr) split with a seeded shuffle inside each
/// stratum. Each output list is in ascending frame order.
SplitIndices split(const Dataset& ds, const SplitRatios& ratios, std::uint64_t seed);

/// Frames with lo <= snr_db <= hi; order preserved.
DatasetView filter_by_snr(const DatasetView& view, int lo, int hi);
DatasetView filter_by_snr(const Dataset& ds, int lo, int hi);

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::pair<Modulation, int>, std::size_t> counts;
  std::map<Modulation, std::size_t> per_class;
  std::map<int, std::size_t> per_snr;
  double mean_power = 0.0;
  bool uniform = true;  // every (class, snr) cell of the observed grid has the same count
  std::vector<std::pair<Modulation, int>> nonuniform_strata;
};

DatasetStats summarize(const DatasetView& view);
DatasetStats summarize(const Dataset& ds);

}  // namespace amr::dataset
