#include "amr/dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "amr/common/error.hpp"
#include "amr/common/rng.hpp"

namespace amr::dataset {

namespace {

bool is_benchmark_level(int snr) {
  return std::find(kBenchmarkSnrs.begin(), kBenchmarkSnrs.end(), snr) != kBenchmarkSnrs.end();
}

std::uint64_t stratum_seed(std::uint64_t root, Modulation m, int snr) {
  const std::uint64_t key = sigsynth::index_of(m) * 1000u + static_cast<std::uint64_t>(snr + 500);
  return derive_seed(derive_seed(root, "stratum"), key);
}

}  // namespace

std::string Dataset::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& f : frames) {
    const auto cls = static_cast<std::uint8_t>(f.scheme);
    mix(&cls, 1);
    mix(&f.snr_db, 1);
    mix(f.iq.data(), f.iq.size() * sizeof(float));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DatasetView DatasetView::all(const Dataset& ds) {
  Indices idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0u);
  return DatasetView(ds, std::move(idx));
}

Dataset generate_dataset(const DatasetSpec& spec) {
  if (spec.schemes.empty()) throw InvalidSpec("dataset spec has no modulation schemes");
  if (spec.snr_levels.empty()) throw InvalidSpec("dataset spec has no SNR levels");
  if (spec.frames_per_pair < 1) throw InvalidSpec("frames_per_pair must be >= 1");
  for (int snr : spec.snr_levels) {
    if (snr < -128 || snr > 127) throw InvalidSpec("SNR level does not fit the i8 label");
    if (spec.benchmark_mode && !is_benchmark_level(snr)) {
      throw InvalidSpec("SNR level " + std::to_string(snr) + " is not a benchmark level");
    }
  }

  const std::size_t n_snr = spec.snr_levels.size();
  const std::size_t n_strata = spec.schemes.size() * n_snr;
  const std::size_t per = spec.frames_per_pair;
  Dataset ds;
  ds.frames.resize(n_strata * per);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t s = 0; s < n_strata; ++s) {
    const Modulation m = spec.schemes[s / n_snr];
    const int snr = spec.snr_levels[s % n_snr];
    const std::uint64_t base = stratum_seed(spec.seed, m, snr);
    for (std::size_t i = 0; i < per; ++i) {
      LabeledFrame& f = ds.frames[s * per + i];
      f.iq = sigsynth::synthesize_frame(m, snr, derive_seed(base, i), spec.synth);
      f.scheme = m;
      f.snr_db = static_cast<std::int8_t>(snr);
    }
  }

  nlohmann::json meta;
  meta["provenance"] = "generated";
  meta["format"] = "AMRD/1";
  meta["seed"] = spec.seed;
  meta["frames_per_pair"] = spec.frames_per_pair;
  std::vector<std::string> names;
  for (auto m : spec.schemes) names.emplace_back(sigsynth::name(m));
  meta["schemes"] = names;
  meta["snr_levels"] = spec.snr_levels;
  meta["seed_derivation"] = "frame seed = derive(derive(derive(seed,'stratum'), class*1000+snr+500), index)";
  meta["generator"] = nlohmann::json::parse(sigsynth::describe(spec.synth));
  ds.metadata = meta.dump();
  return ds;
}

namespace {

void check_ratios(const SplitRatios& ratios) {
  for (double x : {ratios.train, ratios.val, ratios.test}) {
    if (!(x >= 0.0)) throw InvalidRatio("split ratios must be non-negative");
  }
  const double sum = ratios.train + ratios.val + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidRatio("split ratios sum to " + std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& r) {
  check_ratios(r);
  const double q[3] = {r.train * static_cast<double>(n), r.val * static_cast<double>(n),
                       r.test * static_cast<double>(n)};
  std::array<std::size_t, 3> out{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    // guard against 0.6*10 = 5.999999... style representation error
    const double fl = std::floor(q[i] + 1e-9);
    out[i] = static_cast<std::size_t>(fl);
    rem[i] = q[i] - fl;
    assigned += out[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++out[order[k % 3]];
  return out;
}

SplitIndices split(const Dataset& ds, const SplitRatios& ratios, std::uint64_t seed) {
  check_ratios(ratios);
  std::map<std::pair<Modulation, int>, Indices> strata;
  for (std::uint32_t i = 0; i < ds.size(); ++i) {
    strata[{ds.frames[i].scheme, ds.frames[i].snr_db}].push_back(i);
  }

  SplitIndices out;
  for (auto& [key, members] : strata) {
    Rng rng(stratum_seed(derive_seed(seed, "split"), key.first, key.second));
    std::shuffle(members.begin(), members.end(), rng);
    const auto counts = apportion(members.size(), ratios);
    auto it = members.begin();
    out.train.insert(out.train.end(), it, it + static_cast<long>(counts[0]));
    it += static_cast<long>(counts[0]);
    out.val.insert(out.val.end(), it, it + static_cast<long>(counts[1]));
    it += static_cast<long>(counts[1]);
    out.test.insert(out.test.end(), it, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

DatasetView filter_by_snr(const DatasetView& view, int lo, int hi) {
  if (lo > hi) throw InvalidInput("filter_by_snr needs lo <= hi");
  Indices kept;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const int snr = view[i].snr_db;
    if (snr >= lo && snr <= hi) kept.push_back(view.indices()[i]);
  }
  return DatasetView(*view.source(), std::move(kept));
}

DatasetView filter_by_snr(const Dataset& ds, int lo, int hi) {
  return filter_by_snr(DatasetView::all(ds), lo, hi);
}

DatasetStats summarize(const DatasetView& view) {
  if (view.empty()) throw EmptyInput("cannot summarize an empty dataset");
  DatasetStats st;
  st.total = view.size();
  double power = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const auto& f = view[i];
    ++st.counts[{f.scheme, f.snr_db}];
    ++st.per_class[f.scheme];
    ++st.per_snr[f.snr_db];
    double p = 0.0;
    for (float x : f.iq) p += static_cast<double>(x) * x;
    power += p / sigsynth::kFrameLength;
  }
  st.mean_power = power / static_cast<double>(view.size());

  // Uniformity over the full observed grid: a missing cell counts as zero.
  std::size_t expected = st.counts.begin()->second;
  for (const auto& [m, nc] : st.per_class) {
    for (const auto& [snr, ns] : st.per_snr) {
      const auto it = st.counts.find({m, snr});
      const std::size_t c = it == st.counts.end() ? 0 : it->second;
      if (c != expected) {
        st.uniform = false;
        st.nonuniform_strata.emplace_back(m, snr);
      }
    }
  }
  return st;
}

DatasetStats summarize(const Dataset& ds) { return summarize(DatasetView::all(ds)); }

}  // namespace amr::dataset
