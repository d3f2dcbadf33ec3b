#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <set>
#include <sstream>

#include "amr/common/error.hpp"
#include "amr/dataset/dataset.hpp"
#include "amr/dataset/native_io.hpp"

using namespace amr;
using namespace amr::dataset;

namespace {

Dataset small_corpus(std::size_t per_pair = 4, std::uint64_t seed = 1) {
  DatasetSpec spec;
  spec.frames_per_pair = per_pair;
  spec.seed = seed;
  return generate_dataset(spec);
}

std::string to_bytes(const Dataset& ds) {
  std::ostringstream os(std::ios::binary);
  write_native(ds, os);
  return os.str();
}

Dataset from_bytes(const std::string& bytes) {
  std::istringstream is(bytes, std::ios::binary);
  return read_native(is);
}

}  // namespace

TEST(Generate, CountsAndLabels) {
  const Dataset ds = small_corpus(3);
  EXPECT_EQ(ds.size(), 11u * 20u * 3u);
  const auto st = summarize(ds);
  EXPECT_TRUE(st.uniform);
  EXPECT_EQ(st.per_class.size(), 11u);
  EXPECT_EQ(st.per_snr.size(), 20u);
  for (const auto& [key, n] : st.counts) EXPECT_EQ(n, 3u);
  for (const auto& f : ds.frames)
    for (float v : f.iq) ASSERT_TRUE(std::isfinite(v));
}

TEST(Generate, SingleFrameCorpus) {
  DatasetSpec spec;
  spec.frames_per_pair = 1;
  spec.schemes = {sigsynth::Modulation::GFSK};
  spec.snr_levels = {4};
  const Dataset ds = generate_dataset(spec);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].scheme, sigsynth::Modulation::GFSK);
  EXPECT_EQ(ds[0].snr_db, 4);
  const auto st = summarize(ds);
  EXPECT_EQ(st.counts.size(), 1u);
}

TEST(Generate, SeedDeterminism) {
  EXPECT_EQ(to_bytes(small_corpus(2, 9)), to_bytes(small_corpus(2, 9)));
  EXPECT_NE(small_corpus(2, 9).content_hash(), small_corpus(2, 10).content_hash());
}

TEST(Generate, InvalidSpecs) {
  DatasetSpec spec;
  spec.schemes.clear();
  EXPECT_THROW(generate_dataset(spec), InvalidSpec);
  spec = {};
  spec.snr_levels.clear();
  EXPECT_THROW(generate_dataset(spec), InvalidSpec);
  spec = {};
  spec.snr_levels = {5};
  EXPECT_THROW(generate_dataset(spec), InvalidSpec);
  spec.benchmark_mode = false;
  spec.frames_per_pair = 1;
  spec.schemes = {sigsynth::Modulation::BPSK};
  EXPECT_EQ(generate_dataset(spec).size(), 1u);
}

TEST(Apportion, LargestRemainder) {
  EXPECT_EQ(apportion(10, {}), (std::array<std::size_t, 3>{6, 2, 2}));
  EXPECT_EQ(apportion(5, {}), (std::array<std::size_t, 3>{3, 1, 1}));
  EXPECT_EQ(apportion(220000, {}), (std::array<std::size_t, 3>{132000, 44000, 44000}));
  EXPECT_EQ(apportion(1, {}), (std::array<std::size_t, 3>{1, 0, 0}));
  EXPECT_THROW(apportion(10, {0.5, 0.2, 0.2}), InvalidRatio);
}

TEST(Split, StratifiedDisjointExhaustive) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    DatasetSpec spec;
    spec.frames_per_pair = 1 + rng() % 7;
    spec.schemes = {sigsynth::Modulation::BPSK, sigsynth::Modulation::WBFM};
    spec.snr_levels = {-20, 0, 18};
    spec.seed = rng();
    const Dataset ds = generate_dataset(spec);
    const auto s = split(ds, {}, rng());
    std::set<std::uint32_t> seen;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
      for (auto i : *part) EXPECT_TRUE(seen.insert(i).second);
    }
    EXPECT_EQ(seen.size(), ds.size());
    const auto expect = apportion(spec.frames_per_pair, {});
    const auto tr = summarize(DatasetView(ds, s.train));
    for (const auto& [key, n] : tr.counts) EXPECT_EQ(n, expect[0]);
  }
}

TEST(Split, RejectsBadRatios) {
  const Dataset ds = small_corpus(1);
  EXPECT_THROW(split(ds, {0.6, 0.3, 0.2}, 1), InvalidRatio);
  EXPECT_NO_THROW(split(ds, {0.6, 0.2, 0.2 + 1e-12}, 1));
}

TEST(Filter, SnrRanges) {
  const Dataset ds = small_corpus(2);
  EXPECT_EQ(filter_by_snr(ds, 0, 18).size(), ds.size() / 2);
  EXPECT_EQ(filter_by_snr(ds, -20, 18).size(), ds.size());
  EXPECT_TRUE(filter_by_snr(ds, 19, 20).empty());
  EXPECT_EQ(summarize(filter_by_snr(ds, 0, 18)).per_snr.size(), 10u);
  EXPECT_THROW(filter_by_snr(ds, 4, 2), InvalidInput);
  const auto v = filter_by_snr(ds, -4, -4);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v.indices()[i - 1], v.indices()[i]);
}

TEST(Summarize, EmptyAndNonUniform) {
  Dataset empty;
  EXPECT_THROW(summarize(empty), EmptyInput);
  Dataset ds = small_corpus(2);
  ds.frames.pop_back();
  const auto st = summarize(ds);
  EXPECT_FALSE(st.uniform);
  EXPECT_EQ(st.nonuniform_strata.size(), 1u);
}

TEST(NativeIo, RoundTripIsBitExact) {
  const Dataset ds = small_corpus(2);
  const std::string bytes = to_bytes(ds);
  EXPECT_EQ(bytes.substr(0, 4), "AMRD");
  const Dataset back = from_bytes(bytes);
  ASSERT_EQ(back.size(), ds.size());
  EXPECT_EQ(back.metadata, ds.metadata);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back[i].scheme, ds[i].scheme);
    EXPECT_EQ(back[i].snr_db, ds[i].snr_db);
    EXPECT_EQ(std::memcmp(back[i].iq.data(), ds[i].iq.data(), sizeof(float) * 256), 0);
  }
  EXPECT_EQ(to_bytes(back), bytes);
}

TEST(NativeIo, DistinctFaults) {
  const std::string good = to_bytes(small_corpus(1));
  const auto fault_of = [](const std::string& bytes) {
    try {
      from_bytes(bytes);
    } catch (const FormatError& e) {
      return e.fault();
    }
    ADD_FAILURE() << "no error";
    return FormatFault::malformed;
  };
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_EQ(fault_of(bad), FormatFault::bad_magic);
  bad = good;
  bad[4] = 2;
  EXPECT_EQ(fault_of(bad), FormatFault::version_mismatch);
  EXPECT_EQ(fault_of(good.substr(0, good.size() - 7)), FormatFault::truncated);
  EXPECT_EQ(fault_of(""), FormatFault::truncated);
  // Class index out of range in the first frame record.
  bad = good;
  const std::size_t meta_len = static_cast<unsigned char>(good[6]) | static_cast<unsigned char>(good[7]) << 8 |
                               static_cast<unsigned char>(good[8]) << 16;
  bad[4 + 2 + 4 + meta_len + 4] = 42;
  EXPECT_EQ(fault_of(bad), FormatFault::malformed);
}

TEST(NativeIo, MetadataRecordsGenerator) {
  const Dataset ds = small_corpus(1);
  EXPECT_NE(ds.metadata.find("snr"), std::string::npos);
  EXPECT_NE(ds.metadata.find("seed"), std::string::npos);
}
