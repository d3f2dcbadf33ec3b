#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "amr/common/error.hpp"
#include "amr/train/curriculum.hpp"
#include "amr/train/metrics.hpp"
#include "amr/train/run_io.hpp"
#include "amr/train/trainer.hpp"

using namespace amr;
using namespace amr::train;

namespace {

zoo::ModelConfig tiny_config() {
  zoo::ModelConfig cfg;
  cfg.model_id = "tiny";
  cfg.base_model = "CNN1";
  cfg.network.input_shape = zoo::kFrameShape;
  LayerSpec f;
  f.name = "flat", f.kind = LayerKind::flatten;
  LayerSpec d;
  d.name = "logits", d.kind = LayerKind::dense, d.units = zoo::kNumClasses;
  cfg.network.layers = {f, d};
  return cfg;
}

dataset::Dataset corpus(std::size_t per_pair, std::vector<int> snrs, std::vector<sigsynth::Modulation> schemes = {}) {
  dataset::DatasetSpec spec;
  spec.frames_per_pair = per_pair;
  spec.snr_levels = std::move(snrs);
  if (!schemes.empty()) spec.schemes = std::move(schemes);
  spec.seed = 11;
  return dataset::generate_dataset(spec);
}

const std::vector<int> kAllSnrs(dataset::kBenchmarkSnrs.begin(), dataset::kBenchmarkSnrs.end());

struct Oracle : Classifier {
  std::vector<std::uint8_t> predict(const DatasetView& v) override {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(static_cast<std::uint8_t>(v[i].scheme));
    return out;
  }
};

struct Constant : Classifier {
  std::vector<std::uint8_t> predict(const DatasetView& v) override { return std::vector<std::uint8_t>(v.size(), 0); }
};

// Right above 0 dB (inclusive), wrong below.
struct HighOnly : Classifier {
  std::vector<std::uint8_t> predict(const DatasetView& v) override {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto y = static_cast<std::uint8_t>(v[i].scheme);
      out.push_back(v[i].snr_db >= 0 ? y : static_cast<std::uint8_t>((y + 1) % kClasses));
    }
    return out;
  }
};

std::vector<std::vector<float>> weights(Model<float>& m) {
  std::vector<std::vector<float>> out;
  for (auto& p : m.parameters()) out.push_back(p.value->data);
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("amr_test_train_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Metrics, AccuracyExamples) {
  const std::vector<std::uint8_t> p{2, 1}, y{2, 0};
  EXPECT_DOUBLE_EQ(accuracy(p, y), 0.5);
  EXPECT_DOUBLE_EQ(accuracy(p, p), 1.0);
  EXPECT_THROW(accuracy(p, std::vector<std::uint8_t>{1}), InvalidInput);
  EXPECT_THROW(accuracy(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), InvalidInput);
  Tensor<float> one_hot({2, 3}, {0, 0, 1, 1, 0, 0});
  EXPECT_DOUBLE_EQ(accuracy(p, one_hot), 0.5);
  Tensor<float> bad({2, 3}, {0, 1, 1, 1, 0, 0});
  EXPECT_THROW(accuracy(p, bad), InvalidLabel);
}

TEST(Metrics, OracleScoresOneWithDiagonalConfusion) {
  const auto ds = corpus(2, {-10, 10});
  Oracle oracle;
  const auto r = evaluate(oracle, DatasetView::all(ds));
  EXPECT_EQ(r.overall_accuracy, 1.0);
  EXPECT_EQ(r.n_test, ds.size());
  for (std::size_t t = 0; t < kClasses; ++t)
    for (std::size_t p = 0; p < kClasses; ++p) EXPECT_EQ(r.confusion[t][p], t == p ? 4u : 0u);
  for (const auto& [snr, acc] : r.per_snr) EXPECT_EQ(acc, 1.0) << snr;
}

TEST(Metrics, ConstantScoresChance) {
  const auto ds = corpus(1, kAllSnrs);
  Constant c;
  const auto r = evaluate(c, DatasetView::all(ds));
  EXPECT_NEAR(r.overall_accuracy, 1.0 / 11.0, 1e-12);
  EXPECT_EQ(r.per_modulation.at(sigsynth::Modulation::WBFM), 1.0);
  EXPECT_EQ(r.per_modulation.at(sigsynth::Modulation::BPSK), 0.0);
}

TEST(Metrics, ReportIdentities) {
  const auto ds = corpus(3, kAllSnrs);
  std::vector<std::uint8_t> pred;
  Rng rng(4);
  for (std::size_t i = 0; i < ds.size(); ++i) pred.push_back(static_cast<std::uint8_t>(rng() % kClasses));
  const auto r = make_report(DatasetView::all(ds), pred);
  double by_snr = 0.0, by_mod = 0.0;
  std::size_t n_snr = 0, n_mod = 0, trace = 0, total = 0;
  for (const auto& [snr, acc] : r.per_snr) by_snr += acc * static_cast<double>(r.per_snr_count.at(snr)), n_snr += r.per_snr_count.at(snr);
  for (const auto& [m, acc] : r.per_modulation)
    by_mod += acc * static_cast<double>(r.per_modulation_count.at(m)), n_mod += r.per_modulation_count.at(m);
  for (std::size_t t = 0; t < kClasses; ++t)
    for (std::size_t p = 0; p < kClasses; ++p) total += r.confusion[t][p], trace += t == p ? r.confusion[t][p] : 0;
  const double n = static_cast<double>(r.n_test);
  EXPECT_EQ(n_snr, r.n_test);
  EXPECT_EQ(n_mod, r.n_test);
  EXPECT_EQ(total, r.n_test);
  EXPECT_NEAR(by_snr / n, r.overall_accuracy, 1e-9);
  EXPECT_NEAR(by_mod / n, r.overall_accuracy, 1e-9);
  EXPECT_NEAR(static_cast<double>(trace) / n, r.overall_accuracy, 1e-9);
  pred[0] = 11;
  EXPECT_THROW(make_report(DatasetView::all(ds), pred), InvalidLabel);
}

TEST(Curriculum, TripletCountsZeroDecibelsAsHigh) {
  const auto ds = corpus(1, {-2, 0});
  HighOnly h;
  const auto t = curriculum_triplet(evaluate(h, DatasetView::all(ds)));
  EXPECT_EQ(t.acc_low, 0.0);
  EXPECT_EQ(t.acc_high, 1.0);
  EXPECT_DOUBLE_EQ(t.acc_overall, 0.5);
  EXPECT_THROW(curriculum_triplet(evaluate(h, DatasetView::all(corpus(1, {2})))), IncompleteData);
}

TEST(Curriculum, ScenarioList) {
  const auto s = curriculum_scenarios();
  ASSERT_EQ(s.size(), 11u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i].lo, -2 * static_cast<int>(i));
    EXPECT_EQ(s[i].hi, 18);
  }
  EXPECT_EQ(s.front().label(), "[0,18]");
  EXPECT_EQ(s.back().label(), "[-20,18]");
  const auto two = select_scenarios(2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].lo, 0);
  EXPECT_EQ(two[1].lo, -20);
  EXPECT_EQ(select_scenarios(11).size(), 11u);
}

TEST(Curriculum, RunsEachScenarioFromFreshWeights) {
  const auto ds = corpus(5, kAllSnrs);
  const auto sp = dataset::split(ds, {}, 1);
  TrainConfig cfg;
  cfg.batch_size = 64, cfg.max_epochs = 1, cfg.seed = 2;
  CurriculumOptions opt;
  opt.scenarios = select_scenarios(2);
  std::size_t seen = 0;
  const auto res = run_curriculum(tiny_config(), ds, sp, cfg, opt, [&](const CurriculumResult&) { ++seen; });
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(seen, 2u);
  for (const auto& r : res) EXPECT_EQ(r.report.n_test, sp.test.size());
  const auto narrow = corpus(1, {0, 2});
  EXPECT_THROW(run_curriculum(tiny_config(), narrow, dataset::split(narrow, {}, 1), cfg, opt), ScenarioError);
}

TEST(Trainer, EarlyStoppingRestoresBestWeights) {
  // Train only on WBFM, validate only on BPSK: each epoch makes validation worse.
  const auto ds = corpus(40, {10}, {sigsynth::Modulation::WBFM, sigsynth::Modulation::BPSK});
  dataset::Indices a, b;
  for (std::uint32_t i = 0; i < ds.size(); ++i) (ds[i].scheme == sigsynth::Modulation::WBFM ? a : b).push_back(i);
  const DatasetView train_v(ds, a), val_v(ds, b);
  TrainConfig cfg;
  cfg.batch_size = 8, cfg.max_epochs = 10, cfg.patience = 1, cfg.seed = 3, cfg.learning_rate = 1e-2;
  auto model = zoo::build<float>(tiny_config(), 1);
  const auto h = fit(model, train_v, val_v, cfg);
  EXPECT_EQ(h.stop_epoch(), 2u);
  EXPECT_EQ(h.best_epoch, 1u);
  EXPECT_EQ(h.stop_reason, "early_stopping");
  cfg.max_epochs = 1;
  auto one = zoo::build<float>(tiny_config(), 1);
  fit(one, train_v, val_v, cfg);
  EXPECT_EQ(weights(model), weights(one));
}

TEST(Trainer, DeterministicGivenSeeds) {
  const auto ds = corpus(2, {0, 10});
  const auto sp = dataset::split(ds, {}, 5);
  TrainConfig cfg;
  cfg.batch_size = 16, cfg.max_epochs = 3, cfg.seed = 9;
  auto m1 = zoo::build<float>(tiny_config(), 4), m2 = zoo::build<float>(tiny_config(), 4);
  const auto h1 = fit(m1, DatasetView(ds, sp.train), DatasetView(ds, sp.val), cfg);
  const auto h2 = fit(m2, DatasetView(ds, sp.train), DatasetView(ds, sp.val), cfg);
  EXPECT_EQ(weights(m1), weights(m2));
  ASSERT_EQ(h1.epochs.size(), h2.epochs.size());
  for (std::size_t i = 0; i < h1.epochs.size(); ++i) EXPECT_EQ(h1.epochs[i].val_loss, h2.epochs[i].val_loss);
}

TEST(Trainer, TargetAccuracyStopsTraining) {
  const auto ds = corpus(4, {18}, {sigsynth::Modulation::WBFM, sigsynth::Modulation::BPSK});
  const auto all = DatasetView::all(ds);
  TrainConfig cfg;
  cfg.batch_size = 8, cfg.max_epochs = 200, cfg.patience = 1000, cfg.seed = 1, cfg.learning_rate = 1e-2;
  cfg.stop_at_train_accuracy = 0.95;
  auto m = zoo::build<float>(tiny_config(), 2);
  const auto h = fit(m, all, all, cfg);
  EXPECT_EQ(h.stop_reason, "train_accuracy");
  ASSERT_TRUE(h.epochs.back().train_accuracy.has_value());
  EXPECT_GE(*h.epochs.back().train_accuracy, 0.95);
  EXPECT_GE(measure(m, all).accuracy, 0.95);
}

TEST(RunIo, ReportRoundTripIsExact) {
  const auto ds = corpus(3, kAllSnrs);
  std::vector<std::uint8_t> pred;
  Rng rng(8);
  for (std::size_t i = 0; i < ds.size(); ++i) pred.push_back(static_cast<std::uint8_t>(rng() % kClasses));
  const auto r = make_report(DatasetView::all(ds), pred);
  const auto dir = scratch_dir("report");
  write_report(dir, r);
  EXPECT_EQ(read_report(dir), r);
  std::filesystem::remove(dir / files::kPerSnr);
  EXPECT_THROW(read_report(dir), IoError);
}

TEST(RunIo, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 0.5423, 1e-300, 123456.789})
    EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(RunIo, HistoryAndCurriculumFiles) {
  const auto dir = scratch_dir("files");
  History h;
  h.epochs.push_back({1, 2.5, 2.25, 0.125, std::nullopt, 3.0});
  h.epochs.push_back({2, 2.0, 2.5, 0.25, 0.5, 4.0});
  write_history(dir / files::kHistory, h);
  EXPECT_EQ(read_text(dir / files::kHistory),
            "epoch,train_loss,val_loss,val_accuracy,train_accuracy\n1,2.5,2.25,0.125,\n2,2,2.5,0.25,0.5\n");

  CurriculumResult c;
  c.scenario = {-4, 18};
  c.accuracy = {0.25, 0.75, 0.5};
  c.history = h;
  write_curriculum(dir / files::kCurriculum, {c});
  const auto rows = read_curriculum(dir / files::kCurriculum);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].label, "[-4,18]");
  EXPECT_EQ(rows[0].lo, -4);
  EXPECT_EQ(rows[0].acc_high, 0.75);
  EXPECT_EQ(rows[0].stop_epoch, 2u);
  EXPECT_THROW(load_run(dir / "missing"), IoError);
}
