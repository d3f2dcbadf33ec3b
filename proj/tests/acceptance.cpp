// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [criterion...]   (default: all)

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "amr/cli/cli.hpp"
#include "amr/common/error.hpp"
#include "amr/dataset/dataset.hpp"
#include "amr/dataset/native_io.hpp"
#include "amr/sigsynth/frame.hpp"
#include "amr/sigsynth/symbols.hpp"
#include "amr/tensor/grad_check.hpp"
#include "amr/train/curriculum.hpp"
#include "amr/train/run_io.hpp"
#include "amr/zoo/zoo.hpp"
#include "support/layer_cases.hpp"

using namespace amr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome param_anchors() {
  const std::pair<const char*, std::size_t> anchors[] = {
      {"CNN1", 1592383}, {"CNN2", 858123}, {"CLDNN", 632531}, {"IC-AMCNet", 1264011}, {"MCNet", 121611},
      {"LSTM", 200075},  {"GRU", 151179},  {"MCLDNN", 405887}, {"CGDNet", 1808811},
  };
  const auto t0 = Clock::now();
  Outcome o;
  for (const auto& [id, want] : anchors) {
    const auto got = zoo::param_count(zoo::builtin_config(id));
    if (got != want) o.fail(fmt("%s has %zu, expected %zu", id, got, want));
  }
  const double t = seconds_since(t0);
  if (t >= 1.0) o.fail(fmt("took %.2f s", t));
  if (o.pass) o.detail = fmt("9/9 exact in %.3f s", t);
  return o;
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = 0.0;
  std::string worst_at;
  std::size_t instances = 0;
  for (LayerKind k : kAllLayerKinds) {
    const auto cases = amr::testing::random_layer_cases(k, 10, 2024);
    if (cases.size() < 10) o.fail(fmt("%s has only %zu instances", std::string(kind_name(k)).c_str(), cases.size()));
    for (const auto& c : cases) {
      const auto r = grad_check(c.spec, c.inputs);
      ++instances;
      if (r.max_rel_error > worst) worst = r.max_rel_error, worst_at = c.label + " " + r.worst;
      if (!(r.max_rel_error < 1e-4)) o.fail(fmt("%s: %.3g at %s", c.label.c_str(), r.max_rel_error, r.worst.c_str()));
    }
  }
  const double t = seconds_since(t0);
  if (t >= 60.0) o.fail(fmt("took %.1f s", t));
  if (o.pass)
    o.detail = fmt("%zu kinds x 10 instances, worst %.2e (%s), %.1f s", kAllLayerKinds.size(), worst,
                   worst_at.c_str(), t);
  return o;
}

double one_sided_fraction(const sigsynth::Waveform& w) {
  const std::size_t n = w.size();
  double pos = 0.0, neg = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    for (int side = 0; side < 2; ++side) {
      const double f = (side == 0 ? 1.0 : -1.0) * static_cast<double>(k) / static_cast<double>(n);
      sigsynth::cplx acc = 0.0;
      for (std::size_t t = 0; t < n; ++t)
        acc += w.samples[t] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(t));
      (side == 0 ? pos : neg) += std::norm(acc);
    }
  }
  return std::max(pos, neg) / (pos + neg);
}

Outcome modulator_calibration() {
  using namespace sigsynth;
  const auto t0 = Clock::now();
  Outcome o;
  const sigsynth::SynthParams params;

  // Empirical SNR per (scheme, level) over 1000 frames.
  double worst_db = 0.0;
  std::string worst_pair;
  for (auto m : kAllModulations) {
    for (int snr : dataset::kBenchmarkSnrs) {
      double ps = 0.0, pn = 0.0;
      const std::uint64_t base = derive_seed(derive_seed(77, "calibration"), static_cast<std::uint64_t>(m) * 1000 + 500 + snr);
      for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto fp = synthesize_frame_pair(m, snr, derive_seed(base, i), params);
        for (std::size_t s = 0; s < fp.clean.size(); ++s) {
          ps += std::norm(fp.clean.samples[s]);
          pn += std::norm(fp.noisy.samples[s] - fp.clean.samples[s]);
        }
      }
      const double err = 10.0 * std::log10(ps / pn) - snr;
      if (std::abs(err) > std::abs(worst_db)) worst_db = err, worst_pair = fmt("%s@%d", std::string(name(m)).c_str(), snr);
      if (!(std::abs(err) <= 0.3)) o.fail(fmt("%s at %d dB off by %.3f dB", std::string(name(m)).c_str(), snr, err));
    }
  }

  // Clean power, envelope and SSB spectrum.
  double worst_power = 0.0, worst_env = 0.0, worst_ssb = 1.0;
  for (auto m : kAllModulations) {
    Rng rng(derive_seed(78, std::string(name(m))));
    double power = 0.0, ssb = 0.0;
    std::size_t n = 0;
    const int frames = 100;
    for (int f = 0; f < frames; ++f) {
      const auto w = synthesize_clean(m, params, rng);
      for (const auto& s : w.samples) {
        power += std::norm(s);
        if (m == Modulation::GFSK || m == Modulation::CPFSK || m == Modulation::WBFM)
          worst_env = std::max(worst_env, std::abs(std::abs(s) - 1.0));
      }
      n += w.size();
      if (m == Modulation::AM_SSB) ssb += one_sided_fraction(w) / frames;
    }
    const double p = power / static_cast<double>(n);
    worst_power = std::max(worst_power, std::abs(p - 1.0));
    if (!(std::abs(p - 1.0) <= 0.01)) o.fail(fmt("%s mean power %.4f", std::string(name(m)).c_str(), p));
    if (m == Modulation::AM_SSB) {
      worst_ssb = ssb;
      if (!(ssb >= 0.95)) o.fail(fmt("AM-SSB one-sided fraction %.3f", ssb));
    }
  }
  if (!(worst_env <= 1e-6)) o.fail(fmt("constant-envelope deviation %.2e", worst_env));

  // Gray adjacency: nearest constellation neighbours differ in one bit.
  for (auto m : {Modulation::BPSK, Modulation::QPSK, Modulation::PSK8, Modulation::QAM16, Modulation::QAM64}) {
    const auto pts = constellation(m);
    double dmin = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) dmin = std::min(dmin, std::abs(pts[i] - pts[j]));
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (std::abs(pts[i] - pts[j]) < dmin * (1 + 1e-9) && std::popcount(i ^ j) != 1)
          o.fail(fmt("%s neighbours %zu,%zu not Gray", std::string(name(m)).c_str(), i, j));
  }
  if (o.pass)
    o.detail = fmt("220 pairs x 1000 frames, worst SNR error %+.3f dB (%s); power within %.2e; envelope %.1e; "
                   "SSB one-sided %.3f; Gray ok; %.1f s",
                   worst_db, worst_pair.c_str(), worst_power, worst_env, worst_ssb, seconds_since(t0));
  return o;
}

Outcome protocol_mechanics() {
  const auto t0 = Clock::now();
  Outcome o;
  dataset::DatasetSpec spec;
  spec.seed = 1;
  const auto ds = dataset::generate_dataset(spec);
  if (ds.size() != 220000) o.fail(fmt("corpus has %zu frames", ds.size()));
  const auto sp = dataset::split(ds, {}, cli::expand_seeds(1).split);

  std::map<std::pair<int, int>, std::array<std::size_t, 4>> strata;  // total, train, val, test
  const auto tally = [&](const dataset::Indices& idx, int part) {
    for (auto i : idx) ++strata[{static_cast<int>(ds[i].scheme), ds[i].snr_db}][part];
  };
  for (std::uint32_t i = 0; i < ds.size(); ++i) ++strata[{static_cast<int>(ds[i].scheme), ds[i].snr_db}][0];
  tally(sp.train, 1), tally(sp.val, 2), tally(sp.test, 3);
  double worst = 0.0;
  for (const auto& [key, c] : strata) {
    const double want[3] = {0.6 * c[0], 0.2 * c[0], 0.2 * c[0]};
    for (int p = 0; p < 3; ++p) worst = std::max(worst, std::abs(static_cast<double>(c[p + 1]) - want[p]));
    if (c[1] + c[2] + c[3] != c[0]) o.fail("split is not a partition");
  }
  if (strata.size() != 220) o.fail(fmt("%zu strata", strata.size()));
  if (!(worst <= 1.0)) o.fail(fmt("stratum deviation %.1f", worst));

  const auto sc = train::curriculum_scenarios();
  bool scenarios_ok = sc.size() == 11;
  for (std::size_t i = 0; scenarios_ok && i < sc.size(); ++i)
    scenarios_ok = sc[i].lo == -2 * static_cast<int>(i) && sc[i].hi == 18;
  if (!scenarios_ok) o.fail("curriculum scenarios are not [0,18]..[-20,18]");

  // Report identities on random predictions over the test split.
  const dataset::DatasetView test(ds, sp.test);
  std::vector<std::uint8_t> pred(test.size());
  Rng rng(5);
  for (std::size_t i = 0; i < test.size(); ++i)
    pred[i] = rng() % 3 ? static_cast<std::uint8_t>(test[i].scheme) : static_cast<std::uint8_t>(rng() % 11);
  const auto r = train::make_report(test, pred);
  double by_snr = 0.0, by_mod = 0.0;
  std::uint64_t trace = 0, total = 0;
  for (const auto& [snr, acc] : r.per_snr) by_snr += acc * static_cast<double>(r.per_snr_count.at(snr));
  for (const auto& [m, acc] : r.per_modulation) by_mod += acc * static_cast<double>(r.per_modulation_count.at(m));
  for (std::size_t t = 0; t < 11; ++t)
    for (std::size_t p = 0; p < 11; ++p) total += r.confusion[t][p], trace += t == p ? r.confusion[t][p] : 0;
  const double n = static_cast<double>(r.n_test);
  const double e1 = std::abs(by_snr / n - r.overall_accuracy), e2 = std::abs(by_mod / n - r.overall_accuracy),
               e3 = std::abs(static_cast<double>(trace) / n - r.overall_accuracy);
  if (total != r.n_test) o.fail("confusion total differs from n_test");
  if (!(std::max({e1, e2, e3}) <= 1e-9)) o.fail(fmt("identity residual %.2e", std::max({e1, e2, e3})));
  if (o.pass)
    o.detail = fmt("220 strata, max deviation %.1f frames; 11 scenarios; identities within %.1e; %.1f s", worst,
                   std::max({e1, e2, e3}), seconds_since(t0));
  return o;
}

// ---------------------------------------------------------------------------

// 256 frames spread over 11 classes x {10..18} dB.
dataset::Dataset toy_corpus() {
  dataset::DatasetSpec s;
  s.frames_per_pair = 6;
  s.snr_levels = {10, 12, 14, 16, 18};
  s.seed = 3;
  return dataset::generate_dataset(s);
}

dataset::Indices toy_indices(const dataset::Dataset& ds) {
  dataset::Indices idx;
  for (std::uint32_t i = 0; i < 256; ++i) idx.push_back(static_cast<std::uint32_t>(i * ds.size() / 256));
  return idx;
}

struct ToySettings {
  std::size_t batch = 32;
  double lr = 1e-3;
};

ToySettings toy_settings(std::string_view base) {
  static const std::map<std::string_view, ToySettings> table = {
      {"CNN2", {16, 1e-3}}, {"CLDNN", {16, 1e-3}}, {"GRU", {32, 3e-3}},
  };
  const auto it = table.find(base);
  return it == table.end() ? ToySettings{} : it->second;
}

struct ToyRun {
  train::History history;
  std::vector<std::vector<float>> weights;
};

ToyRun train_toy(const zoo::ModelConfig& cfg, const dataset::DatasetView& v) {
  const auto s = toy_settings(cfg.base_model);
  auto model = zoo::build<float>(cfg, 1);
  train::TrainConfig tc;
  tc.batch_size = s.batch;
  tc.learning_rate = s.lr;
  tc.max_epochs = 200;
  tc.patience = 1000;
  tc.seed = 5;
  tc.stop_at_train_accuracy = 0.95;
  ToyRun r;
  r.history = train::fit(model, v, v, tc);
  for (auto& p : model.parameters()) r.weights.push_back(p.value->data);
  return r;
}

Outcome training_sanity() {
  const auto t0 = Clock::now();
  Outcome o;
  const auto ds = toy_corpus();
  const dataset::DatasetView v(ds, toy_indices(ds));
  std::string summary;
  for (auto id : zoo::kModelIds) {
    for (bool aug : {false, true}) {
      const auto base = zoo::builtin_config(id);
      const auto cfg = aug ? zoo::augment(base) : base;
      const auto t1 = Clock::now();
      const auto r = train_toy(cfg, v);
      const double acc = r.history.epochs.back().train_accuracy.value_or(0.0);
      std::printf("  %-22s epochs %3zu train_acc %.3f %6.1f s\n", cfg.model_id.c_str(), r.history.stop_epoch(), acc,
                  seconds_since(t1));
      std::fflush(stdout);
      if (!(acc >= 0.95)) o.fail(fmt("%s reached %.3f in %zu epochs", cfg.model_id.c_str(), acc, r.history.stop_epoch()));
    }
  }
  // Determinism: repeat two runs and compare every weight bit.
  for (const auto& cfg : {zoo::builtin_config("CNN1"), zoo::augment(zoo::builtin_config("IC-AMCNet"))}) {
    const auto a = train_toy(cfg, v), b = train_toy(cfg, v);
    if (a.weights != b.weights || a.history.stop_epoch() != b.history.stop_epoch())
      o.fail(cfg.model_id + " is not reproducible");
  }
  const double t = seconds_since(t0);
  if (t > 1800.0) o.fail(fmt("took %.0f s", t));
  if (o.pass) o.detail = fmt("18/18 configs >= 0.95 train accuracy, reruns bit-identical, %.0f s", t);
  return o;
}

Outcome desk_scale_signal() {
  const auto t0 = Clock::now();
  Outcome o;
  dataset::DatasetSpec spec;
  spec.frames_per_pair = 91;  // 20,020 frames
  spec.seed = 9;
  const auto ds = dataset::generate_dataset(spec);
  const auto seeds = cli::expand_seeds(9);
  const auto sp = dataset::split(ds, {}, seeds.split);
  const auto train_v = dataset::filter_by_snr(dataset::DatasetView(ds, sp.train), 6, 18);
  const auto val_v = dataset::filter_by_snr(dataset::DatasetView(ds, sp.val), 6, 18);
  const dataset::DatasetView test_v(ds, sp.test);

  const auto cfg = zoo::builtin_config("CNN1");
  auto model = zoo::build<float>(cfg, seeds.init);
  train::TrainConfig tc;
  tc.batch_size = 128;
  tc.learning_rate = 1e-3;
  tc.max_epochs = 30;
  tc.patience = 5;
  tc.seed = seeds.train;
  const auto h = train::fit(model, train_v, val_v, tc);
  const auto high = train::evaluate(model, dataset::filter_by_snr(test_v, 6, 18));
  const auto full = train::evaluate(model, test_v);

  double hi_sum = 0.0, lo_sum = 0.0;
  int hi_n = 0, lo_n = 0;
  for (const auto& [snr, acc] : full.per_snr) {
    if (snr >= 6) hi_sum += acc, ++hi_n;
    if (snr <= -12) lo_sum += acc, ++lo_n;
  }
  const double hi_mean = hi_sum / hi_n, lo_mean = lo_sum / lo_n;
  if (!(high.overall_accuracy >= 0.27)) o.fail(fmt("high-SNR test accuracy %.4f", high.overall_accuracy));
  if (!(hi_mean > lo_mean)) o.fail(fmt("mean acc SNR>=6 %.4f not above SNR<=-12 %.4f", hi_mean, lo_mean));
  const double t = seconds_since(t0);
  if (t > 3600.0) o.fail(fmt("took %.0f s", t));
  if (o.pass)
    o.detail = fmt("CNN1, %zu train frames, %zu epochs (%s): high-SNR test acc %.4f; mean acc SNR>=6 %.4f vs "
                   "SNR<=-12 %.4f; %.0f s",
                   train_v.size(), h.stop_epoch(), h.stop_reason.c_str(), high.overall_accuracy, hi_mean, lo_mean, t);
  return o;
}

int cli_call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "  amrbench %s: %s", args.front().c_str(), err.str().c_str());
  return code;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return fs::exists(a) && fs::exists(b) && train::read_text(a) == train::read_text(b);
}

Outcome reproducibility() {
  const auto t0 = Clock::now();
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "amr_acceptance_repro";
  fs::remove_all(root);
  std::vector<std::string> compared;
  for (const char* side : {"a", "b"}) {
    const fs::path d = root / side;
    fs::create_directories(d);
    const std::string corpus = (d / "corpus.amrd").string();
    if (cli_call({"generate", "-n", "10", "--seed", "21", "-o", corpus}) ||
        cli_call({"train", "-m", "MCNet", "-d", corpus, "-o", (d / "run").string(), "--seed", "4", "--max-epochs",
                  "3", "--batch-size", "64"}) ||
        cli_call({"report", (d / "run").string(), "-o", (d / "report").string()}))
      o.fail(std::string("pipeline failed on side ") + side);
  }
  if (!o.pass) return o;
  std::vector<fs::path> files = {"corpus.amrd"};
  for (const char* f : {train::files::kCheckpoint, train::files::kHistory, train::files::kSummary,
                        train::files::kPerSnr, train::files::kPerModulation, train::files::kConfusion,
                        train::files::kConfig})
    files.push_back(fs::path("run") / f);
  for (const auto& e : fs::directory_iterator(root / "a" / "report")) files.push_back("report" / e.path().filename());
  for (const auto& f : files)
    if (!same_bytes(root / "a" / f, root / "b" / f)) o.fail(f.string() + " differs");
  if (o.pass) o.detail = fmt("%zu files bit-identical across two runs, %.1f s", files.size(), seconds_since(t0));
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"param_anchors", param_anchors},
    {"gradient_correctness", gradient_correctness},
    {"modulator_calibration", modulator_calibration},
    {"protocol_mechanics", protocol_mechanics},
    {"training_sanity", training_sanity},
    {"desk_scale_signal", desk_scale_signal},
    {"reproducibility", reproducibility},
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, check] : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
