#include "amr/cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "amr/common/error.hpp"
#include "amr/common/rng.hpp"
#include "amr/dataset/native_io.hpp"
#include "amr/report/report.hpp"
#include "amr/tensor/checkpoint.hpp"
#include "amr/train/curriculum.hpp"
#include "amr/train/run_io.hpp"
#include "amr/zoo/zoo.hpp"

namespace amr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

Seeds expand_seeds(std::uint64_t seed) {
  return {seed, derive_seed(seed, "split"), derive_seed(seed, "init"), derive_seed(seed, "train")};
}

namespace {

class UsageError : public Error {
  using Error::Error;
};

fs::path data_dir() {
  const char* env = std::getenv(kDataDirEnv);
  return env && *env ? fs::path(env) : fs::path(".");
}

fs::path default_corpus() { return data_dir() / "corpus.amrd"; }

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::string seed_hex(std::uint64_t v) {
  std::ostringstream ss;
  ss << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

json seeds_json(const Seeds& s) {
  return {{"master", s.master},
          {"split", seed_hex(s.split)},
          {"init", seed_hex(s.init)},
          {"train", seed_hex(s.train)},
          {"rule", "derive_seed(master, \"split\" | \"init\" | \"train\")"}};
}

json base_manifest(const std::string& command, const std::vector<std::string>& args) {
  return {{"command", command}, {"argv", args}, {"tool_version", kToolVersion}, {"timestamp", timestamp_utc()}};
}

void write_json(const fs::path& file, const json& j) { train::write_text(file, j.dump(2) + "\n"); }

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

std::vector<sigsynth::Modulation> parse_schemes(const std::vector<std::string>& names) {
  std::vector<sigsynth::Modulation> out;
  for (const auto& n : names) {
    const auto m = sigsynth::parse_modulation(n);
    if (!m) {
      std::string known;
      for (auto k : sigsynth::kAllModulations) known += (known.empty() ? "" : ", ") + std::string(sigsynth::name(k));
      throw UsageError("unknown modulation '" + n + "'; expected one of: " + known);
    }
    out.push_back(*m);
  }
  return out;
}

std::string known_models() {
  std::string s;
  for (auto id : zoo::kModelIds) s += (s.empty() ? "" : ", ") + std::string(id);
  return s;
}

// Model selection shared by train, curriculum, augment and params.
struct ModelOptions {
  std::string model;
  std::string config_path;
  bool augment = false;

  void add(CLI::App* app) {
    auto* m = app->add_option("--model,-m", model, "Model id (" + known_models() + ")");
    auto* c = app->add_option("--config", config_path, "Model config JSON instead of a built-in id");
    m->excludes(c);
    c->excludes(m);
    app->add_flag("--augment", augment, "Insert BiLSTM + GRU layers before the classifier");
  }

  bool given() const { return !model.empty() || !config_path.empty(); }

  zoo::ModelConfig resolve() const {
    if (!given()) throw UsageError("one of --model or --config is required");
    zoo::ModelConfig cfg;
    if (!model.empty()) {
      const auto id = zoo::canonical_model_id(model);
      if (!id) throw UsageError("unknown model '" + model + "'; expected one of: " + known_models());
      cfg = zoo::builtin_config(*id);
    } else {
      cfg = zoo::load_config(train::read_text(config_path));
    }
    return augment ? zoo::augment(cfg) : cfg;
  }
};

// Training flags shared by train and curriculum.
struct TrainOptions {
  std::string data;
  std::string out;
  std::string split_file;
  std::optional<std::size_t> batch_size;
  std::optional<double> learning_rate;
  std::optional<std::size_t> max_epochs;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  std::optional<int> train_snr_min, train_snr_max;
  std::optional<double> stop_at_train_accuracy;
  std::vector<double> ratios{0.6, 0.2, 0.2};

  void add(CLI::App* app) {
    app->add_option("--data,-d", data, "Corpus file (default: $" + std::string(kDataDirEnv) + "/corpus.amrd)");
    app->add_option("--out,-o", out, "Run directory");
    app->add_option("--split", split_file, "Split file from the split command (default: recompute from --seed)");
    app->add_option("--batch-size", batch_size, "Override the model's default batch size")->check(CLI::PositiveNumber);
    app->add_option("--lr", learning_rate, "Override the model's default learning rate")->check(CLI::PositiveNumber);
    app->add_option("--max-epochs", max_epochs, "Override the epoch limit")->check(CLI::PositiveNumber);
    app->add_option("--patience", patience, "Early-stopping patience in epochs")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--train-snr-min", train_snr_min, "Keep training/validation frames with SNR >= this");
    app->add_option("--train-snr-max", train_snr_max, "Keep training/validation frames with SNR <= this");
    app->add_option("--stop-at-train-accuracy", stop_at_train_accuracy, "Stop once training accuracy reaches this")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--ratios", ratios, "Train/val/test split ratios")->expected(3);
  }

  train::TrainConfig resolve(const zoo::ModelConfig& cfg, const Seeds& seeds) const {
    train::TrainConfig tc;
    tc.batch_size = batch_size.value_or(cfg.train.batch_size);
    tc.learning_rate = learning_rate.value_or(cfg.train.learning_rate);
    tc.max_epochs = max_epochs.value_or(cfg.train.max_epochs);
    tc.patience = patience;
    tc.seed = seeds.train;
    tc.deterministic = true;
    tc.stop_at_train_accuracy = stop_at_train_accuracy;
    return tc;
  }

  fs::path corpus() const { return data.empty() ? default_corpus() : fs::path(data); }
};

json train_values(const train::TrainConfig& tc, const TrainOptions& o) {
  json v = {{"batch_size", tc.batch_size},
            {"learning_rate", tc.learning_rate},
            {"max_epochs", tc.max_epochs},
            {"patience", tc.patience},
            {"deterministic", tc.deterministic},
            {"split_ratios", o.ratios},
            {"split_file", o.split_file.empty() ? json(nullptr) : json(o.split_file)},
            {"train_snr_min", o.train_snr_min ? json(*o.train_snr_min) : json(nullptr)},
            {"train_snr_max", o.train_snr_max ? json(*o.train_snr_max) : json(nullptr)},
            {"stop_at_train_accuracy", tc.stop_at_train_accuracy ? json(*tc.stop_at_train_accuracy) : json(nullptr)}};
  return v;
}

json decisions_json() {
  return {{"early_stopping", "validation loss, patience epochs, best weights restored"},
          {"zero_db_stratum", "high"},
          {"optimizer", "Adam beta1=0.9 beta2=0.999 eps=1e-7"},
          {"init", "Glorot uniform, zero bias, LSTM forget bias 1"},
          {"split", "stratified per (class, snr), largest remainder"}};
}

dataset::SplitIndices load_split(const TrainOptions& o, const dataset::Dataset& ds, const Seeds& seeds) {
  if (o.split_file.empty()) {
    return dataset::split(ds, dataset::SplitRatios{o.ratios[0], o.ratios[1], o.ratios[2]}, seeds.split);
  }
  json j;
  try {
    j = json::parse(train::read_text(o.split_file));
  } catch (const json::exception& e) {
    throw FormatError(FormatFault::malformed, o.split_file + ": " + e.what());
  }
  if (j.value("corpus_hash", std::string()) != ds.content_hash())
    throw ConsistencyError("split file " + o.split_file + " was made for a different corpus");
  dataset::SplitIndices s;
  s.train = j.at("train").get<dataset::Indices>();
  s.val = j.at("val").get<dataset::Indices>();
  s.test = j.at("test").get<dataset::Indices>();
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (auto i : *part)
      if (i >= ds.size()) throw FormatError(FormatFault::malformed, o.split_file + ": index out of range");
  return s;
}

dataset::DatasetView restrict_snr(const dataset::DatasetView& v, const TrainOptions& o) {
  if (!o.train_snr_min && !o.train_snr_max) return v;
  return dataset::filter_by_snr(v, o.train_snr_min.value_or(-128), o.train_snr_max.value_or(127));
}

void print_summary(std::ostream& out, const dataset::DatasetStats& st) {
  out << "frames " << st.total << ", classes " << st.per_class.size() << ", snr levels " << st.per_snr.size()
      << ", mean power " << std::setprecision(6) << st.mean_power << ", uniform " << (st.uniform ? "yes" : "no")
      << "\n";
}

template <typename F>
void with_progress(std::ostream& out, F&& run_fn) {
  run_fn([&](const train::EpochRecord& e) {
    out << "epoch " << e.epoch << " train_loss " << std::setprecision(5) << e.train_loss << " val_loss "
        << e.val_loss << " val_acc " << e.val_accuracy << "\n"
        << std::flush;
  });
}

// ---------------------------------------------------------------------------

struct GenerateCmd {
  std::size_t frames_per_pair = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> schemes;
  std::string snr;
  std::string out;
  bool cfo = false, timing = false, any_snr = false;

  void add(CLI::App* app) {
    app->add_option("--frames-per-pair,-n", frames_per_pair, "Frames per (scheme, SNR) pair")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--schemes", schemes, "Modulation schemes (default: all eleven)")->delimiter(',');
    app->add_option("--snr", snr, "Comma-separated SNR levels in dB (default: -20..18 step 2)");
    app->add_option("--out,-o", out, "Output corpus file");
    app->add_flag("--cfo", cfo, "Apply a random carrier frequency offset");
    app->add_flag("--timing-offset", timing, "Apply a random fractional timing offset");
    app->add_flag("--any-snr", any_snr, "Allow SNR levels outside the benchmark grid");
  }

  int exec(const std::vector<std::string>& args, std::ostream& os) const {
    dataset::DatasetSpec spec;
    spec.frames_per_pair = frames_per_pair;
    spec.seed = seed;
    if (!schemes.empty()) spec.schemes = parse_schemes(schemes);
    if (!snr.empty()) spec.snr_levels = parse_int_list(snr, "--snr");
    spec.synth.enable_cfo = cfo;
    spec.synth.enable_timing_offset = timing;
    spec.benchmark_mode = !any_snr;
    const dataset::Dataset ds = dataset::generate_dataset(spec);
    const fs::path path = out.empty() ? default_corpus() : fs::path(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    dataset::write_native(ds, path);
    json m = base_manifest("generate", args);
    m["values"] = {{"frames_per_pair", frames_per_pair}, {"schemes", json::array()}, {"snr_levels", spec.snr_levels},
                   {"cfo", cfo}, {"timing_offset", timing}, {"benchmark_mode", spec.benchmark_mode}};
    for (auto s : spec.schemes) m["values"]["schemes"].push_back(std::string(sigsynth::name(s)));
    m["seeds"] = {{"master", seed}};
    m["corpus_hash"] = ds.content_hash();
    m["output"] = path.string();
    write_json(path.string() + ".manifest.json", m);
    os << "wrote " << path.string() << "\n";
    print_summary(os, dataset::summarize(ds));
    return kExitOk;
  }
};

struct SummarizeCmd {
  std::string data;
  void add(CLI::App* app) { app->add_option("--data,-d", data, "Corpus file"); }
  int exec(std::ostream& os) const {
    const dataset::Dataset ds = dataset::read_native(data.empty() ? default_corpus() : fs::path(data));
    const auto st = dataset::summarize(ds);
    os << "snr_db";
    for (const auto& [m, n] : st.per_class) os << "," << sigsynth::name(m);
    os << "\n";
    for (const auto& [s, n] : st.per_snr) {
      os << s;
      for (const auto& [m, c] : st.per_class) {
        const auto it = st.counts.find({m, s});
        os << "," << (it == st.counts.end() ? 0 : it->second);
      }
      os << "\n";
    }
    print_summary(os, st);
    os << "corpus hash " << ds.content_hash() << "\n";
    return kExitOk;
  }
};

struct SplitCmd {
  std::string data, out;
  std::uint64_t seed = 0;
  std::vector<double> ratios{0.6, 0.2, 0.2};
  void add(CLI::App* app) {
    app->add_option("--data,-d", data, "Corpus file");
    app->add_option("--out,-o", out, "Split file (JSON)")->required();
    app->add_option("--seed", seed, "Master seed (the split uses its derived split seed)");
    app->add_option("--ratios", ratios, "Train/val/test ratios")->expected(3);
  }
  int exec(const std::vector<std::string>& args, std::ostream& os) const {
    const dataset::Dataset ds = dataset::read_native(data.empty() ? default_corpus() : fs::path(data));
    const Seeds seeds = expand_seeds(seed);
    const auto s = dataset::split(ds, dataset::SplitRatios{ratios[0], ratios[1], ratios[2]}, seeds.split);
    json j = base_manifest("split", args);
    j["seeds"] = seeds_json(seeds);
    j["ratios"] = ratios;
    j["corpus_hash"] = ds.content_hash();
    j["train"] = s.train;
    j["val"] = s.val;
    j["test"] = s.test;
    write_json(out, j);
    os << "train " << s.train.size() << ", val " << s.val.size() << ", test " << s.test.size() << "\n";
    return kExitOk;
  }
};

fs::path default_run_dir(const std::string& kind, const zoo::ModelConfig& cfg, std::uint64_t seed) {
  return data_dir() / "runs" / (kind + "-" + cfg.model_id + "-s" + std::to_string(seed));
}

json model_fields(const zoo::ModelConfig& cfg) {
  return {{"model_id", cfg.model_id},
          {"base_model", cfg.base_model},
          {"augmented", cfg.augmented.has_value()},
          {"param_count", zoo::param_count(cfg)},
          {"config_hash", seed_hex(zoo::config_hash(cfg))}};
}

struct TrainCmd {
  ModelOptions model;
  TrainOptions opts;
  bool dry_run = false;

  void add(CLI::App* app) {
    model.add(app);
    opts.add(app);
    app->add_flag("--dry-run", dry_run, "Print the resolved run settings and exit");
  }

  int exec(const std::vector<std::string>& args, std::ostream& os) const {
    const zoo::ModelConfig cfg = model.resolve();
    const Seeds seeds = expand_seeds(opts.seed);
    const train::TrainConfig tc = opts.resolve(cfg, seeds);
    json m = base_manifest("train", args);
    m.update(model_fields(cfg));
    m["values"] = train_values(tc, opts);
    m["seeds"] = seeds_json(seeds);
    m["decisions"] = decisions_json();
    if (dry_run) {
      os << m["values"].dump(2) << "\n";
      return kExitOk;
    }
    const fs::path corpus = opts.corpus();
    const dataset::Dataset ds = dataset::read_native(corpus);
    const auto split = load_split(opts, ds, seeds);
    const dataset::DatasetView train_set = restrict_snr(dataset::DatasetView(ds, split.train), opts);
    const dataset::DatasetView val_set = restrict_snr(dataset::DatasetView(ds, split.val), opts);
    const dataset::DatasetView test_set(ds, split.test);
    if (test_set.empty()) throw EmptyInput("test split is empty");

    const fs::path dir = opts.out.empty() ? default_run_dir("train", cfg, opts.seed) : fs::path(opts.out);
    fs::create_directories(dir);
    auto net = zoo::build<float>(cfg, seeds.init);
    const auto t0 = std::chrono::steady_clock::now();
    train::History h;
    with_progress(os, [&](const train::EpochObserver& obs) { h = train::fit(net, train_set, val_set, tc, obs); });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const train::EvalReport report = train::evaluate(net, test_set);

    train::write_text(dir / train::files::kConfig, zoo::save_config(cfg));
    train::write_history(dir / train::files::kHistory, h);
    train::write_report(dir, report);
    write_checkpoint(dir / train::files::kCheckpoint, snapshot(net, zoo::config_hash(cfg)));
    m["corpus_hash"] = ds.content_hash();
    m["corpus_path"] = corpus.string();
    m["corpus_metadata"] = json::parse(ds.metadata.empty() ? "{}" : ds.metadata, nullptr, false);
    m["frames"] = {{"train", train_set.size()}, {"val", val_set.size()}, {"test", test_set.size()}};
    m["stop_epoch"] = h.stop_epoch();
    m["best_epoch"] = h.best_epoch;
    m["stop_reason"] = h.stop_reason;
    m["train_seconds"] = secs;
    write_json(dir / train::files::kManifest, m);
    os << cfg.model_id << ": test accuracy " << std::setprecision(4) << std::fixed << report.overall_accuracy
       << std::defaultfloat << " after " << h.stop_epoch() << " epochs (" << h.stop_reason << "), run " << dir.string()
       << "\n";
    return kExitOk;
  }
};

struct EvaluateCmd {
  std::string run_dir, data, out;
  void add(CLI::App* app) {
    app->add_option("--run,-r", run_dir, "Run directory from train")->required();
    app->add_option("--data,-d", data, "Corpus file (default: the one recorded in the manifest)");
    app->add_option("--out,-o", out, "Where to write the evaluation CSVs (default: the run directory)");
  }
  int exec(std::ostream& os) const {
    const fs::path dir(run_dir);
    const json m = json::parse(train::read_text(dir / train::files::kManifest));
    const zoo::ModelConfig cfg = zoo::load_config(train::read_text(dir / train::files::kConfig));
    const fs::path corpus = data.empty() ? fs::path(m.at("corpus_path").get<std::string>()) : fs::path(data);
    const dataset::Dataset ds = dataset::read_native(corpus);
    if (ds.content_hash() != m.at("corpus_hash").get<std::string>())
      throw ConsistencyError("corpus " + corpus.string() + " differs from the one the run was trained on");
    TrainOptions o;
    o.seed = m.at("seeds").at("master").get<std::uint64_t>();
    o.ratios = m.at("values").at("split_ratios").get<std::vector<double>>();
    const auto& sf = m.at("values").at("split_file");
    if (!sf.is_null()) o.split_file = sf.get<std::string>();
    const auto split = load_split(o, ds, expand_seeds(o.seed));
    auto net = zoo::build<float>(cfg, 0);
    restore(net, read_checkpoint(dir / train::files::kCheckpoint), zoo::config_hash(cfg));
    const auto report = train::evaluate(net, dataset::DatasetView(ds, split.test));
    const fs::path dest = out.empty() ? dir : fs::path(out);
    fs::create_directories(dest);
    train::write_report(dest, report);
    os << cfg.model_id << ": test accuracy " << std::setprecision(4) << std::fixed << report.overall_accuracy
       << std::defaultfloat << " on " << report.n_test << " frames\n";
    return kExitOk;
  }
};

struct CurriculumCmd {
  ModelOptions model;
  TrainOptions opts;
  std::size_t scenarios = 11;
  bool warm_start = false;

  void add(CLI::App* app) {
    model.add(app);
    opts.add(app);
    app->add_option("--scenarios", scenarios, "Number of scenarios; 2 runs only [0,18] and [-20,18]")
        ->check(CLI::Range(1, 11));
    app->add_flag("--warm-start", warm_start, "Start each scenario from the previous scenario's weights");
  }

  int exec(const std::vector<std::string>& args, std::ostream& os) const {
    if (opts.train_snr_min || opts.train_snr_max)
      throw UsageError("curriculum sets the training SNR ranges itself; drop --train-snr-min/max");
    const zoo::ModelConfig cfg = model.resolve();
    const Seeds seeds = expand_seeds(opts.seed);
    const train::TrainConfig tc = opts.resolve(cfg, seeds);
    const fs::path corpus = opts.corpus();
    const dataset::Dataset ds = dataset::read_native(corpus);
    const auto split = load_split(opts, ds, seeds);
    const fs::path dir = opts.out.empty() ? default_run_dir("curriculum", cfg, opts.seed) : fs::path(opts.out);
    fs::create_directories(dir);

    train::CurriculumOptions co;
    co.scenarios = train::select_scenarios(scenarios);
    co.warm_start = warm_start;
    const auto results = train::run_curriculum(cfg, ds, split, tc, co, [&](const train::CurriculumResult& r) {
      os << r.scenario.label() << ": low " << std::setprecision(4) << std::fixed << r.accuracy.acc_low << " high "
         << r.accuracy.acc_high << " overall " << r.accuracy.acc_overall << std::defaultfloat << "\n"
         << std::flush;
    });

    train::write_text(dir / train::files::kConfig, zoo::save_config(cfg));
    train::write_curriculum(dir / train::files::kCurriculum, results);
    for (const auto& r : results) {
      const fs::path sub = dir / "scenarios" / ("lo" + std::to_string(r.scenario.lo));
      fs::create_directories(sub);
      train::write_report(sub, r.report);
      train::write_history(sub / train::files::kHistory, r.history);
    }
    json m = base_manifest("curriculum", args);
    m.update(model_fields(cfg));
    m["values"] = train_values(tc, opts);
    m["values"]["scenarios"] = json::array();
    for (const auto& s : co.scenarios) m["values"]["scenarios"].push_back(s.label());
    m["values"]["warm_start"] = warm_start;
    m["seeds"] = seeds_json(seeds);
    m["decisions"] = decisions_json();
    m["decisions"]["validation_split"] = "filtered to the scenario range like the training split";
    m["decisions"]["reinit"] = warm_start ? "warm start" : "fresh initialization per scenario";
    m["corpus_hash"] = ds.content_hash();
    m["corpus_path"] = corpus.string();
    write_json(dir / train::files::kManifest, m);
    const std::vector<train::RunRecord> runs{train::load_run(dir)};
    train::write_text(dir / "fig3.csv", report::fig3_csv(runs));
    os << "wrote " << results.size() << " scenarios to " << dir.string() << "\n";
    return kExitOk;
  }
};

struct AugmentCmd {
  ModelOptions model;
  std::string out;
  std::size_t bilstm_units = 64, gru_units = 64;
  void add(CLI::App* app) {
    auto* m = app->add_option("--model,-m", model.model, "Model id (" + known_models() + ")");
    auto* c = app->add_option("--config", model.config_path, "Model config JSON");
    m->excludes(c);
    app->add_option("--out,-o", out, "Output config JSON (default: stdout)");
    app->add_option("--bilstm-units", bilstm_units, "BiLSTM units per direction")->check(CLI::PositiveNumber);
    app->add_option("--gru-units", gru_units, "GRU units")->check(CLI::PositiveNumber);
  }
  int exec(std::ostream& os) const {
    const zoo::ModelConfig cfg = zoo::augment(model.resolve(), bilstm_units, gru_units);
    const std::string text = zoo::save_config(cfg);
    if (out.empty()) {
      os << text;
    } else {
      train::write_text(out, text);
      os << cfg.model_id << ": " << zoo::param_count(cfg) << " parameters, wrote " << out << "\n";
    }
    return kExitOk;
  }
};

struct ReportCmd {
  std::vector<std::string> runs;
  std::string out = "report";
  std::string trend = "log10";
  void add(CLI::App* app) {
    app->add_option("runs", runs, "Run directories")->required();
    app->add_option("--out,-o", out, "Output directory for tables and figures");
    app->add_option("--trend", trend, "Trend-line x axis")->check(CLI::IsMember({"log10", "linear"}));
  }
  int exec(std::ostream& os) const {
    std::vector<train::RunRecord> records;
    for (const auto& r : runs) records.push_back(train::load_run(r));
    report::ReportOptions ro;
    ro.trend_axis = trend == "linear" ? report::TrendAxis::linear_params : report::TrendAxis::log10_params;
    for (const auto& p : report::emit_report(records, out, ro)) os << "wrote " << p.string() << "\n";
    return kExitOk;
  }
};

struct ParamsCmd {
  ModelOptions model;
  void add(CLI::App* app) { model.add(app); }
  int exec(std::ostream& os) const {
    os << "model,param_count,published\n";
    if (model.given()) {
      const auto cfg = model.resolve();
      const auto pub = zoo::published_figures(cfg.base_model).param_count;
      os << cfg.model_id << "," << zoo::param_count(cfg) << "," << (cfg.augmented ? "" : std::to_string(pub)) << "\n";
      return kExitOk;
    }
    for (auto id : zoo::kModelIds) {
      auto cfg = zoo::builtin_config(id);
      if (model.augment) cfg = zoo::augment(cfg);
      os << cfg.model_id << "," << zoo::param_count(cfg) << ","
         << (model.augment ? "" : std::to_string(zoo::published_figures(id).param_count)) << "\n";
    }
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modulation-recognition benchmark workbench"};
  app.name("amrbench");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GenerateCmd gen;
  gen.add(app.add_subcommand("generate", "Synthesize a labeled IQ corpus"));
  SummarizeCmd sum;
  sum.add(app.add_subcommand("summarize", "Print class x SNR counts of a corpus"));
  SplitCmd spl;
  spl.add(app.add_subcommand("split", "Write a stratified train/val/test split"));
  TrainCmd trn;
  trn.add(app.add_subcommand("train", "Train and evaluate one model"));
  EvaluateCmd evl;
  evl.add(app.add_subcommand("evaluate", "Re-evaluate a trained run on its test split"));
  CurriculumCmd cur;
  cur.add(app.add_subcommand("curriculum", "Run the SNR-range training scenarios"));
  AugmentCmd aug;
  aug.add(app.add_subcommand("augment", "Write the BiLSTM + GRU variant of a config"));
  ReportCmd rep;
  rep.add(app.add_subcommand("report", "Build tables and figures from run directories"));
  ParamsCmd par;
  par.add(app.add_subcommand("params", "Print parameter counts"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("generate")) return gen.exec(args, out);
    if (app.got_subcommand("summarize")) return sum.exec(out);
    if (app.got_subcommand("split")) return spl.exec(args, out);
    if (app.got_subcommand("train")) return trn.exec(args, out);
    if (app.got_subcommand("evaluate")) return evl.exec(out);
    if (app.got_subcommand("curriculum")) return cur.exec(args, out);
    if (app.got_subcommand("augment")) return aug.exec(out);
    if (app.got_subcommand("report")) return rep.exec(out);
    if (app.got_subcommand("params")) return par.exec(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidSpec& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace amr::cli
