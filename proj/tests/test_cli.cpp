#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amr/cli/cli.hpp"
#include "amr/dataset/native_io.hpp"
#include "amr/train/run_io.hpp"
#include "amr/zoo/zoo.hpp"

using namespace amr;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path workspace(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("amr_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"params"}).code, cli::kExitOk);
  EXPECT_EQ(run({"--version"}).code, cli::kExitOk);
  EXPECT_EQ(run({"train", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"no-such-command"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"summarize", "-d", "/nonexistent/corpus.amrd"}).code, cli::kExitRuntime);
}

TEST(Cli, UnknownModelListsTheNine) {
  const auto r = run({"train", "--model", "ResNet", "--dry-run"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  for (auto id : zoo::kModelIds) EXPECT_NE(r.err.find(id), std::string::npos) << id;
}

TEST(Cli, ParamsTableCoversEveryModel) {
  const auto r = run({"params"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("CNN1,1592383,1592383"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("MCLDNN,405887,405887"), std::string::npos);
}

TEST(Cli, TrainingDefaultsResolvePerModel) {
  const auto values = [](std::vector<std::string> args) {
    args.insert(args.begin(), {"train", "--dry-run"});
    const auto r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return nlohmann::json::parse(r.out);
  };
  auto v = values({"--model", "LSTM"});
  EXPECT_EQ(v["batch_size"], 400);
  EXPECT_EQ(v["learning_rate"], 1e-3);
  EXPECT_EQ(v["patience"], 5);
  v = values({"--model", "CNN1", "--augment"});
  EXPECT_EQ(v["batch_size"], 1024);
  EXPECT_EQ(v["learning_rate"], 1e-4);
  v = values({"--model", "CGDNet", "--batch-size", "64", "--lr", "0.5"});
  EXPECT_EQ(v["batch_size"], 64);
  EXPECT_EQ(v["learning_rate"], 0.5);
  v = values({"--model", "MCNet"});
  EXPECT_EQ(v["batch_size"], 128);
}

TEST(Cli, DataDirectoryFromEnvironment) {
  const auto dir = workspace("env");
  ::setenv(cli::kDataDirEnv, dir.c_str(), 1);
  const auto g = run({"generate", "-n", "1", "--seed", "3"});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(fs::exists(dir / "corpus.amrd"));
  const auto s = run({"summarize"});
  ::unsetenv(cli::kDataDirEnv);
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("frames 220"), std::string::npos) << s.out;
}

TEST(Cli, ExternallyConvertedCorpusIsAccepted) {
  const auto dir = workspace("converted");
  dataset::DatasetSpec spec;
  spec.frames_per_pair = 5;
  spec.seed = 5;
  auto ds = dataset::generate_dataset(spec);
  ds.metadata = R"({"provenance":"converted","source":"external"})";
  dataset::write_native(ds, dir / "corpus.amrd");
  const auto run_dir = dir / "run";
  const auto t = run({"train", "--model", "MCNet", "-d", (dir / "corpus.amrd").string(), "-o", run_dir.string(),
                      "--max-epochs", "1", "--batch-size", "64"});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto rec = train::load_run(run_dir);
  EXPECT_EQ(rec.corpus_hash, ds.content_hash());
  EXPECT_EQ(rec.manifest["corpus_metadata"]["provenance"], "converted");
  const auto e = run({"evaluate", "-r", run_dir.string(), "-d", (dir / "corpus.amrd").string()});
  EXPECT_EQ(e.code, 0) << e.err;
}

TEST(Cli, EvaluateRejectsADifferentCorpus) {
  const auto dir = workspace("mismatch");
  ASSERT_EQ(run({"generate", "-n", "5", "--seed", "1", "-o", (dir / "a.amrd").string()}).code, 0);
  ASSERT_EQ(run({"generate", "-n", "5", "--seed", "2", "-o", (dir / "b.amrd").string()}).code, 0);
  const auto run_dir = dir / "run";
  ASSERT_EQ(run({"train", "--model", "MCNet", "-d", (dir / "a.amrd").string(), "-o", run_dir.string(),
                 "--max-epochs", "1"})
                .code,
            0);
  const auto e = run({"evaluate", "-r", run_dir.string(), "-d", (dir / "b.amrd").string()});
  EXPECT_EQ(e.code, cli::kExitRuntime);
}

TEST(Cli, SeedExpansionIsStable) {
  const auto a = cli::expand_seeds(7), b = cli::expand_seeds(7), c = cli::expand_seeds(8);
  EXPECT_EQ(a.split, b.split);
  EXPECT_EQ(a.init, b.init);
  EXPECT_NE(a.split, a.init);
  EXPECT_NE(a.init, c.init);
}
