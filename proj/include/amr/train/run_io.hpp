#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amr/train/curriculum.hpp"
#include "amr/train/trainer.hpp"

namespace amr::train {

// Run directory layout:
//   config.json             model config snapshot
//   manifest.json           command, resolved values, seeds, corpus hash, version, timestamp
//   history.csv             per-epoch losses and accuracies (no timings, so it is reproducible)
//   eval_summary.csv        overall accuracy and counts
//   eval_per_snr.csv        snr_db,n,correct,accuracy
//   eval_per_modulation.csv modulation,class_index,n,correct,accuracy
//   eval_confusion.csv      11 x 11 counts, rows = true class
//   checkpoint.amrc         trained parameters
//   curriculum.csv          scenario rows (curriculum runs only)
namespace files {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kHistory = "history.csv";
inline constexpr const char* kSummary = "eval_summary.csv";
inline constexpr const char* kPerSnr = "eval_per_snr.csv";
inline constexpr const char* kPerModulation = "eval_per_modulation.csv";
inline constexpr const char* kConfusion = "eval_confusion.csv";
inline constexpr const char* kCheckpoint = "checkpoint.amrc";
inline constexpr const char* kCurriculum = "curriculum.csv";
}  // namespace files

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_history(const std::filesystem::path& file, const History& h);
void write_report(const std::filesystem::path& dir, const EvalReport& r);
/// Rebuilds the report from the count columns, so accuracies are
/// bit-identical to the ones computed at evaluation time.
EvalReport read_report(const std::filesystem::path& dir);

struct CurriculumRow {
  std::string label;
  int lo = 0, hi = 18;
  double acc_low = 0.0, acc_high = 0.0, acc_overall = 0.0;
  std::size_t stop_epoch = 0;
};

void write_curriculum(const std::filesystem::path& file, const std::vector<CurriculumResult>& results);
std::vector<CurriculumRow> read_curriculum(const std::filesystem::path& file);

/// Everything the report stage needs from one completed run directory.
struct RunRecord {
  std::filesystem::path dir;
  nlohmann::json manifest;
  std::string model_id;
  std::string base_model;
  bool augmented = false;
  std::size_t param_count = 0;
  std::string corpus_hash;
  std::size_t stop_epoch = 0;
  std::optional<EvalReport> report;
  std::vector<CurriculumRow> curriculum;
};

/// Throws IoError when the directory or its manifest is missing.
RunRecord load_run(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& file, const std::string& text);
std::string read_text(const std::filesystem::path& file);

}  // namespace amr::train
