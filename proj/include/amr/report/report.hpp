#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amr/train/run_io.hpp"

namespace amr::report {

using train::RunRecord;

struct ModelSummary {
  std::string model_id;
  std::size_t param_count = 0;
  double test_accuracy = 0.0;
  std::size_t stop_epoch = 0;
};

enum class TrendAxis { log10_params, linear_params };

struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;  // accuracy - prediction, in input order
  TrendAxis axis = TrendAxis::log10_params;

  double predict(double param_count) const;
};

/// Ordinary least squares of accuracy on log10(param count) (or on the raw
/// count). Throws FitError with fewer than two distinct x values.
TrendFit fit_trend(std::span<const std::pair<double, double>> points, TrendAxis axis = TrendAxis::log10_params);

struct ReportOptions {
  TrendAxis trend_axis = TrendAxis::log10_params;
};

/// Throws ConsistencyError when runs disagree on the corpus hash or repeat a
/// model id, IncompleteData when a run carries neither an evaluation nor
/// curriculum results.
void check_runs(const std::vector<RunRecord>& runs);

/// Runs with an evaluation, in table order (zoo order, base before augmented).
std::vector<const RunRecord*> evaluated_runs(const std::vector<RunRecord>& runs);
std::vector<const RunRecord*> curriculum_runs(const std::vector<RunRecord>& runs);

std::vector<ModelSummary> summaries(const std::vector<RunRecord>& runs);

std::string table1_csv(const std::vector<RunRecord>& runs);
std::string table2_csv(const std::vector<RunRecord>& runs);
std::string table3_csv(const std::vector<RunRecord>& runs);

std::string fig1_csv(const std::vector<RunRecord>& runs, TrendAxis axis);
std::string fig1_svg(const std::vector<RunRecord>& runs, TrendAxis axis);
/// One SNR column plus one accuracy column per evaluated run.
std::string fig2_csv(const std::vector<RunRecord>& runs);
/// model,snr_db,accuracy: one row per (run, SNR level).
std::string fig2_long_csv(const std::vector<RunRecord>& runs);
std::string fig2_svg(const std::vector<RunRecord>& runs);
/// model,scenario,lo,hi,acc_low,acc_high,acc_overall.
std::string fig3_csv(const std::vector<RunRecord>& runs);
std::string fig3_svg(const std::vector<RunRecord>& runs);

/// Writes every table and figure the runs support into `out_dir` and
/// returns the written paths. Pure function of the inputs: identical runs
/// give identical bytes.
std::vector<std::filesystem::path> emit_report(const std::vector<RunRecord>& runs,
                                               const std::filesystem::path& out_dir,
                                               const ReportOptions& options = {});

}  // namespace amr::report
