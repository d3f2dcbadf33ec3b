#pragma once

#include <string>
#include <vector>

#include "amr/dataset/dataset.hpp"
#include "amr/train/trainer.hpp"
#include "amr/zoo/zoo.hpp"

namespace amr::train {

struct CurriculumScenario {
  int lo = 0;
  int hi = 18;
  std::string label() const;  // "[-18,18]"
};

/// [0,18], [-2,18], ..., [-20,18].
std::vector<CurriculumScenario> curriculum_scenarios();

/// First and last scenario only (smoke mode), or the first `count`
/// scenarios keeping the full-range one last when count >= 2.
std::vector<CurriculumScenario> select_scenarios(std::size_t count);

struct Triplet {
  double acc_low = 0.0;      // test frames with snr < 0
  double acc_high = 0.0;     // test frames with snr >= 0 (0 dB counts as high)
  double acc_overall = 0.0;  // all test frames
};

/// Throws IncompleteData when the report lacks one of the two strata.
Triplet curriculum_triplet(const EvalReport& report);

struct CurriculumResult {
  CurriculumScenario scenario;
  Triplet accuracy;
  EvalReport report;
  History history;
};

struct CurriculumOptions {
  std::vector<CurriculumScenario> scenarios = curriculum_scenarios();
  bool warm_start = false;  // reuse the previous scenario's weights instead of fresh init
};

using ScenarioObserver = std::function<void(const CurriculumResult&)>;

/// For each scenario: filter the train and validation splits to the range,
/// train from a fresh initialization, evaluate on the whole test split.
/// Throws ScenarioError when a scenario selects no training frames, or
/// when the corpus does not span all twenty levels.
std::vector<CurriculumResult> run_curriculum(const zoo::ModelConfig& config, const dataset::Dataset& ds,
                                             const dataset::SplitIndices& split, const TrainConfig& cfg,
                                             const CurriculumOptions& options = {},
                                             const ScenarioObserver& observer = {});

}  // namespace amr::train
