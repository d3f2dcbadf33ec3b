#include "amr/train/curriculum.hpp"

#include <optional>
#include <set>

#include "amr/common/error.hpp"
#include "amr/tensor/checkpoint.hpp"

namespace amr::train {

std::string CurriculumScenario::label() const {
  return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
}

std::vector<CurriculumScenario> curriculum_scenarios() {
  std::vector<CurriculumScenario> out;
  for (int lo = 0; lo >= -20; lo -= 2) out.push_back({lo, 18});
  return out;
}

std::vector<CurriculumScenario> select_scenarios(std::size_t count) {
  auto all = curriculum_scenarios();
  if (count == 0) throw InvalidInput("scenario count must be positive");
  if (count >= all.size()) return all;
  if (count == 1) return {all.front()};
  std::vector<CurriculumScenario> out(all.begin(), all.begin() + static_cast<long>(count - 1));
  out.push_back(all.back());
  return out;
}

Triplet curriculum_triplet(const EvalReport& r) {
  std::size_t n_low = 0, n_high = 0;
  double hit_low = 0.0, hit_high = 0.0;
  for (const auto& [snr, n] : r.per_snr_count) {
    const double hits = r.per_snr.at(snr) * static_cast<double>(n);
    if (snr < 0) {
      n_low += n;
      hit_low += hits;
    } else {
      n_high += n;
      hit_high += hits;
    }
  }
  if (n_low == 0 || n_high == 0) throw IncompleteData("test set lacks frames below or above 0 dB");
  return {hit_low / static_cast<double>(n_low), hit_high / static_cast<double>(n_high), r.overall_accuracy};
}

namespace {

DatasetView filtered(const dataset::Dataset& ds, const dataset::Indices& idx, int lo, int hi) {
  return dataset::filter_by_snr(DatasetView(ds, idx), lo, hi);
}

}  // namespace

std::vector<CurriculumResult> run_curriculum(const zoo::ModelConfig& config, const dataset::Dataset& ds,
                                             const dataset::SplitIndices& split, const TrainConfig& cfg,
                                             const CurriculumOptions& options, const ScenarioObserver& observer) {
  std::set<int> levels;
  for (const auto& f : ds.frames) levels.insert(f.snr_db);
  for (int snr : dataset::kBenchmarkSnrs)
    if (!levels.count(snr))
      throw ScenarioError("corpus lacks SNR level " + std::to_string(snr) + " dB; curriculum needs all twenty");

  const DatasetView test(ds, split.test);
  std::vector<CurriculumResult> results;
  std::optional<Checkpoint> carry;
  for (const auto& sc : options.scenarios) {
    const DatasetView tr = filtered(ds, split.train, sc.lo, sc.hi);
    const DatasetView va = filtered(ds, split.val, sc.lo, sc.hi);
    if (tr.empty() || va.empty()) throw ScenarioError("scenario " + sc.label() + " selects no frames");
    TrainConfig scfg = cfg;
    scfg.seed = derive_seed(cfg.seed, sc.label());
    auto model = zoo::build<float>(config, derive_seed(scfg.seed, "model"));
    if (options.warm_start && carry) restore(model, *carry, 0);
    CurriculumResult res;
    res.scenario = sc;
    res.history = fit(model, tr, va, scfg);
    res.report = evaluate(model, test);
    res.accuracy = curriculum_triplet(res.report);
    if (options.warm_start) carry = snapshot(model, 0);
    if (observer) observer(res);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace amr::train
