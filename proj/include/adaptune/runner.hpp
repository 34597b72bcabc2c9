#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaptune/corpus.hpp"
#include "adaptune/schedule.hpp"
#include "adaptune/tagger.hpp"

namespace adaptune::runner {

enum class Approach {
  Original,               // fixed 5 epochs, linear decay
  Stable,                 // fixed 20 epochs, linear decay
  Adaptive,               // patience 7, linear cool-down, resumption
  AdaptiveP0,
  AdaptiveP5,
  AdaptiveP9,
  AdaptiveNoResumption,
  AdaptiveConstantCooldown,
  AblationFixedHybrid,    // fixed 20 epochs, constant+linear decay
  AblationPinnedLinear,   // recorded epoch count, linear decay
};

std::string to_string(Approach a);
std::optional<Approach> approach_from_string(const std::string& name);
bool uses_early_stopping(Approach a);
std::vector<std::string> approach_names();

// Defaults mirror the shared training hyperparameters (Adam with decoupled
// weight decay 0.01, betas 0.9/0.999, bias correction, batch 16, max learning
// rate 2e-5, 2 warm-up epochs, patience 7, sequence length 128).
struct HyperParams {
  double max_lr = 2e-5;
  int warmup_epochs = 2;
  int patience = 7;
  tagger::OptimizerConfig optimizer;
  int embed_dim = 16;
  int max_sequence_length = 128;
  int epoch_cap = 500;
  // Subsampling stream shared by every run so that all approaches and seeds
  // see the same scaled dataset.
  std::uint64_t scaling_seed = 1;
};

struct ExperimentSpec {
  Approach approach = Approach::Adaptive;
  std::string corpus_id;
  double x_train = 1.0;
  double x_val = 1.0;
  std::vector<int> seeds = {43, 44, 45, 46, 47};
  bool merge_train_val = false;
  std::optional<double> pinned_epochs;

  void validate() const;
};

struct RunResult {
  std::string approach;
  std::string corpus_id;
  double x_train = 1.0;
  double x_val = 1.0;
  bool merged = false;
  std::optional<double> pinned_epochs;
  int seed = 0;
  double epochs_run = 0.0;
  double test_f1 = 0.0;
  bool converged = false;  // test_f1 > 0
  std::string stop_cause;  // "schedule" | "fixed" | "cap" | "diverged"
  std::vector<double> per_epoch_val_loss;
  std::vector<double> per_epoch_lr;
  // Wall time is informational only and never serialized: results files are
  // byte-deterministic functions of (config, seeds).
  double wall_time_s = 0.0;
};

schedule::ScheduleConfig schedule_for(Approach a, const HyperParams& hp,
                                      std::optional<double> pinned_epochs);

RunResult run_single(const ExperimentSpec& spec, int seed,
                     const corpus::TaggedCorpus& base, const HyperParams& hp,
                     bool keep_traces = true);

std::vector<RunResult> run_experiment(const ExperimentSpec& spec,
                                      const corpus::TaggedCorpus& base,
                                      const HyperParams& hp,
                                      bool keep_traces = true);

// --- persistence ------------------------------------------------------------

std::string to_json_line(const RunResult& r);
RunResult from_json_line(const std::string& line);  // throws on corrupt input
std::vector<RunResult> load_results(const std::string& path);

// --- sweeps -----------------------------------------------------------------

struct SweepGrid {
  std::vector<Approach> approaches;
  std::vector<std::string> corpus_ids;
  std::vector<double> x_values;  // applied to both train and val
  std::vector<int> seeds = {43, 44, 45, 46, 47};
};

struct SweepOptions {
  std::string results_path = "results.jsonl";
  int jobs = 1;  // ADAPTUNE_JOBS overrides when > 0
  bool keep_traces = true;
};

// Runs all grid cells, appending one JSON line per run in a fixed
// (corpus, approach, x, seed) order; records already present in the results
// file are skipped. Returns the number of newly computed runs.
int sweep(const SweepGrid& grid,
          const std::map<std::string, corpus::TaggedCorpus>& corpora,
          const HyperParams& hp, const SweepOptions& options);

}  // namespace adaptune::runner
