#include "adaptune/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "adaptune/nermetrics.hpp"

namespace adaptune::runner {

using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

struct ApproachName {
  Approach approach;
  const char* name;
};

constexpr ApproachName kApproachNames[] = {
    {Approach::Original, "original"},
    {Approach::Stable, "stable"},
    {Approach::Adaptive, "adaptive"},
    {Approach::AdaptiveP0, "adaptive-p0"},
    {Approach::AdaptiveP5, "adaptive-p5"},
    {Approach::AdaptiveP9, "adaptive-p9"},
    {Approach::AdaptiveNoResumption, "adaptive-no-resumption"},
    {Approach::AdaptiveConstantCooldown, "adaptive-constant-cooldown"},
    {Approach::AblationFixedHybrid, "ablation-fixed20-hybrid"},
    {Approach::AblationPinnedLinear, "ablation-pinned-linear"},
};

}  // namespace

std::string to_string(Approach a) {
  for (const auto& entry : kApproachNames) {
    if (entry.approach == a) return entry.name;
  }
  return "?";
}

std::optional<Approach> approach_from_string(const std::string& name) {
  for (const auto& entry : kApproachNames) {
    if (name == entry.name) return entry.approach;
  }
  return std::nullopt;
}

std::vector<std::string> approach_names() {
  std::vector<std::string> names;
  for (const auto& entry : kApproachNames) names.emplace_back(entry.name);
  return names;
}

bool uses_early_stopping(Approach a) {
  switch (a) {
    case Approach::Original:
    case Approach::Stable:
    case Approach::AblationFixedHybrid:
    case Approach::AblationPinnedLinear:
      return false;
    default:
      return true;
  }
}

void ExperimentSpec::validate() const {
  if (corpus_id.empty()) {
    throw std::invalid_argument("experiment needs a corpus id");
  }
  if (!(x_train > 0.0) || x_train > 1.0 || !(x_val > 0.0) || x_val > 1.0) {
    throw std::invalid_argument("scaling factors must be in (0, 1]");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("experiment needs at least one seed");
  }
  const bool needs_pinned =
      approach == Approach::AblationPinnedLinear ||
      (merge_train_val && uses_early_stopping(approach));
  if (needs_pinned && !pinned_epochs.has_value()) {
    throw std::invalid_argument(
        "this experiment needs pinned_epochs (recorded adaptive epoch count)");
  }
  if (pinned_epochs.has_value() && !needs_pinned) {
    throw std::invalid_argument(
        "pinned_epochs only applies to merge or ablation modes");
  }
  if (pinned_epochs.has_value() && !(*pinned_epochs > 0.0)) {
    throw std::invalid_argument("pinned_epochs must be positive");
  }
}

schedule::ScheduleConfig schedule_for(Approach a, const HyperParams& hp,
                                      std::optional<double> pinned_epochs) {
  schedule::ScheduleConfig config;
  config.warmup_epochs = hp.warmup_epochs;
  config.max_lr = hp.max_lr;

  auto adaptive = [&](int patience, schedule::CooldownShape shape, bool resume) {
    config.mode = schedule::AdaptiveMode{patience, shape, resume};
  };
  auto pinned_total = [&]() {
    return static_cast<int>(std::lround(pinned_epochs.value()));
  };

  switch (a) {
    case Approach::Original:
      config.mode = schedule::FixedMode{5, schedule::DecayShape::Linear, 0};
      break;
    case Approach::Stable:
      config.mode = schedule::FixedMode{20, schedule::DecayShape::Linear, 0};
      break;
    case Approach::Adaptive:
      adaptive(hp.patience, schedule::CooldownShape::Linear, true);
      break;
    case Approach::AdaptiveP0:
      adaptive(0, schedule::CooldownShape::Linear, true);
      break;
    case Approach::AdaptiveP5:
      adaptive(5, schedule::CooldownShape::Linear, true);
      break;
    case Approach::AdaptiveP9:
      adaptive(9, schedule::CooldownShape::Linear, true);
      break;
    case Approach::AdaptiveNoResumption:
      adaptive(hp.patience, schedule::CooldownShape::Linear, false);
      break;
    case Approach::AdaptiveConstantCooldown:
      adaptive(hp.patience, schedule::CooldownShape::Constant, true);
      break;
    case Approach::AblationFixedHybrid:
      config.mode = schedule::FixedMode{20, schedule::DecayShape::Hybrid, hp.patience};
      break;
    case Approach::AblationPinnedLinear:
      config.mode =
          schedule::FixedMode{pinned_total(), schedule::DecayShape::Linear, 0};
      break;
  }
  config.validate();
  return config;
}

namespace {

// Retraining on train+val reuses the recorded epoch count with the hybrid
// decay; the patience is clamped when the pinned count leaves no room for it.
schedule::ScheduleConfig merged_schedule(Approach a, const HyperParams& hp,
                                         double pinned) {
  schedule::ScheduleConfig config;
  config.warmup_epochs = hp.warmup_epochs;
  config.max_lr = hp.max_lr;
  const int total = static_cast<int>(std::lround(pinned));
  if (total <= hp.warmup_epochs) {
    throw std::invalid_argument("pinned epoch count within the warm-up");
  }
  int patience = hp.patience;
  switch (a) {
    case Approach::AdaptiveP0:
      patience = 0;
      break;
    case Approach::AdaptiveP5:
      patience = 5;
      break;
    case Approach::AdaptiveP9:
      patience = 9;
      break;
    default:
      break;
  }
  patience = std::min(patience, total - hp.warmup_epochs - 1);
  if (patience < 1) {
    config.mode = schedule::FixedMode{total, schedule::DecayShape::Linear, 0};
  } else {
    config.mode = schedule::FixedMode{total, schedule::DecayShape::Hybrid, patience};
  }
  config.validate();
  return config;
}

double test_f1_of(const tagger::TaggerModel& model,
                  const corpus::TaggedCorpus& scaled,
                  const tagger::EncodedCorpus& data, const tagger::TagSet& tags) {
  std::vector<std::vector<std::string>> gold;
  std::vector<std::vector<std::string>> pred;
  gold.reserve(scaled.test.size());
  pred.reserve(scaled.test.size());
  for (std::size_t i = 0; i < scaled.test.size(); ++i) {
    gold.push_back(scaled.test[i].tags);
    const std::vector<int> ids =
        model.predict(data.test[i].tokens, tags.outside_id());
    std::vector<std::string> row;
    row.reserve(ids.size());
    for (int id : ids) row.push_back(tags.tag(id));
    pred.push_back(std::move(row));
  }
  return ner::evaluate(gold, pred).micro_scores.f1;
}

}  // namespace

RunResult run_single(const ExperimentSpec& spec, int seed,
                     const corpus::TaggedCorpus& base, const HyperParams& hp,
                     bool keep_traces) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();

  corpus::ScalingSpec scaling{spec.x_train, spec.x_val, 1.0};
  corpus::TaggedCorpus scaled = corpus::scale(base, scaling, hp.scaling_seed);
  if (spec.merge_train_val) {
    scaled = corpus::merge_train_val(scaled);
  }

  schedule::ScheduleConfig schedule_config =
      spec.merge_train_val && uses_early_stopping(spec.approach)
          ? merged_schedule(spec.approach, hp, spec.pinned_epochs.value())
          : schedule_for(spec.approach, hp, spec.pinned_epochs);

  const tagger::Vocabulary vocab = tagger::Vocabulary::build(scaled.train);
  const tagger::TagSet tags = tagger::TagSet::from_types(scaled.tag_vocabulary);
  const tagger::EncodedCorpus data = tagger::encode(scaled, vocab, tags);

  tagger::TaggerConfig model_config;
  model_config.vocab_size = vocab.size();
  model_config.embed_dim = hp.embed_dim;
  model_config.num_tags = tags.size();
  model_config.max_sequence_length = hp.max_sequence_length;

  tagger::TrainOutcome outcome =
      tagger::train(tagger::TaggerModel(model_config), data, schedule_config,
                    hp.optimizer, static_cast<std::uint64_t>(seed), hp.epoch_cap);

  RunResult r;
  r.approach = to_string(spec.approach);
  r.corpus_id = spec.corpus_id;
  r.x_train = spec.x_train;
  r.x_val = spec.x_val;
  r.merged = spec.merge_train_val;
  r.pinned_epochs = spec.pinned_epochs;
  r.seed = seed;
  r.epochs_run = outcome.epochs_run;
  if (outcome.diverged) {
    r.stop_cause = "diverged";
    r.test_f1 = 0.0;
  } else if (outcome.hit_epoch_cap) {
    r.stop_cause = "cap";
    r.test_f1 = 0.0;
  } else {
    r.stop_cause = uses_early_stopping(spec.approach) && !spec.merge_train_val
                       ? "schedule"
                       : "fixed";
    r.test_f1 = test_f1_of(outcome.model, scaled, data, tags);
  }
  r.converged = r.test_f1 > 0.0;
  if (keep_traces) {
    r.per_epoch_val_loss = std::move(outcome.per_epoch_val_loss);
    r.per_epoch_lr = std::move(outcome.per_epoch_lr);
  }
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return r;
}

std::vector<RunResult> run_experiment(const ExperimentSpec& spec,
                                      const corpus::TaggedCorpus& base,
                                      const HyperParams& hp, bool keep_traces) {
  spec.validate();
  std::vector<RunResult> results;
  results.reserve(spec.seeds.size());
  for (int seed : spec.seeds) {
    results.push_back(run_single(spec, seed, base, hp, keep_traces));
  }
  return results;
}

namespace {

json trace_to_json(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) {
    if (std::isfinite(v)) {
      arr.push_back(v);
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

std::vector<double> trace_from_json(const json& arr) {
  std::vector<double> values;
  values.reserve(arr.size());
  for (const auto& v : arr) {
    values.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                 : v.get<double>());
  }
  return values;
}

}  // namespace

std::string to_json_line(const RunResult& r) {
  json j;
  j["schema"] = kSchemaVersion;
  j["approach"] = r.approach;
  j["corpus"] = r.corpus_id;
  j["x_train"] = r.x_train;
  j["x_val"] = r.x_val;
  j["merged"] = r.merged;
  if (r.pinned_epochs.has_value()) {
    j["pinned_epochs"] = *r.pinned_epochs;
  } else {
    j["pinned_epochs"] = nullptr;
  }
  j["seed"] = r.seed;
  j["epochs_run"] = r.epochs_run;
  j["test_f1"] = r.test_f1;
  j["converged"] = r.converged;
  j["stop_cause"] = r.stop_cause;
  j["val_loss"] = trace_to_json(r.per_epoch_val_loss);
  j["lr"] = trace_to_json(r.per_epoch_lr);
  return j.dump();
}

RunResult from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("corrupt results line: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", -1) != kSchemaVersion) {
    throw std::runtime_error("corrupt results line: bad schema");
  }
  RunResult r;
  try {
    r.approach = j.at("approach").get<std::string>();
    r.corpus_id = j.at("corpus").get<std::string>();
    r.x_train = j.at("x_train").get<double>();
    r.x_val = j.at("x_val").get<double>();
    r.merged = j.at("merged").get<bool>();
    if (!j.at("pinned_epochs").is_null()) {
      r.pinned_epochs = j.at("pinned_epochs").get<double>();
    }
    r.seed = j.at("seed").get<int>();
    r.epochs_run = j.at("epochs_run").get<double>();
    r.test_f1 = j.at("test_f1").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.stop_cause = j.at("stop_cause").get<std::string>();
    r.per_epoch_val_loss = trace_from_json(j.at("val_loss"));
    r.per_epoch_lr = trace_from_json(j.at("lr"));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("corrupt results line: ") + e.what());
  }
  return r;
}

std::vector<RunResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::vector<RunResult> results;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      results.push_back(from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return results;
}

namespace {

using RunKey = std::tuple<std::string, std::string, double, double, bool, int>;

RunKey key_of(const RunResult& r) {
  return {r.approach, r.corpus_id, r.x_train, r.x_val, r.merged, r.seed};
}

struct WorkItem {
  ExperimentSpec spec;
  int seed;
};

}  // namespace

int sweep(const SweepGrid& grid,
          const std::map<std::string, corpus::TaggedCorpus>& corpora,
          const HyperParams& hp, const SweepOptions& options) {
  if (grid.approaches.empty() || grid.corpus_ids.empty() ||
      grid.x_values.empty() || grid.seeds.empty()) {
    throw std::invalid_argument("sweep: empty grid");
  }
  for (const std::string& id : grid.corpus_ids) {
    if (corpora.find(id) == corpora.end()) {
      throw std::invalid_argument("sweep: unknown corpus '" + id + "'");
    }
  }

  std::set<RunKey> existing;
  for (const RunResult& r : load_results(options.results_path)) {
    existing.insert(key_of(r));
  }

  std::vector<WorkItem> items;
  for (const std::string& corpus_id : grid.corpus_ids) {
    for (Approach approach : grid.approaches) {
      for (double x : grid.x_values) {
        for (int seed : grid.seeds) {
          ExperimentSpec spec;
          spec.approach = approach;
          spec.corpus_id = corpus_id;
          spec.x_train = x;
          spec.x_val = x;
          spec.seeds = {seed};
          spec.validate();
          if (existing.count({to_string(approach), corpus_id, x, x, false, seed})) {
            continue;
          }
          items.push_back({std::move(spec), seed});
        }
      }
    }
  }
  if (items.empty()) return 0;

  std::ofstream out(options.results_path, std::ios::app);
  if (!out) {
    throw std::runtime_error("sweep: cannot open " + options.results_path);
  }

  int jobs = options.jobs;
  if (const char* env = std::getenv("ADAPTUNE_JOBS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) jobs = parsed;
  }
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));

  if (jobs == 1) {
    for (const WorkItem& item : items) {
      const RunResult r = run_single(item.spec, item.seed,
                                     corpora.at(item.spec.corpus_id), hp,
                                     options.keep_traces);
      out << to_json_line(r) << '\n';
      out.flush();
    }
    return static_cast<int>(items.size());
  }

  // Workers grab items; the writer emits lines strictly in grid order so the
  // results file stays deterministic regardless of completion order.
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::optional<RunResult>> done(items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      try {
        RunResult r = run_single(items[i].spec, items[i].seed,
                                 corpora.at(items[i].spec.corpus_id), hp,
                                 options.keep_traces);
        std::lock_guard<std::mutex> lock(mu);
        done[i] = std::move(r);
        cv.notify_all();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        cv.notify_all();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);

  std::size_t flushed = 0;
  {
    std::unique_lock<std::mutex> lock(mu);
    while (flushed < items.size()) {
      cv.wait(lock, [&] { return failure || done[flushed].has_value(); });
      if (failure) break;
      out << to_json_line(*done[flushed]) << '\n';
      out.flush();
      done[flushed].reset();
      ++flushed;
    }
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return static_cast<int>(items.size());
}

}  // namespace adaptune::runner
