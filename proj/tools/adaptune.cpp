// Command line for the adaptive fine-tuning harness: schedule simulation,
// synthetic corpus generation, single experiments, grid sweeps, table reports
// and the quadratic performance fit.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adaptune/corpus.hpp"
#include "adaptune/report.hpp"
#include "adaptune/runner.hpp"
#include "adaptune/schedule.hpp"
#include "adaptune/stats.hpp"

namespace {

using adaptune::runner::Approach;
using adaptune::runner::HyperParams;
using json = nlohmann::json;

std::string resolve_results_path(const std::string& path) {
  if (const char* dir = std::getenv("ADAPTUNE_RESULTS_DIR")) {
    if (dir[0] != '\0' && !std::filesystem::path(path).is_absolute()) {
      return (std::filesystem::path(dir) / path).string();
    }
  }
  return path;
}

struct CorpusEntry {
  std::string train, val, test;          // file-backed corpus
  std::optional<adaptune::corpus::SyntheticSpec> synthetic;
};

struct Config {
  HyperParams hp;
  std::vector<int> seeds = {43, 44, 45, 46, 47};
  std::map<std::string, CorpusEntry> corpora;
};

// Flat key/value JSON document; every optimization default mirrors the shared
// fine-tuning hyperparameters.
Config load_config(const std::string& path) {
  Config config;
  if (path.empty()) return config;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j = json::parse(in);

  config.hp.max_lr = j.value("max_lr", config.hp.max_lr);
  config.hp.warmup_epochs = j.value("warmup_epochs", config.hp.warmup_epochs);
  config.hp.patience = j.value("patience", config.hp.patience);
  config.hp.embed_dim = j.value("embed_dim", config.hp.embed_dim);
  config.hp.max_sequence_length =
      j.value("max_sequence_length", config.hp.max_sequence_length);
  config.hp.epoch_cap = j.value("epoch_cap", config.hp.epoch_cap);
  config.hp.scaling_seed = j.value("scaling_seed", config.hp.scaling_seed);
  auto& opt = config.hp.optimizer;
  opt.beta1 = j.value("beta1", opt.beta1);
  opt.beta2 = j.value("beta2", opt.beta2);
  opt.weight_decay = j.value("weight_decay", opt.weight_decay);
  opt.bias_correction = j.value("bias_correction", opt.bias_correction);
  opt.batch_size = j.value("batch_size", opt.batch_size);
  opt.epsilon = j.value("epsilon", opt.epsilon);
  if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<int>>();

  if (j.contains("corpora")) {
    for (const auto& [id, entry] : j.at("corpora").items()) {
      CorpusEntry c;
      if (entry.contains("synthetic")) {
        const json& s = entry.at("synthetic");
        adaptune::corpus::SyntheticSpec spec;
        spec.num_sentences = s.value("num_sentences", spec.num_sentences);
        if (s.contains("entity_types")) {
          spec.entity_types = s.at("entity_types").get<std::vector<std::string>>();
        }
        spec.noise_rate = s.value("noise_rate", spec.noise_rate);
        spec.seed = s.value("seed", spec.seed);
        c.synthetic = spec;
      } else {
        c.train = entry.value("train", "");
        c.val = entry.value("val", "");
        c.test = entry.value("test", "");
      }
      config.corpora[id] = c;
    }
  }
  return config;
}

adaptune::corpus::TaggedCorpus load_corpus_by_id(const Config& config,
                                                 const std::string& id) {
  auto it = config.corpora.find(id);
  if (it == config.corpora.end()) {
    throw std::runtime_error("corpus '" + id + "' is not registered in the config");
  }
  if (it->second.synthetic.has_value()) {
    adaptune::corpus::TaggedCorpus c =
        adaptune::corpus::generate_synthetic(*it->second.synthetic);
    c.source_id = id;
    return c;
  }
  return adaptune::corpus::load_corpus(it->second.train, it->second.val,
                                       it->second.test, id);
}

Approach parse_approach(const std::string& name) {
  const auto a = adaptune::runner::approach_from_string(name);
  if (!a.has_value()) {
    std::string known;
    for (const std::string& n : adaptune::runner::approach_names()) {
      known += known.empty() ? n : ", " + n;
    }
    throw CLI::ValidationError("approach", "unknown approach '" + name +
                                               "' (known: " + known + ")");
  }
  return *a;
}

// Replays the loss trace through the schedule, emitting the learning rate at
// every optimizer step plus the end-of-epoch decision. Exit code 2 when the
// trace (or --cap) runs out before the schedule stops.
int cmd_simulate_schedule(const std::string& trace_path,
                          const std::string& approach_name, double max_lr,
                          int warmup, int patience, int steps_per_epoch,
                          std::optional<double> pinned, int hard_cap) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open loss trace " + trace_path);
  std::vector<double> losses;
  double v = 0.0;
  while (in >> v) losses.push_back(v);

  HyperParams hp;
  hp.max_lr = max_lr;
  hp.warmup_epochs = warmup;
  hp.patience = patience;
  adaptune::schedule::ScheduleConfig config =
      adaptune::runner::schedule_for(parse_approach(approach_name), hp, pinned);
  config.steps_per_epoch = std::max(1, steps_per_epoch);

  namespace sched = adaptune::schedule;
  sched::ScheduleState state = sched::make_state(config);
  std::optional<int> stop_epoch;
  std::cout << "epoch,step_fraction,lr,val_loss,decision\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    if (hard_cap > 0 && static_cast<int>(e) >= hard_cap) break;
    for (int step = 0; step < config.steps_per_epoch; ++step) {
      const double t = static_cast<double>(e) +
                       static_cast<double>(step) /
                           static_cast<double>(config.steps_per_epoch);
      std::cout << e + 1 << ',' << t << ',' << sched::lr_at(config, state, t)
                << ",,\n";
    }
    const double end_of_epoch = static_cast<double>(e) + 1.0;
    const double lr_end = sched::lr_at(config, state, end_of_epoch);
    const sched::EpochDecision decision =
        sched::observe_validation_loss(config, state, losses[e]);
    std::cout << e + 1 << ',' << end_of_epoch << ',' << lr_end << ','
              << losses[e] << ',' << sched::to_string(decision) << '\n';
    if (decision == sched::EpochDecision::Stop) {
      stop_epoch = state.stop_epoch;
      break;
    }
  }
  if (stop_epoch.has_value()) {
    std::cout << "# stop_epoch," << *stop_epoch << '\n';
    return 0;
  }
  std::cout << "# stop_epoch,none (cap reached)\n";
  return 2;
}

int cmd_gen_corpus(const adaptune::corpus::SyntheticSpec& spec,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const adaptune::corpus::TaggedCorpus c = adaptune::corpus::generate_synthetic(spec);
  adaptune::corpus::write_corpus(c, out_dir);
  std::cout << "wrote " << c.train.size() << "/" << c.val.size() << "/"
            << c.test.size() << " train/val/test sentences to " << out_dir
            << '\n';
  return 0;
}

void print_summary(const std::vector<adaptune::runner::RunResult>& results) {
  std::vector<double> f1;
  std::vector<double> epochs;
  for (const auto& r : results) {
    if (r.converged) {
      f1.push_back(r.test_f1);
      epochs.push_back(r.epochs_run);
    }
  }
  std::cout << "runs: " << results.size() << ", converged: " << f1.size() << '\n';
  if (!f1.empty()) {
    const auto f1_summary = adaptune::stats::summarize(f1);
    const auto ep_summary = adaptune::stats::summarize(epochs);
    std::cout << "f1: "
              << adaptune::stats::format_uncertainty(f1_summary.mean,
                                                     f1_summary.delta, 4)
              << ", epochs: "
              << adaptune::stats::format_uncertainty(ep_summary.mean,
                                                     ep_summary.delta, 1)
              << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive fine-tuning experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "flat JSON config file")
      ->envname("ADAPTUNE_CONFIG");

  // simulate-schedule
  auto* sim = app.add_subcommand("simulate-schedule",
                                 "replay a loss trace through a schedule");
  std::string trace_path;
  std::string sim_approach = "adaptive";
  double sim_max_lr = 2e-5;
  int sim_warmup = 2;
  int sim_patience = 7;
  int sim_steps = 1;
  double sim_pinned = 0.0;
  int sim_cap = 0;
  sim->add_option("trace", trace_path, "loss trace file, one value per line")
      ->required();
  sim->add_option("--approach", sim_approach, "schedule variant name");
  sim->add_option("--max-lr", sim_max_lr, "maximum learning rate");
  sim->add_option("--warmup-epochs", sim_warmup, "warm-up epochs");
  sim->add_option("--patience", sim_patience, "cool-down length");
  sim->add_option("--steps-per-epoch", sim_steps, "interpolation granularity");
  sim->add_option("--pinned-epochs", sim_pinned,
                  "recorded epoch count for ablation-pinned-linear");
  sim->add_option("--cap", sim_cap, "hard epoch cap");

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "write a synthetic BIO corpus");
  adaptune::corpus::SyntheticSpec gen_spec;
  std::string gen_dir = "corpus";
  std::string gen_types = "LOC,ORG,PER";
  gen->add_option("--out", gen_dir, "output directory")->required();
  gen->add_option("--sentences", gen_spec.num_sentences, "total sentence count");
  gen->add_option("--entity-types", gen_types, "comma separated entity types");
  gen->add_option("--noise-rate", gen_spec.noise_rate,
                  "fraction of train/val mentions relabelled O");
  gen->add_option("--seed", gen_spec.seed, "generator seed");

  // run
  auto* run = app.add_subcommand("run", "run a single experiment spec");
  std::string run_corpus;
  std::string run_approach = "adaptive";
  double run_x = 1.0;
  double run_x_val = -1.0;
  bool run_merge = false;
  double run_pinned = 0.0;
  std::string run_results = "results.jsonl";
  bool run_no_traces = false;
  run->add_option("--corpus", run_corpus, "corpus id from the config")->required();
  run->add_option("--approach", run_approach, "fine-tuning approach");
  run->add_option("--x", run_x, "train scaling factor");
  run->add_option("--x-val", run_x_val,
                  "validation scaling factor (defaults to --x)");
  run->add_flag("--merge-train-val", run_merge,
                "retrain on train+val without validation monitoring");
  run->add_option("--pinned-epochs", run_pinned,
                  "recorded adaptive epoch count for merge/ablation modes");
  run->add_option("--results", run_results, "results file (JSON lines)");
  run->add_flag("--no-traces", run_no_traces, "drop per-epoch traces");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a full experiment grid");
  std::vector<std::string> sweep_corpora;
  std::vector<std::string> sweep_approaches = {"original", "stable", "adaptive"};
  std::vector<double> sweep_xs = {1.0};
  std::string sweep_results = "results.jsonl";
  bool sweep_no_traces = false;
  int sweep_jobs = 1;
  sweep_cmd->add_option("--corpus", sweep_corpora, "corpus ids")->required();
  sweep_cmd->add_option("--approach", sweep_approaches, "approaches");
  sweep_cmd->add_option("--x", sweep_xs, "scaling factors");
  sweep_cmd->add_option("--results", sweep_results, "results file (JSON lines)");
  sweep_cmd->add_flag("--no-traces", sweep_no_traces, "drop per-epoch traces");
  sweep_cmd->add_option("--jobs", sweep_jobs,
                        "parallel runs (ADAPTUNE_JOBS overrides)");

  // report
  auto* rep = app.add_subcommand("report", "build tables from results");
  std::string rep_results = "results.jsonl";
  std::string rep_kind = "main";
  std::string rep_format = "markdown";
  int rep_n_runs = 5;
  rep->add_option("--results", rep_results, "results file");
  rep->add_option("--kind", rep_kind, "main | ratio | stability | fit");
  rep->add_option("--format", rep_format, "markdown | csv");
  rep->add_option("--n-runs", rep_n_runs, "runs per experiment");

  // fit
  auto* fit = app.add_subcommand("fit", "quadratic performance-law fit");
  std::string fit_results = "results.jsonl";
  std::string fit_format = "markdown";
  fit->add_option("--results", fit_results, "results file");
  fit->add_option("--format", fit_format, "markdown | csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate_schedule(
          trace_path, sim_approach, sim_max_lr, sim_warmup, sim_patience,
          sim_steps,
          sim_pinned > 0.0 ? std::optional<double>(sim_pinned) : std::nullopt,
          sim_cap);
    }
    if (gen->parsed()) {
      gen_spec.entity_types.clear();
      std::string type;
      std::istringstream types(gen_types);
      while (std::getline(types, type, ',')) {
        if (!type.empty()) gen_spec.entity_types.push_back(type);
      }
      return cmd_gen_corpus(gen_spec, gen_dir);
    }

    const Config config = load_config(config_path);

    if (run->parsed()) {
      adaptune::runner::ExperimentSpec spec;
      spec.approach = parse_approach(run_approach);
      spec.corpus_id = run_corpus;
      spec.x_train = run_x;
      spec.x_val = run_x_val > 0.0 ? run_x_val : run_x;
      spec.seeds = config.seeds;
      spec.merge_train_val = run_merge;
      if (run_pinned > 0.0) spec.pinned_epochs = run_pinned;
      const auto base = load_corpus_by_id(config, run_corpus);
      const auto results = adaptune::runner::run_experiment(
          spec, base, config.hp, !run_no_traces);
      const std::string path = resolve_results_path(run_results);
      std::ofstream out(path, std::ios::app);
      if (!out) throw std::runtime_error("cannot open " + path);
      for (const auto& r : results) out << adaptune::runner::to_json_line(r) << '\n';
      print_summary(results);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      adaptune::runner::SweepGrid grid;
      for (const std::string& name : sweep_approaches) {
        grid.approaches.push_back(parse_approach(name));
      }
      grid.corpus_ids = sweep_corpora;
      grid.x_values = sweep_xs;
      grid.seeds = config.seeds;
      std::map<std::string, adaptune::corpus::TaggedCorpus> corpora;
      for (const std::string& id : sweep_corpora) {
        corpora[id] = load_corpus_by_id(config, id);
      }
      adaptune::runner::SweepOptions options;
      options.results_path = resolve_results_path(sweep_results);
      options.jobs = sweep_jobs;
      options.keep_traces = !sweep_no_traces;
      const int computed =
          adaptune::runner::sweep(grid, corpora, config.hp, options);
      std::cout << "computed " << computed << " new runs -> "
                << options.results_path << '\n';
      return 0;
    }

    if (rep->parsed() || fit->parsed()) {
      const std::string path =
          resolve_results_path(fit->parsed() ? fit_results : rep_results);
      const auto results = adaptune::runner::load_results(path);
      adaptune::report::Kind kind = adaptune::report::Kind::FitTable;
      if (rep->parsed()) {
        if (rep_kind == "main") kind = adaptune::report::Kind::MainTable;
        else if (rep_kind == "ratio") kind = adaptune::report::Kind::RatioTable;
        else if (rep_kind == "stability") kind = adaptune::report::Kind::StabilityTable;
        else if (rep_kind == "fit") kind = adaptune::report::Kind::FitTable;
        else throw std::runtime_error("unknown report kind '" + rep_kind + "'");
      }
      const auto table = adaptune::report::build_report(results, kind, rep_n_runs);
      const std::string format = fit->parsed() ? fit_format : rep_format;
      if (format == "csv") {
        std::cout << adaptune::report::to_csv(table);
      } else {
        std::cout << adaptune::report::to_markdown(table);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
