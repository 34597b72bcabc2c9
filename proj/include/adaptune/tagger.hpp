#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "adaptune/corpus.hpp"
#include "adaptune/schedule.hpp"

namespace adaptune::tagger {

// Token-id vocabulary built from the training split; id 0 is the unknown
// token, everything unseen at validation/test time maps to it.
class Vocabulary {
 public:
  static Vocabulary build(const std::vector<corpus::Sentence>& train);
  int id(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> ids_;
};

// Tag-id codec: O = 0, then B-T / I-T per entity type in the given order.
class TagSet {
 public:
  static TagSet from_types(const std::vector<std::string>& entity_types);
  int id(const std::string& tag) const;  // throws on unknown tag
  const std::string& tag(int id) const { return tags_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(tags_.size()); }
  int outside_id() const { return 0; }

 private:
  std::vector<std::string> tags_;
  std::map<std::string, int> ids_;
};

struct TaggerConfig {
  int vocab_size = 0;
  int embed_dim = 16;
  int num_tags = 0;
  int max_sequence_length = 128;

  static constexpr int kWindow = 3;  // previous / current / next token

  std::size_t embedding_size() const {
    return static_cast<std::size_t>(vocab_size) * static_cast<std::size_t>(embed_dim);
  }
  std::size_t weight_size() const {
    return static_cast<std::size_t>(num_tags) * context_dim();
  }
  std::size_t context_dim() const {
    return static_cast<std::size_t>(kWindow) * static_cast<std::size_t>(embed_dim);
  }
  std::size_t param_count() const {
    return embedding_size() + weight_size() + static_cast<std::size_t>(num_tags);
  }
};

// Embedding lookup over a +-1 token window feeding a linear-softmax per-token
// classifier. Parameters live in one flat buffer: [embedding | weights | bias].
class TaggerModel {
 public:
  TaggerModel() = default;
  explicit TaggerModel(const TaggerConfig& config);

  const TaggerConfig& config() const { return cfg_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> embedding();
  std::span<double> weights();
  std::span<double> bias();
  std::span<const double> embedding() const;
  std::span<const double> weights() const;
  std::span<const double> bias() const;

  // Seeded uniform initialization in [-0.1, 0.1].
  void init_params(std::uint64_t seed);

  // Row-major (effective_length x num_tags) tag distributions; sentences are
  // truncated to max_sequence_length. Each row sums to 1.
  std::vector<double> forward(std::span<const int> tokens) const;

  // Argmax tags for the full sentence; positions beyond the truncation limit
  // fall back to `pad_tag`.
  std::vector<int> predict(std::span<const int> tokens, int pad_tag) const;

 private:
  TaggerConfig cfg_;
  std::vector<double> params_;
};

struct OptimizerConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.01;  // decoupled
  bool bias_correction = true;
  int batch_size = 16;
  double epsilon = 1e-8;

  void validate() const;
};

struct Example {
  std::vector<int> tokens;
  std::vector<int> tags;
};

// Token-mean cross-entropy over the batch plus gradients for every parameter
// (same flat layout as the model). grad_out must have param_count() entries.
double loss_and_gradients(const TaggerModel& model,
                          std::span<const Example> batch,
                          std::span<double> grad_out);

// Mean validation cross-entropy without gradients.
double mean_cross_entropy(const TaggerModel& model,
                          std::span<const Example> data);

class AdamState {
 public:
  explicit AdamState(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}
  void step(std::span<double> params, std::span<const double> grads, double lr,
            const OptimizerConfig& opt);
  long long steps_taken() const { return t_; }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  long long t_ = 0;
};

struct EncodedCorpus {
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
};

EncodedCorpus encode(const corpus::TaggedCorpus& c, const Vocabulary& vocab,
                     const TagSet& tags);

struct TrainOutcome {
  int epochs_run = 0;
  std::vector<double> per_epoch_val_loss;  // NaN entries when no val split
  std::vector<double> per_epoch_lr;        // end-of-epoch learning rate
  TaggerModel model;
  bool diverged = false;
  bool hit_epoch_cap = false;
};

// Full training loop: seeded init, per-epoch reshuffle, per-step learning
// rate, one validation-loss observation per epoch. Everything is determined
// by (seed, data, configs). An empty validation split is allowed for fixed
// epoch schedules only (retraining on train+val).
TrainOutcome train(TaggerModel model, const EncodedCorpus& data,
                   schedule::ScheduleConfig schedule_config,
                   const OptimizerConfig& opt, std::uint64_t seed,
                   int epoch_cap = 500);

}  // namespace adaptune::tagger
