#include "adaptune/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "adaptune/kernels.hpp"
#include "adaptune/rng.hpp"

namespace adaptune::tagger {

Vocabulary Vocabulary::build(const std::vector<corpus::Sentence>& train) {
  Vocabulary v;
  v.tokens_.push_back("<unk>");
  v.ids_["<unk>"] = 0;
  for (const corpus::Sentence& s : train) {
    for (const std::string& token : s.tokens) {
      if (v.ids_.emplace(token, static_cast<int>(v.tokens_.size())).second) {
        v.tokens_.push_back(token);
      }
    }
  }
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? 0 : it->second;
}

TagSet TagSet::from_types(const std::vector<std::string>& entity_types) {
  TagSet t;
  t.tags_.push_back("O");
  t.ids_["O"] = 0;
  for (const std::string& type : entity_types) {
    for (const char* prefix : {"B-", "I-"}) {
      std::string tag = prefix + type;
      t.ids_[tag] = static_cast<int>(t.tags_.size());
      t.tags_.push_back(std::move(tag));
    }
  }
  return t;
}

int TagSet::id(const std::string& tag) const {
  auto it = ids_.find(tag);
  if (it == ids_.end()) {
    throw std::invalid_argument("unknown tag '" + tag + "'");
  }
  return it->second;
}

TaggerModel::TaggerModel(const TaggerConfig& config) : cfg_(config) {
  if (cfg_.vocab_size <= 0 || cfg_.embed_dim <= 0 || cfg_.num_tags <= 0 ||
      cfg_.max_sequence_length <= 0) {
    throw std::invalid_argument("tagger config fields must be positive");
  }
  params_.assign(cfg_.param_count(), 0.0);
}

std::span<double> TaggerModel::embedding() {
  return std::span<double>(params_).subspan(0, cfg_.embedding_size());
}
std::span<double> TaggerModel::weights() {
  return std::span<double>(params_).subspan(cfg_.embedding_size(), cfg_.weight_size());
}
std::span<double> TaggerModel::bias() {
  return std::span<double>(params_).subspan(cfg_.embedding_size() + cfg_.weight_size());
}
std::span<const double> TaggerModel::embedding() const {
  return std::span<const double>(params_).subspan(0, cfg_.embedding_size());
}
std::span<const double> TaggerModel::weights() const {
  return std::span<const double>(params_).subspan(cfg_.embedding_size(), cfg_.weight_size());
}
std::span<const double> TaggerModel::bias() const {
  return std::span<const double>(params_).subspan(cfg_.embedding_size() + cfg_.weight_size());
}

void TaggerModel::init_params(std::uint64_t seed) {
  rng::Stream stream(rng::mix(seed, rng::hash_key("tagger-init")));
  for (double& p : params_) {
    p = stream.uniform(-0.1, 0.1);
  }
}

namespace {

// Concatenated window embedding [E[prev]; E[cur]; E[next]] with zero vectors
// at the sentence boundaries.
void fill_context(const TaggerConfig& cfg, std::span<const double> embedding,
                  std::span<const int> tokens, std::size_t pos,
                  std::size_t eff_len, double* h) {
  const std::size_t d = static_cast<std::size_t>(cfg.embed_dim);
  for (int slot = 0; slot < TaggerConfig::kWindow; ++slot) {
    const std::ptrdiff_t j =
        static_cast<std::ptrdiff_t>(pos) + slot - 1;  // prev, self, next
    double* dst = h + static_cast<std::size_t>(slot) * d;
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(eff_len)) {
      std::fill(dst, dst + d, 0.0);
    } else {
      const int token = tokens[static_cast<std::size_t>(j)];
      std::copy_n(embedding.data() + static_cast<std::size_t>(token) * d, d, dst);
    }
  }
}

void check_tokens(const TaggerConfig& cfg, std::span<const int> tokens) {
  for (int t : tokens) {
    if (t < 0 || t >= cfg.vocab_size) {
      throw std::invalid_argument("token id out of range");
    }
  }
}

void softmax_row(std::span<const double> logits, double* probs) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double l : logits) max_logit = std::max(max_logit, l);
  double sum = 0.0;
  for (std::size_t t = 0; t < logits.size(); ++t) {
    probs[t] = std::exp(logits[t] - max_logit);
    sum += probs[t];
  }
  for (std::size_t t = 0; t < logits.size(); ++t) probs[t] /= sum;
}

}  // namespace

std::vector<double> TaggerModel::forward(std::span<const int> tokens) const {
  check_tokens(cfg_, tokens);
  const std::size_t eff_len =
      std::min(tokens.size(), static_cast<std::size_t>(cfg_.max_sequence_length));
  const std::size_t tags = static_cast<std::size_t>(cfg_.num_tags);
  const std::size_t ctx = cfg_.context_dim();
  std::vector<double> probs(eff_len * tags);
  std::vector<double> h(ctx);
  std::vector<double> logits(tags);
  const auto emb = embedding();
  const auto w = weights();
  const auto b = bias();
  for (std::size_t i = 0; i < eff_len; ++i) {
    fill_context(cfg_, emb, tokens, i, eff_len, h.data());
    for (std::size_t t = 0; t < tags; ++t) {
      logits[t] = b[t] + kernels::dot(w.data() + t * ctx, h.data(), ctx);
    }
    softmax_row(logits, probs.data() + i * tags);
  }
  return probs;
}

std::vector<int> TaggerModel::predict(std::span<const int> tokens,
                                      int pad_tag) const {
  const std::vector<double> probs = forward(tokens);
  const std::size_t tags = static_cast<std::size_t>(cfg_.num_tags);
  const std::size_t eff_len = probs.size() / tags;
  std::vector<int> out(tokens.size(), pad_tag);
  for (std::size_t i = 0; i < eff_len; ++i) {
    const double* row = probs.data() + i * tags;
    out[i] = static_cast<int>(std::max_element(row, row + tags) - row);
  }
  return out;
}

double loss_and_gradients(const TaggerModel& model,
                          std::span<const Example> batch,
                          std::span<double> grad_out) {
  const TaggerConfig& cfg = model.config();
  if (batch.empty()) {
    throw std::invalid_argument("loss_and_gradients: empty batch");
  }
  if (grad_out.size() != cfg.param_count()) {
    throw std::invalid_argument("loss_and_gradients: gradient buffer size");
  }
  std::fill(grad_out.begin(), grad_out.end(), 0.0);

  const std::size_t d = static_cast<std::size_t>(cfg.embed_dim);
  const std::size_t tags = static_cast<std::size_t>(cfg.num_tags);
  const std::size_t ctx = cfg.context_dim();

  std::size_t total_tokens = 0;
  for (const Example& ex : batch) {
    total_tokens += std::min(ex.tokens.size(),
                             static_cast<std::size_t>(cfg.max_sequence_length));
  }
  if (total_tokens == 0) return 0.0;
  const double inv_total = 1.0 / static_cast<double>(total_tokens);

  auto grad_embed = grad_out.subspan(0, cfg.embedding_size());
  auto grad_weights = grad_out.subspan(cfg.embedding_size(), cfg.weight_size());
  auto grad_bias = grad_out.subspan(cfg.embedding_size() + cfg.weight_size());

  const auto emb = model.embedding();
  const auto w = model.weights();
  const auto b = model.bias();

  std::vector<double> h(ctx);
  std::vector<double> logits(tags);
  std::vector<double> probs(tags);
  std::vector<double> dlogits(tags);
  std::vector<double> grad_ctx(ctx);

  double loss = 0.0;
  for (const Example& ex : batch) {
    check_tokens(cfg, ex.tokens);
    if (ex.tags.size() != ex.tokens.size()) {
      throw std::invalid_argument("loss_and_gradients: token/tag length mismatch");
    }
    const std::size_t eff_len = std::min(
        ex.tokens.size(), static_cast<std::size_t>(cfg.max_sequence_length));
    for (std::size_t i = 0; i < eff_len; ++i) {
      const int gold = ex.tags[i];
      if (gold < 0 || gold >= cfg.num_tags) {
        throw std::invalid_argument("loss_and_gradients: tag id out of range");
      }
      fill_context(cfg, emb, ex.tokens, i, eff_len, h.data());
      for (std::size_t t = 0; t < tags; ++t) {
        logits[t] = b[t] + kernels::dot(w.data() + t * ctx, h.data(), ctx);
      }
      softmax_row(logits, probs.data());
      loss -= std::log(probs[static_cast<std::size_t>(gold)]) * inv_total;

      for (std::size_t t = 0; t < tags; ++t) {
        dlogits[t] = (probs[t] - (static_cast<int>(t) == gold ? 1.0 : 0.0)) * inv_total;
      }
      std::fill(grad_ctx.begin(), grad_ctx.end(), 0.0);
      for (std::size_t t = 0; t < tags; ++t) {
        grad_bias[t] += dlogits[t];
        kernels::axpy(dlogits[t], h.data(), grad_weights.data() + t * ctx, ctx);
        kernels::axpy(dlogits[t], w.data() + t * ctx, grad_ctx.data(), ctx);
      }
      for (int slot = 0; slot < TaggerConfig::kWindow; ++slot) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + slot - 1;
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(eff_len)) continue;
        const std::size_t token =
            static_cast<std::size_t>(ex.tokens[static_cast<std::size_t>(j)]);
        kernels::axpy(1.0, grad_ctx.data() + static_cast<std::size_t>(slot) * d,
                      grad_embed.data() + token * d, d);
      }
    }
  }
  return loss;
}

double mean_cross_entropy(const TaggerModel& model,
                          std::span<const Example> data) {
  const TaggerConfig& cfg = model.config();
  const std::size_t tags = static_cast<std::size_t>(cfg.num_tags);
  double loss = 0.0;
  std::size_t total_tokens = 0;
  for (const Example& ex : data) {
    const std::vector<double> probs = model.forward(ex.tokens);
    const std::size_t eff_len = probs.size() / tags;
    for (std::size_t i = 0; i < eff_len; ++i) {
      const int gold = ex.tags[i];
      if (gold < 0 || gold >= cfg.num_tags) {
        throw std::invalid_argument("mean_cross_entropy: tag id out of range");
      }
      loss -= std::log(probs[i * tags + static_cast<std::size_t>(gold)]);
    }
    total_tokens += eff_len;
  }
  if (total_tokens == 0) return std::numeric_limits<double>::quiet_NaN();
  return loss / static_cast<double>(total_tokens);
}

void OptimizerConfig::validate() const {
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("betas must lie in (0, 1)");
  }
  if (weight_decay < 0.0) {
    throw std::invalid_argument("weight_decay must be >= 0");
  }
  if (batch_size <= 0) {
    throw std::invalid_argument("batch_size must be positive");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

void AdamState::step(std::span<double> params, std::span<const double> grads,
                     double lr, const OptimizerConfig& opt) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  if (lr < 0.0) {
    throw std::invalid_argument("adam_step: negative learning rate");
  }
  t_ += 1;
  kernels::AdamStepSpec spec;
  spec.lr = lr;
  spec.beta1 = opt.beta1;
  spec.beta2 = opt.beta2;
  spec.eps = opt.epsilon;
  spec.weight_decay = opt.weight_decay;
  if (opt.bias_correction) {
    spec.bias_corr1 = 1.0 - std::pow(opt.beta1, static_cast<double>(t_));
    spec.bias_corr2 = 1.0 - std::pow(opt.beta2, static_cast<double>(t_));
  }
  kernels::adam_update(params.data(), m_.data(), v_.data(), grads.data(),
                       params.size(), spec);
}

EncodedCorpus encode(const corpus::TaggedCorpus& c, const Vocabulary& vocab,
                     const TagSet& tags) {
  auto encode_split = [&](const std::vector<corpus::Sentence>& split) {
    std::vector<Example> out;
    out.reserve(split.size());
    for (const corpus::Sentence& s : split) {
      Example ex;
      ex.tokens.reserve(s.tokens.size());
      ex.tags.reserve(s.tags.size());
      for (const std::string& token : s.tokens) ex.tokens.push_back(vocab.id(token));
      for (const std::string& tag : s.tags) ex.tags.push_back(tags.id(tag));
      out.push_back(std::move(ex));
    }
    return out;
  };
  EncodedCorpus data;
  data.train = encode_split(c.train);
  data.val = encode_split(c.val);
  data.test = encode_split(c.test);
  return data;
}

TrainOutcome train(TaggerModel model, const EncodedCorpus& data,
                   schedule::ScheduleConfig schedule_config,
                   const OptimizerConfig& opt, std::uint64_t seed,
                   int epoch_cap) {
  opt.validate();
  if (data.train.empty()) {
    throw std::invalid_argument("train: empty training split");
  }
  const bool has_val = !data.val.empty();
  if (!has_val && schedule_config.is_adaptive()) {
    throw std::invalid_argument(
        "train: adaptive schedule requires a validation split");
  }
  if (epoch_cap <= 0) {
    throw std::invalid_argument("train: epoch cap must be positive");
  }

  const int n_train = static_cast<int>(data.train.size());
  const int steps_per_epoch = (n_train + opt.batch_size - 1) / opt.batch_size;
  schedule_config.steps_per_epoch = steps_per_epoch;
  schedule_config.validate();

  model.init_params(seed);
  AdamState adam(model.params().size());
  std::vector<double> grads(model.params().size(), 0.0);
  rng::Stream shuffler(rng::mix(seed, rng::hash_key("epoch-shuffle")));
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  schedule::ScheduleState state = schedule::make_state(schedule_config);
  TrainOutcome out;

  std::vector<Example> batch;
  batch.reserve(static_cast<std::size_t>(opt.batch_size));

  for (;;) {
    if (out.epochs_run >= epoch_cap) {
      out.hit_epoch_cap = true;
      break;
    }
    shuffler.shuffle(order);
    bool train_diverged = false;
    for (int step = 0; step < steps_per_epoch; ++step) {
      batch.clear();
      const std::size_t begin = static_cast<std::size_t>(step) *
                                static_cast<std::size_t>(opt.batch_size);
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(opt.batch_size));
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(data.train[order[i]]);
      }
      const double step_fraction =
          static_cast<double>(out.epochs_run) +
          static_cast<double>(step) / static_cast<double>(steps_per_epoch);
      const double lr = schedule::lr_at(schedule_config, state, step_fraction);
      const double loss = loss_and_gradients(model, batch, grads);
      if (!std::isfinite(loss)) {
        train_diverged = true;
        break;
      }
      adam.step(model.params(), grads, lr, opt);
    }
    if (train_diverged) {
      out.diverged = true;
      break;
    }

    const double end_lr = schedule::lr_at(
        schedule_config, state, static_cast<double>(out.epochs_run) + 1.0);
    const double val_loss =
        has_val ? mean_cross_entropy(model, data.val)
                : std::numeric_limits<double>::quiet_NaN();
    out.per_epoch_lr.push_back(end_lr);
    out.per_epoch_val_loss.push_back(val_loss);
    out.epochs_run += 1;

    if (has_val) {
      if (!std::isfinite(val_loss)) {
        out.diverged = true;
        break;
      }
      const schedule::EpochDecision decision =
          schedule::observe_validation_loss(schedule_config, state, val_loss);
      if (decision == schedule::EpochDecision::Stop) break;
    } else {
      state.epochs_completed += 1;
      if (state.epochs_completed >= schedule_config.fixed().total_epochs) break;
    }
  }

  out.model = std::move(model);
  return out;
}

}  // namespace adaptune::tagger
