#include "adaptune/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adaptune::schedule {

void ScheduleConfig::validate() const {
  if (warmup_epochs < 0) {
    throw std::invalid_argument("warmup_epochs must be >= 0");
  }
  if (!(max_lr > 0.0)) {
    throw std::invalid_argument("max_lr must be positive");
  }
  if (steps_per_epoch <= 0) {
    throw std::invalid_argument("steps_per_epoch must be positive");
  }
  if (is_adaptive()) {
    if (adaptive().patience < 0) {
      throw std::invalid_argument("patience must be >= 0");
    }
  } else {
    const FixedMode& f = fixed();
    if (f.total_epochs <= warmup_epochs) {
      throw std::invalid_argument("total_epochs must exceed warmup_epochs");
    }
    if (f.decay_shape == DecayShape::Hybrid) {
      if (f.hybrid_patience <= 0 ||
          f.hybrid_patience >= f.total_epochs - warmup_epochs) {
        throw std::invalid_argument(
            "hybrid patience must lie in (0, total_epochs - warmup_epochs)");
      }
    }
  }
}

ScheduleState make_state(const ScheduleConfig& config) {
  ScheduleState s;
  s.phase = config.warmup_epochs > 0 ? Phase::WarmUp : Phase::Constant;
  return s;
}

namespace {

double warmup_or_constant_lr(const ScheduleConfig& c, double t) {
  if (c.warmup_epochs > 0 && t < static_cast<double>(c.warmup_epochs)) {
    return c.max_lr * t / static_cast<double>(c.warmup_epochs);
  }
  return c.max_lr;
}

double fixed_lr(const ScheduleConfig& c, double t) {
  const FixedMode& f = c.fixed();
  if (c.warmup_epochs > 0 && t < static_cast<double>(c.warmup_epochs)) {
    return c.max_lr * t / static_cast<double>(c.warmup_epochs);
  }
  const double total = static_cast<double>(f.total_epochs);
  if (f.decay_shape == DecayShape::Linear) {
    const double span = total - static_cast<double>(c.warmup_epochs);
    return std::max(0.0, c.max_lr * (total - t) / span);
  }
  const double decay_start = total - static_cast<double>(f.hybrid_patience);
  if (t <= decay_start) {
    return c.max_lr;
  }
  return std::max(0.0,
                  c.max_lr * (total - t) / static_cast<double>(f.hybrid_patience));
}

}  // namespace

double lr_at(const ScheduleConfig& config, const ScheduleState& state,
             double step_fraction) {
  if (state.phase == Phase::Stopped) {
    throw std::logic_error("lr_at: schedule has stopped");
  }
  if (!(step_fraction >= 0.0)) {
    throw std::domain_error("lr_at: step_fraction must be >= 0");
  }
  if (step_fraction > static_cast<double>(state.epochs_completed) + 1.0) {
    throw std::domain_error("lr_at: step_fraction beyond the ongoing epoch");
  }

  if (!config.is_adaptive()) {
    return fixed_lr(config, step_fraction);
  }
  if (state.phase != Phase::CoolDown) {
    return warmup_or_constant_lr(config, step_fraction);
  }

  const AdaptiveMode& mode = config.adaptive();
  const double entry = static_cast<double>(
      state.epochs_completed - (mode.patience - state.cooldown_remaining));
  if (step_fraction <= entry) {
    return warmup_or_constant_lr(config, step_fraction);
  }
  if (mode.cooldown_shape == CooldownShape::Constant) {
    return state.lr_at_entry;
  }
  const double progress = (step_fraction - entry) / static_cast<double>(mode.patience);
  return std::max(0.0, state.lr_at_entry * (1.0 - progress));
}

EpochDecision observe_validation_loss(const ScheduleConfig& config,
                                      ScheduleState& state, double val_loss) {
  if (state.phase == Phase::Stopped) {
    throw std::logic_error("observe_validation_loss: schedule has stopped");
  }
  if (!std::isfinite(val_loss)) {
    throw std::domain_error(
        "observe_validation_loss: non-finite validation loss");
  }

  state.epochs_completed += 1;
  const bool improved =
      !state.best_val_loss.has_value() || val_loss < *state.best_val_loss;

  if (!config.is_adaptive()) {
    if (improved) state.best_val_loss = val_loss;
    if (state.phase == Phase::WarmUp &&
        state.epochs_completed >= config.warmup_epochs) {
      state.phase = Phase::Constant;
    }
    if (state.epochs_completed >= config.fixed().total_epochs) {
      state.phase = Phase::Stopped;
      state.stop_epoch = state.epochs_completed;
      return EpochDecision::Stop;
    }
    return EpochDecision::Continue;
  }

  const AdaptiveMode& mode = config.adaptive();

  if (state.phase == Phase::WarmUp) {
    // Warm-up epochs are monitored for best-loss bookkeeping only; the
    // cool-down can start once the constant phase is reached.
    if (improved) state.best_val_loss = val_loss;
    if (state.epochs_completed >= config.warmup_epochs) {
      state.phase = Phase::Constant;
    }
    return EpochDecision::Continue;
  }

  if (state.phase == Phase::Constant) {
    if (improved) {
      state.best_val_loss = val_loss;
      return EpochDecision::Continue;
    }
    if (mode.patience == 0) {
      state.phase = Phase::Stopped;
      state.stop_epoch = state.epochs_completed;
      return EpochDecision::Stop;
    }
    state.phase = Phase::CoolDown;
    state.cooldown_remaining = mode.patience;
    state.lr_at_entry = config.max_lr;
    return EpochDecision::EnterCoolDown;
  }

  // Phase::CoolDown
  if (improved) {
    state.best_val_loss = val_loss;
    if (mode.resumption) {
      state.phase = Phase::Constant;
      state.cooldown_remaining = 0;
      return EpochDecision::ResumeConstant;
    }
  }
  state.cooldown_remaining -= 1;
  if (state.cooldown_remaining <= 0) {
    state.phase = Phase::Stopped;
    state.stop_epoch = state.epochs_completed;
    return EpochDecision::Stop;
  }
  return EpochDecision::Continue;
}

TraceResult schedule_trace(const ScheduleConfig& config,
                           std::span<const double> losses,
                           std::optional<int> hard_cap) {
  config.validate();
  TraceResult trace;
  ScheduleState state = make_state(config);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (hard_cap && static_cast<int>(i) >= *hard_cap) break;
    // End-of-epoch value, taken before the observation so that a completed
    // linear cool-down records exactly 0.
    trace.lr_curve.push_back(
        lr_at(config, state, static_cast<double>(state.epochs_completed) + 1.0));
    const EpochDecision d = observe_validation_loss(config, state, losses[i]);
    trace.decisions.push_back(d);
    if (d == EpochDecision::Stop) {
      trace.stop_epoch = state.stop_epoch;
      return trace;
    }
  }
  trace.hit_cap = true;
  return trace;
}

std::string to_string(EpochDecision d) {
  switch (d) {
    case EpochDecision::Continue: return "continue";
    case EpochDecision::EnterCoolDown: return "enter-cooldown";
    case EpochDecision::ResumeConstant: return "resume-constant";
    case EpochDecision::Stop: return "stop";
  }
  return "?";
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::WarmUp: return "warm-up";
    case Phase::Constant: return "constant";
    case Phase::CoolDown: return "cool-down";
    case Phase::Stopped: return "stopped";
  }
  return "?";
}

}  // namespace adaptune::schedule
