#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace adaptune::schedule {

enum class CooldownShape { Linear, Constant };
enum class DecayShape { Linear, Hybrid };

// Early-stopping schedule: constant learning rate after warm-up, a cool-down
// of `patience` epochs once the validation loss stops improving, and
// (optionally) resumption of constant-rate training when a new best value is
// seen during the cool-down. patience == 0 stops on the first
// non-improvement.
struct AdaptiveMode {
  int patience = 7;
  CooldownShape cooldown_shape = CooldownShape::Linear;
  bool resumption = true;
};

// Predetermined epoch count. Linear: learning rate decays linearly to zero
// after warm-up. Hybrid: constant until (total_epochs - hybrid_patience),
// then linear to zero, the static variant of the adaptive schedule.
struct FixedMode {
  int total_epochs = 5;
  DecayShape decay_shape = DecayShape::Linear;
  int hybrid_patience = 7;
};

struct ScheduleConfig {
  std::variant<AdaptiveMode, FixedMode> mode = AdaptiveMode{};
  int warmup_epochs = 2;
  double max_lr = 2e-5;
  int steps_per_epoch = 1;  // granularity used by callers to build step fractions

  bool is_adaptive() const { return std::holds_alternative<AdaptiveMode>(mode); }
  const AdaptiveMode& adaptive() const { return std::get<AdaptiveMode>(mode); }
  const FixedMode& fixed() const { return std::get<FixedMode>(mode); }

  // Throws std::invalid_argument on violated invariants
  // (total_epochs > warmup_epochs, hybrid_patience < total - warmup, ...).
  void validate() const;
};

enum class Phase { WarmUp, Constant, CoolDown, Stopped };

// Kind of transition reported after each validation-loss observation.
enum class EpochDecision { Continue, EnterCoolDown, ResumeConstant, Stop };

struct ScheduleState {
  Phase phase = Phase::WarmUp;
  int epochs_completed = 0;
  std::optional<double> best_val_loss;
  std::optional<int> stop_epoch;
  // Valid while phase == CoolDown.
  int cooldown_remaining = 0;
  double lr_at_entry = 0.0;
};

ScheduleState make_state(const ScheduleConfig& config);

// Learning rate at `step_fraction` epochs into the run, interpolated per
// optimizer step. Valid for step_fraction in [0, epochs_completed + 1];
// before the current cool-down episode the value reflects the warm-up /
// constant profile. Throws std::domain_error on negative input or when the
// schedule has stopped.
double lr_at(const ScheduleConfig& config, const ScheduleState& state,
             double step_fraction);

// Feed the end-of-epoch validation loss; transitions the state machine and
// returns the decision. A strict decrease below the best seen value counts
// as an improvement; ties do not. NaN/Inf losses and calls after Stop throw
// std::domain_error / std::logic_error.
EpochDecision observe_validation_loss(const ScheduleConfig& config,
                                      ScheduleState& state, double val_loss);

struct TraceResult {
  std::optional<int> stop_epoch;
  std::vector<double> lr_curve;  // end-of-epoch learning rate, one per epoch
  std::vector<EpochDecision> decisions;
  bool hit_cap = false;  // loss sequence (or hard cap) exhausted before Stop
};

// Replay a whole loss sequence. Pure: identical inputs give identical traces.
TraceResult schedule_trace(const ScheduleConfig& config,
                           std::span<const double> losses,
                           std::optional<int> hard_cap = std::nullopt);

std::string to_string(EpochDecision d);
std::string to_string(Phase p);

}  // namespace adaptune::schedule
