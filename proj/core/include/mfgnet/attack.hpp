#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

namespace mfgnet {

enum class AttackKind { continuous_low_rate, sequential };

std::string_view to_string(AttackKind k) noexcept;
/// "low-rate" or "sequential"; throws Error(invalid_argument) otherwise.
AttackKind attack_kind_from_string(std::string_view s);

struct AttackSchedule {
  AttackKind kind = AttackKind::continuous_low_rate;
  double base13 = 0.13;
  double base23 = 0.13;
  double burst_multiplier = 5.0;
  std::int64_t burst_period = 5;     // iterations between bursts
  std::int64_t sample_interval = 150;  // iterations between disturbance draws
  double k_hat = 0.8;
  double omega_hat = 1.0;

  static AttackSchedule low_rate();
  static AttackSchedule sequential();

  /// burst_multiplier on bursting iterations of a sequential schedule, 1
  /// otherwise.
  double multiplier(std::int64_t iteration) const noexcept;

  /// Disturbance magnitude k_hat * omega_hat.
  double magnitude() const noexcept { return k_hat * omega_hat; }

  void validate() const;
};

/// (beta13, beta23) in force at an iteration: the base rates, times the burst
/// multiplier on iterations divisible by burst_period for a sequential
/// schedule.
std::pair<double, double> schedule_rates(const AttackSchedule& sched,
                                         std::int64_t iteration);

}  // namespace mfgnet
