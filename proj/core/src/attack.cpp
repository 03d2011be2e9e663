#include "mfgnet/attack.hpp"

#include <cmath>
#include <string>

#include <fmt/core.h>

#include "mfgnet/error.hpp"

namespace mfgnet {

std::string_view to_string(AttackKind k) noexcept {
  return k == AttackKind::sequential ? "sequential" : "low-rate";
}

AttackKind attack_kind_from_string(std::string_view s) {
  if (s == "low-rate" || s == "continuous-low-rate") {
    return AttackKind::continuous_low_rate;
  }
  if (s == "sequential") return AttackKind::sequential;
  throw Error(ErrorCode::invalid_argument,
              fmt::format("unknown attack kind '{}' (low-rate | sequential)", s));
}

AttackSchedule AttackSchedule::low_rate() {
  AttackSchedule s;
  s.k_hat = 0.8;
  return s;
}

AttackSchedule AttackSchedule::sequential() {
  AttackSchedule s;
  s.kind = AttackKind::sequential;
  s.sample_interval = 100;
  s.k_hat = 1.2;
  return s;
}

double AttackSchedule::multiplier(std::int64_t iteration) const noexcept {
  if (kind == AttackKind::sequential && iteration % burst_period == 0) {
    return burst_multiplier;
  }
  return 1.0;
}

void AttackSchedule::validate() const {
  const bool ok = base13 >= 0.0 && base23 >= 0.0 && std::isfinite(base13) &&
                  std::isfinite(base23) && burst_multiplier >= 1.0 &&
                  std::isfinite(burst_multiplier) && burst_period >= 1 &&
                  sample_interval >= 1 && std::isfinite(k_hat) &&
                  std::isfinite(omega_hat);
  if (!ok) {
    throw Error(ErrorCode::invalid_argument,
                "attack schedule needs rates >= 0, multiplier >= 1, intervals >= 1");
  }
}

std::pair<double, double> schedule_rates(const AttackSchedule& sched,
                                         std::int64_t iteration) {
  if (iteration < 0) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("iteration {} is negative", iteration));
  }
  const double m = sched.multiplier(iteration);
  return {sched.base13 * m, sched.base23 * m};
}

}  // namespace mfgnet
