#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfgnet {

enum class ErrorCode {
  not_a_simplex,
  step_too_large,
  no_convergence,
  degenerate,
  no_real_equilibrium,
  not_an_equilibrium,
  no_root,
  degenerate_mapping,
  hypothesis_violated,
  out_of_range,
  invalid_argument,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Domain error raised by every solver in the library. The CLI maps these
// to exit status 1 and a JSON record on stderr.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mfgnet
