#pragma once

#include <stdexcept>
#include <string>

namespace fsmc {

enum class errc {
  non_square,
  negative_entry,
  row_sum_violation,
  not_regular,
  no_convergence,
  zero_steady_state_prob,
  param_out_of_range,
  family_mismatch,
  mu_out_of_range,
  mu_on_boundary,
  length_mismatch,
  block_too_large,
  empty_sweep,
  bad_file,
  bad_config,
};

constexpr const char* errc_name(errc c) {
  switch (c) {
    case errc::non_square: return "NonSquare";
    case errc::negative_entry: return "NegativeEntry";
    case errc::row_sum_violation: return "RowSumViolation";
    case errc::not_regular: return "NotRegular";
    case errc::no_convergence: return "NoConvergence";
    case errc::zero_steady_state_prob: return "ZeroSteadyStateProb";
    case errc::param_out_of_range: return "ParamOutOfRange";
    case errc::family_mismatch: return "FamilyMismatch";
    case errc::mu_out_of_range: return "MuOutOfRange";
    case errc::mu_on_boundary: return "MuOnBoundary";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::block_too_large: return "BlockTooLarge";
    case errc::empty_sweep: return "EmptySweep";
    case errc::bad_file: return "BadFile";
    case errc::bad_config: return "BadConfig";
  }
  return "UnknownError";
}

/// Library error carrying a machine-checkable code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace fsmc
