#pragma once

#include <stdexcept>
#include <string>

namespace pcp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PCP_DEFINE_ERROR(Name)         \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

PCP_DEFINE_ERROR(DomainError);
PCP_DEFINE_ERROR(ConvergenceError);
PCP_DEFINE_ERROR(InadmissibleError);
PCP_DEFINE_ERROR(WeightError);
PCP_DEFINE_ERROR(MatrixError);
PCP_DEFINE_ERROR(ConfigError);
PCP_DEFINE_ERROR(UnsupportedOrder);
PCP_DEFINE_ERROR(DegenerateCell);
PCP_DEFINE_ERROR(AverageInadmissible);
PCP_DEFINE_ERROR(BracketError);
PCP_DEFINE_ERROR(ConstructionError);
PCP_DEFINE_ERROR(UnknownPreset);

#undef PCP_DEFINE_ERROR

/// Raised when a time step produces (or meets) a state outside the admissible set.
class StepError : public Error {
 public:
  StepError(const std::string &what, long cell) : Error(what), cell_(cell) {}
  /// Offending cell index, or -1 when not attributable to one cell.
  long cell() const noexcept { return cell_; }

 private:
  long cell_;
};

}  // namespace pcp
