#pragma once

#include <stdexcept>
#include <string>

namespace flagdyn {

enum class ErrorCode {
  InvalidArgument,
  RankDeficient,
  NonSquare,
  ShapeMismatch,
  NotUnitaryFrame,
  NotFrame,
  Singular,
  BadIndex,
  SignatureMismatch,
  OddAmbient,
  Divergence,
  NotProjector,
  PreconditionViolated,
  Inconsistent,
  SizeLimit,
  NotLinked,
  NotSimpleSpectrum,
  WeightsNotStrict,
  BadSizes,
  OutOfRange,
  NonPositiveEigenvalue,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace flagdyn
