#pragma once

#include <stdexcept>
#include <string>

namespace sqvar {

enum class Errc {
  NonFinite,
  DimensionMismatch,
  NotSymmetric,
  NotPsd,
  BadWidth,
  BadDimension,
  SubspaceViolation,
  EigenvalueConditionViolated,
  NotFeasible,
  NotFirstOrder,
  Stalled,
  Parse,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPsd: return "NotPsd";
    case Errc::BadWidth: return "BadWidth";
    case Errc::BadDimension: return "BadDimension";
    case Errc::SubspaceViolation: return "SubspaceViolation";
    case Errc::EigenvalueConditionViolated: return "EigenvalueConditionViolated";
    case Errc::NotFeasible: return "NotFeasible";
    case Errc::NotFirstOrder: return "NotFirstOrder";
    case Errc::Stalled: return "Stalled";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace sqvar
