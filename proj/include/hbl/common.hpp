#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hbl {

using PointIndex = std::size_t;

enum class ErrorCode {
  InvalidParameter,
  ParseError,
  DataError,
  DegenerateSpace,
  AmpFailure,
  NonContraction,
  Unsupported,
  IoError,
  Internal,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidParameter, what);
}

/// Neumaier-compensated accumulator. Ball-family suprema amplify rounding in
/// plain sums, so every measure in the library goes through this.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Provenance of a reported constant.
enum class Provenance { Exact, Estimate };

inline std::string_view provenance_name(Provenance p) noexcept {
  return p == Provenance::Exact ? "exact" : "estimate";
}

/// Decimal string with 12 significant digits; the canonical number format of
/// every serialized report.
std::string format_decimal(double value);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace hbl
