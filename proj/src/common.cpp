#include "hbl/common.hpp"

#include <cstdio>

namespace hbl {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::DataError: return "data-error";
    case ErrorCode::DegenerateSpace: return "degenerate-space";
    case ErrorCode::AmpFailure: return "amp-failure";
    case ErrorCode::NonContraction: return "non-contraction";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::IoError: return "io-error";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

std::string format_decimal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace hbl
