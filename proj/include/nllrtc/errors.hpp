#ifndef NLLRTC_ERRORS_HPP_
#define NLLRTC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nllrtc {

/// Malformed files, bad headers, shape mismatches between inputs.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or undefined numerical operations.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nllrtc

#endif  // NLLRTC_ERRORS_HPP_
